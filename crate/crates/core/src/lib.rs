//! Deciding first-order separability, covering and pointlike sets for
//! regular languages of countable ordinal words, given by finite ordinal
//! monoids.

pub mod algebra;
pub mod cli;
pub mod cycle;
pub mod decision;
pub mod format;
pub mod green;
pub mod merge;
pub mod ordinal;
pub mod powerset;
pub mod saturation;
pub mod witness;

pub use algebra::{ElementId, LetterMap, OrdinalMonoidPresentation};
pub use decision::{cover, pointlikes, separate, LanguageRecognizer, Verdict};
pub use format::{parse_presentation, print_presentation, PresentationFile};
pub use powerset::{PowerMonoid, SubsetElement};
pub use saturation::saturate;
