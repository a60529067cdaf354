//! Ordinal-word expressions, `≡ᵏ` derivations, witness families for
//! saturation members and a finite-word game oracle.

pub mod construct;
pub mod derivation;
pub mod ef;
pub mod expr;

pub use construct::{witness_pair, witnesses, WitnessError, WitnessFamily, WitnessPair};
pub use derivation::{check_derivation, check_derivation_detailed, EquivDerivation, Rule};
pub use ef::{ef_equiv_finite, EfBounds, EfError};
pub use expr::{eval_expr, parse_expr, WordExpr};
