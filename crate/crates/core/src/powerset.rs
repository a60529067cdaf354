//! The power ordinal monoid `P(M)`.
//!
//! Operations are lifted elementwise: `X·Y = {x·y}`, and
//! `X^ω = {s·t^ω | s, t ∈ X⁺}` where `X⁺` is the subsemigroup generated by `X`.
//! The empty set is not a carrier element: `X^ω` of `∅` is rejected by the
//! checked API, and the full power presentation ranges over nonempty subsets.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::algebra::{ElementId, OrdinalMonoidPresentation};
use crate::cycle::PowerCycle;
use crate::merge::{MergeMonoid, TableMergeMonoid};

/// Largest base carrier for which the full power presentation is built.
pub const DEFAULT_POWER_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PowersetError {
    #[error("subsets belong to different base monoids")]
    BaseMismatch,
    #[error("the omega-power of the empty set is undefined")]
    EmptyOmega,
    #[error("base carrier has {size} elements, above the power-set cap of {cap}; supply generators for a reachable fragment")]
    CapExceeded { size: usize, cap: usize },
}

/// A subset of the carrier of a base presentation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetElement {
    base: u64,
    members: FixedBitSet,
}

impl SubsetElement {
    pub fn empty(base: &OrdinalMonoidPresentation) -> Self {
        SubsetElement {
            base: base.fingerprint(),
            members: FixedBitSet::with_capacity(base.len()),
        }
    }

    pub fn from_elements(
        base: &OrdinalMonoidPresentation,
        elements: impl IntoIterator<Item = ElementId>,
    ) -> Self {
        let mut s = Self::empty(base);
        for x in elements {
            s.members.insert(x.0);
        }
        s
    }

    pub fn singleton(base: &OrdinalMonoidPresentation, x: ElementId) -> Self {
        Self::from_elements(base, [x])
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.members.contains(x.0)
    }

    pub fn insert(&mut self, x: ElementId) {
        self.members.insert(x.0);
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Members in carrier order.
    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.members.ones().map(ElementId)
    }

    pub fn elements(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &SubsetElement) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn intersects(&self, other: &SubsetElement) -> bool {
        !self.members.is_disjoint(&other.members)
    }

    pub fn union_with(&mut self, other: &SubsetElement) {
        self.members.union_with(&other.members);
    }

    pub fn same_base(&self, other: &SubsetElement) -> bool {
        self.base == other.base
    }

    pub fn belongs_to(&self, base: &OrdinalMonoidPresentation) -> bool {
        self.base == base.fingerprint() && self.members.len() == base.len()
    }

    /// Every nonempty subset of `self`.
    pub fn nonempty_subsets(&self) -> Vec<SubsetElement> {
        let elems = self.elements();
        assert!(elems.len() < 32, "subset too large to enumerate");
        (1u32..(1 << elems.len()))
            .map(|mask| {
                let mut s = SubsetElement {
                    base: self.base,
                    members: FixedBitSet::with_capacity(self.members.len()),
                };
                for (i, x) in elems.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        s.members.insert(x.0);
                    }
                }
                s
            })
            .collect()
    }

    /// Names of the members, e.g. `{a,aa}`.
    pub fn display<'a>(&'a self, base: &'a OrdinalMonoidPresentation) -> impl fmt::Display + 'a {
        SubsetDisplay { set: self, base }
    }

    pub fn names(&self, base: &OrdinalMonoidPresentation) -> Vec<String> {
        self.iter().map(|x| base.name(x).to_string()).collect()
    }
}

struct SubsetDisplay<'a> {
    set: &'a SubsetElement,
    base: &'a OrdinalMonoidPresentation,
}

impl fmt::Display for SubsetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.set.names(self.base).join(","))
    }
}

impl fmt::Debug for SubsetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.ones()).finish()
    }
}

/// Canonical order: lexicographic on the sorted member indices.
impl Ord for SubsetElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members
            .ones()
            .cmp(other.members.ones())
            .then_with(|| self.base.cmp(&other.base))
    }
}

impl PartialOrd for SubsetElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `P(M)` over a base presentation, with subset inclusion as order and
/// `X^merge` as merge.
#[derive(Clone, Copy, Debug)]
pub struct PowerMonoid<'a> {
    base: &'a OrdinalMonoidPresentation,
    fingerprint: u64,
}

impl<'a> PowerMonoid<'a> {
    pub fn new(base: &'a OrdinalMonoidPresentation) -> Self {
        PowerMonoid {
            base,
            fingerprint: base.fingerprint(),
        }
    }

    pub fn base(&self) -> &'a OrdinalMonoidPresentation {
        self.base
    }

    pub fn singleton(&self, x: ElementId) -> SubsetElement {
        SubsetElement::singleton(self.base, x)
    }

    pub fn subset(&self, elements: impl IntoIterator<Item = ElementId>) -> SubsetElement {
        SubsetElement::from_elements(self.base, elements)
    }

    /// Looks elements up by name; panics on unknown names.
    pub fn named(&self, names: &[&str]) -> SubsetElement {
        self.subset(names.iter().map(|n| {
            self.base
                .id(n)
                .unwrap_or_else(|| panic!("unknown element `{n}`"))
        }))
    }

    fn check(&self, x: &SubsetElement) -> Result<(), PowersetError> {
        if x.base == self.fingerprint && x.members.len() == self.base.len() {
            Ok(())
        } else {
            Err(PowersetError::BaseMismatch)
        }
    }

    fn product_unchecked(&self, x: &SubsetElement, y: &SubsetElement) -> SubsetElement {
        let mut out = SubsetElement::empty(self.base);
        for a in x.iter() {
            let row = self.base.product_row(a);
            for b in y.iter() {
                out.members.insert(row[b.0].0);
            }
        }
        out
    }

    /// `{x·y | x ∈ X, y ∈ Y}`.
    pub fn p_product(
        &self,
        x: &SubsetElement,
        y: &SubsetElement,
    ) -> Result<SubsetElement, PowersetError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.product_unchecked(x, y))
    }

    /// The least set containing `X` and closed under the base product.
    pub fn generated_subsemigroup(&self, x: &SubsetElement) -> SubsetElement {
        let mut closed = x.clone();
        let mut queue: VecDeque<ElementId> = x.iter().collect();
        while let Some(a) = queue.pop_front() {
            for b in x.iter() {
                let c = self.base.mul(a, b);
                if !closed.contains(c) {
                    closed.insert(c);
                    queue.push_back(c);
                }
            }
        }
        closed
    }

    fn omega_unchecked(&self, x: &SubsetElement) -> SubsetElement {
        let generated = self.generated_subsemigroup(x);
        let mut omegas = SubsetElement::empty(self.base);
        for t in generated.iter() {
            omegas.insert(self.base.omega(t));
        }
        self.product_unchecked(&generated, &omegas)
    }

    /// `{s·t^ω | s, t ∈ X⁺}`.
    pub fn p_omega(&self, x: &SubsetElement) -> Result<SubsetElement, PowersetError> {
        self.check(x)?;
        if x.is_empty() {
            return Err(PowersetError::EmptyOmega);
        }
        Ok(self.omega_unchecked(x))
    }

    pub fn power_cycle_of(&self, x: &SubsetElement) -> PowerCycle<SubsetElement> {
        PowerCycle::compute(x, |a, b| self.product_unchecked(a, b))
    }

    /// `⋃_k X^(π+k)`: the union of the cycle of the power sequence of `X`.
    pub fn p_merge(&self, x: &SubsetElement) -> Result<SubsetElement, PowersetError> {
        self.check(x)?;
        Ok(self.merge_unchecked(x))
    }

    fn merge_unchecked(&self, x: &SubsetElement) -> SubsetElement {
        let cycle = self.power_cycle_of(x);
        let mut out = SubsetElement::empty(self.base);
        for s in cycle.cycle() {
            out.union_with(s);
        }
        out
    }

    /// All nonempty subsets of the base, ordered by size then members.
    pub fn nonempty_subsets(&self) -> Vec<SubsetElement> {
        let n = self.base.len();
        assert!(n < 32, "carrier too large to enumerate its power set");
        let mut all: Vec<SubsetElement> = (1u32..(1 << n))
            .map(|mask| self.subset((0..n).filter(|i| mask & (1 << i) != 0).map(ElementId)))
            .collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    /// Builds `P(M)` as a presentation over its nonempty subsets.
    ///
    /// With `generators`, only the fragment reachable from them and `{1}`
    /// under product, ω-power and merge is built; without, the full power
    /// set is built if the base has at most `cap` elements.
    pub fn power_presentation(
        &self,
        generators: Option<&[SubsetElement]>,
        cap: usize,
    ) -> Result<PowerPresentation, PowersetError> {
        let subsets = match generators {
            None => {
                if self.base.len() > cap {
                    return Err(PowersetError::CapExceeded {
                        size: self.base.len(),
                        cap,
                    });
                }
                self.nonempty_subsets()
            }
            Some(gens) => {
                for g in gens {
                    self.check(g)?;
                    if g.is_empty() {
                        return Err(PowersetError::EmptyOmega);
                    }
                }
                let seeds: Vec<SubsetElement> = gens.to_vec();
                let sat = crate::saturation::saturate(self, &seeds);
                let mut members: Vec<SubsetElement> = sat.members().to_vec();
                members.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                members
            }
        };
        let index: HashMap<&SubsetElement, usize> =
            subsets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let unit = index[&self.singleton(self.base.unit())];
        let product = subsets
            .iter()
            .map(|x| {
                subsets
                    .iter()
                    .map(|y| index[&self.product_unchecked(x, y)])
                    .collect()
            })
            .collect();
        let omega = subsets
            .iter()
            .map(|x| index[&self.omega_unchecked(x)])
            .collect();
        let merge = subsets
            .iter()
            .map(|x| ElementId(index[&self.merge_unchecked(x)]))
            .collect();
        let names = subsets
            .iter()
            .map(|s| s.display(self.base).to_string())
            .collect();
        let presentation = OrdinalMonoidPresentation::from_tables(names, unit, product, omega)
            .expect("power presentation tables are well-formed");
        Ok(PowerPresentation {
            presentation,
            subsets,
            merge,
        })
    }
}

impl MergeMonoid for PowerMonoid<'_> {
    type Elem = SubsetElement;

    fn unit(&self) -> SubsetElement {
        self.singleton(self.base.unit())
    }

    fn mul(&self, x: &SubsetElement, y: &SubsetElement) -> SubsetElement {
        debug_assert!(self.check(x).is_ok() && self.check(y).is_ok());
        self.product_unchecked(x, y)
    }

    /// Total on the carrier: `∅^ω` is taken to be `∅`.
    fn omega(&self, x: &SubsetElement) -> SubsetElement {
        self.omega_unchecked(x)
    }

    fn merge(&self, x: &SubsetElement) -> SubsetElement {
        self.merge_unchecked(x)
    }

    fn leq(&self, x: &SubsetElement, y: &SubsetElement) -> bool {
        x.is_subset(y)
    }

    fn describe(&self, x: &SubsetElement) -> String {
        x.display(self.base).to_string()
    }
}

/// `P(M)` (or a reachable fragment of it) as a plain presentation.
#[derive(Clone, Debug)]
pub struct PowerPresentation {
    pub presentation: OrdinalMonoidPresentation,
    /// `subsets[i]` is the subset named by element `i` of `presentation`.
    pub subsets: Vec<SubsetElement>,
    merge: Vec<ElementId>,
}

impl PowerPresentation {
    /// The presentation with `p_merge` as merge and inclusion as order.
    pub fn merge_view(&self) -> TableMergeMonoid {
        let subsets = &self.subsets;
        TableMergeMonoid::new(self.presentation.clone(), self.merge.clone(), |x, y| {
            subsets[x.0].is_subset(&subsets[y.0])
        })
    }

    pub fn element_of(&self, subset: &SubsetElement) -> Option<ElementId> {
        self.subsets.iter().position(|s| s == subset).map(ElementId)
    }

    pub fn subset_family(&self) -> BTreeSet<SubsetElement> {
        self.subsets.iter().cloned().collect()
    }
}
