//! Ordinal monoids with merge: a presentation together with a partial order
//! and a monotone merge operator satisfying the laws
//!
//! ```text
//! a^(π+k) ≤ a^merge          (a^π)^merge = a^π
//! a^merge · a^merge = (a^merge)^merge = a^merge
//! (a·b)^merge = a · (b·a)^merge · b
//! ```

use std::fmt::Debug;
use std::hash::Hash;

use fixedbitset::FixedBitSet;

use crate::algebra::{ElementId, OrdinalMonoidPresentation};
use crate::cycle::PowerCycle;

/// The operations of an ordinal monoid with merge over some element type.
///
/// Implementations are expected to be total on the elements they are used
/// with; the laws are checked by [`validate_merge_axioms`].
pub trait MergeMonoid {
    type Elem: Clone + Eq + Ord + Hash + Debug;

    fn unit(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn omega(&self, x: &Self::Elem) -> Self::Elem;
    fn merge(&self, x: &Self::Elem) -> Self::Elem;
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool;
    fn describe(&self, x: &Self::Elem) -> String;

    fn power_cycle(&self, x: &Self::Elem) -> PowerCycle<Self::Elem> {
        PowerCycle::compute(x, |a, b| self.mul(a, b))
    }

    fn idempotent_power(&self, x: &Self::Elem) -> Self::Elem {
        self.power_cycle(x).idempotent(|a, b| self.mul(a, b))
    }

    fn pow(&self, x: &Self::Elem, n: u64) -> Self::Elem {
        let mut result = self.unit();
        let mut base = x.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        result
    }
}

/// A merge monoid given by explicit tables over a presentation.
#[derive(Clone, Debug)]
pub struct TableMergeMonoid {
    presentation: OrdinalMonoidPresentation,
    merge: Vec<ElementId>,
    /// `below[y]` holds every `x ≤ y`.
    below: Vec<FixedBitSet>,
}

impl TableMergeMonoid {
    pub fn new(
        presentation: OrdinalMonoidPresentation,
        merge: Vec<ElementId>,
        leq: impl Fn(ElementId, ElementId) -> bool,
    ) -> Self {
        let n = presentation.len();
        assert_eq!(merge.len(), n, "merge table must be total");
        let below = presentation
            .elements()
            .map(|y| {
                let mut set = FixedBitSet::with_capacity(n);
                for x in presentation.elements() {
                    if leq(x, y) {
                        set.insert(x.0);
                    }
                }
                set
            })
            .collect();
        TableMergeMonoid {
            presentation,
            merge,
            below,
        }
    }

    /// The discrete order with merge taken as the identity.
    pub fn identity_merge(presentation: OrdinalMonoidPresentation) -> Self {
        let merge = presentation.elements().collect();
        Self::new(presentation, merge, |x, y| x == y)
    }

    pub fn presentation(&self) -> &OrdinalMonoidPresentation {
        &self.presentation
    }

    pub fn carrier(&self) -> Vec<ElementId> {
        self.presentation.elements().collect()
    }

    pub fn with_merge(mut self, merge: Vec<ElementId>) -> Self {
        assert_eq!(merge.len(), self.presentation.len());
        self.merge = merge;
        self
    }
}

impl MergeMonoid for TableMergeMonoid {
    type Elem = ElementId;

    fn unit(&self) -> ElementId {
        self.presentation.unit()
    }

    fn mul(&self, x: &ElementId, y: &ElementId) -> ElementId {
        self.presentation.mul(*x, *y)
    }

    fn omega(&self, x: &ElementId) -> ElementId {
        self.presentation.omega(*x)
    }

    fn merge(&self, x: &ElementId) -> ElementId {
        self.merge[x.0]
    }

    fn leq(&self, x: &ElementId, y: &ElementId) -> bool {
        self.below[y.0].contains(x.0)
    }

    fn describe(&self, x: &ElementId) -> String {
        self.presentation.name(*x).to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MergeAxiom {
    /// `a^(π+k) ≤ a^merge`
    PowerBelowMerge {
        k: usize,
    },
    /// `(a^π)^merge = a^π`
    IdempotentFixed,
    /// `a^merge · a^merge = a^merge`
    MergeSquare,
    /// `(a^merge)^merge = a^merge`
    MergeOfMerge,
    /// `(a·b)^merge = a · (b·a)^merge · b`
    Conjugation,
    MergeMonotone,
    ProductMonotone,
    OmegaMonotone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeViolation<E> {
    pub axiom: MergeAxiom,
    pub witness: Vec<E>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeReport<E> {
    pub violations: Vec<MergeViolation<E>>,
}

impl<E> Default for MergeReport<E> {
    fn default() -> Self {
        MergeReport {
            violations: Vec::new(),
        }
    }
}

impl<E: Clone> MergeReport<E> {
    fn record(&mut self, axiom: MergeAxiom, witness: &[E]) {
        let same_family = |a: &MergeAxiom| match (a, &axiom) {
            (MergeAxiom::PowerBelowMerge { .. }, MergeAxiom::PowerBelowMerge { .. }) => true,
            (a, b) => a == b,
        };
        match self.violations.iter_mut().find(|v| same_family(&v.axiom)) {
            Some(v) => v.count += 1,
            None => self.violations.push(MergeViolation {
                axiom,
                witness: witness.to_vec(),
                count: 1,
            }),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, pred: impl Fn(&MergeAxiom) -> bool) -> bool {
        self.violations.iter().any(|v| pred(&v.axiom))
    }
}

/// Checks every merge law, plus monotonicity of merge, product and ω-power,
/// exhaustively over `carrier`.
pub fn validate_merge_axioms<V: MergeMonoid>(
    view: &V,
    carrier: &[V::Elem],
) -> MergeReport<V::Elem> {
    let mut report = MergeReport::default();
    for a in carrier {
        let merged = view.merge(a);
        let cycle = view.power_cycle(a);
        let idem = cycle.idempotent(|x, y| view.mul(x, y));
        let mut power = idem.clone();
        for k in 0..cycle.period {
            if !view.leq(&power, &merged) {
                report.record(MergeAxiom::PowerBelowMerge { k }, std::slice::from_ref(a));
            }
            power = view.mul(&power, a);
        }
        if view.merge(&idem) != idem {
            report.record(MergeAxiom::IdempotentFixed, std::slice::from_ref(a));
        }
        if view.mul(&merged, &merged) != merged {
            report.record(MergeAxiom::MergeSquare, std::slice::from_ref(a));
        }
        if view.merge(&merged) != merged {
            report.record(MergeAxiom::MergeOfMerge, std::slice::from_ref(a));
        }
    }
    for a in carrier {
        for b in carrier {
            let lhs = view.merge(&view.mul(a, b));
            let rhs = view.mul(&view.mul(a, &view.merge(&view.mul(b, a))), b);
            if lhs != rhs {
                report.record(MergeAxiom::Conjugation, &[a.clone(), b.clone()]);
            }
            if view.leq(a, b) {
                if !view.leq(&view.merge(a), &view.merge(b)) {
                    report.record(MergeAxiom::MergeMonotone, &[a.clone(), b.clone()]);
                }
                if !view.leq(&view.omega(a), &view.omega(b)) {
                    report.record(MergeAxiom::OmegaMonotone, &[a.clone(), b.clone()]);
                }
                for c in carrier {
                    if !view.leq(&view.mul(a, c), &view.mul(b, c))
                        || !view.leq(&view.mul(c, a), &view.mul(c, b))
                    {
                        report.record(
                            MergeAxiom::ProductMonotone,
                            &[a.clone(), b.clone(), c.clone()],
                        );
                    }
                }
            }
        }
    }
    report
}
