//! Saturation `Clos_ord(A)`: the least family containing `A` and the unit,
//! closed under product, merge and ω-power. Also the closure variants and
//! the two trichotomy classifiers used by the completeness argument.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::merge::MergeMonoid;

/// The rule that first produced a member. Operands are member indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum Provenance {
    Seed { seed: usize },
    Unit,
    Product { left: usize, right: usize },
    Merge { of: usize },
    Omega { of: usize },
}

impl Provenance {
    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Provenance::Seed { .. } | Provenance::Unit => vec![],
            Provenance::Product { left, right } => vec![left, right],
            Provenance::Merge { of } | Provenance::Omega { of } => vec![of],
        }
    }
}

#[derive(Clone, Debug)]
pub struct SaturationResult<E> {
    seeds: Vec<E>,
    members: Vec<E>,
    provenance: Vec<Provenance>,
    index: HashMap<E, usize>,
}

impl<E: Clone + Eq + std::hash::Hash> SaturationResult<E> {
    fn new(seeds: &[E]) -> Self {
        SaturationResult {
            seeds: seeds.to_vec(),
            members: Vec::new(),
            provenance: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn add(&mut self, x: E, rule: Provenance) {
        if !self.index.contains_key(&x) {
            self.index.insert(x.clone(), self.members.len());
            self.members.push(x);
            self.provenance.push(rule);
        }
    }

    pub fn seeds(&self) -> &[E] {
        &self.seeds
    }

    /// Members in discovery order.
    pub fn members(&self) -> &[E] {
        &self.members
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, x: &E) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &E) -> bool {
        self.index.contains_key(x)
    }

    /// Direct access for tampering with stored certificates in tests.
    #[doc(hidden)]
    pub fn provenance_mut(&mut self) -> &mut [Provenance] {
        &mut self.provenance
    }

    /// Drops every member from index `len` on.
    #[doc(hidden)]
    pub fn truncate(&mut self, len: usize) {
        for x in self.members.drain(len.min(self.members.len())..) {
            self.index.remove(&x);
        }
        self.provenance.truncate(len);
    }

    pub fn member_set(&self) -> BTreeSet<E>
    where
        E: Ord,
    {
        self.members.iter().cloned().collect()
    }
}

/// Recomputes what a provenance rule produces from the given members and seeds.
/// Returns `None` if an operand is out of range or not strictly earlier than `at`.
pub fn replay_rule<V: MergeMonoid>(
    view: &V,
    seeds: &[V::Elem],
    members: &[V::Elem],
    at: usize,
    rule: &Provenance,
) -> Option<V::Elem> {
    let operand = |i: usize| if i < at { members.get(i) } else { None };
    Some(match *rule {
        Provenance::Seed { seed } => seeds.get(seed)?.clone(),
        Provenance::Unit => view.unit(),
        Provenance::Product { left, right } => view.mul(operand(left)?, operand(right)?),
        Provenance::Merge { of } => view.merge(operand(of)?),
        Provenance::Omega { of } => view.omega(operand(of)?),
    })
}

impl<E: Clone + Eq + std::hash::Hash> SaturationResult<E> {
    /// Checks that every member is reproduced by its provenance rule.
    /// Returns the first failing member index.
    pub fn verify_provenance<V: MergeMonoid<Elem = E>>(&self, view: &V) -> Result<(), usize> {
        for (i, rule) in self.provenance.iter().enumerate() {
            match replay_rule(view, &self.seeds, &self.members, i, rule) {
                Some(x) if x == self.members[i] => {}
                _ => return Err(i),
            }
        }
        Ok(())
    }
}

/// Worklist fixpoint. Members are discovered in FIFO order; when member `i`
/// is processed the rules fire in the order product (with every earlier
/// member `j ≤ i`, left then right), merge, ω-power.
pub fn saturate<V: MergeMonoid>(view: &V, seeds: &[V::Elem]) -> SaturationResult<V::Elem> {
    let mut sat = SaturationResult::new(seeds);
    for (i, s) in seeds.iter().enumerate() {
        sat.add(s.clone(), Provenance::Seed { seed: i });
    }
    sat.add(view.unit(), Provenance::Unit);
    let mut next = 0;
    while next < sat.members.len() {
        let i = next;
        for j in 0..=i {
            let left = view.mul(&sat.members[j], &sat.members[i]);
            sat.add(left, Provenance::Product { left: j, right: i });
            if j != i {
                let right = view.mul(&sat.members[i], &sat.members[j]);
                sat.add(right, Provenance::Product { left: i, right: j });
            }
        }
        let merged = view.merge(&sat.members[i]);
        sat.add(merged, Provenance::Merge { of: i });
        let omega = view.omega(&sat.members[i]);
        sat.add(omega, Provenance::Omega { of: i });
        next += 1;
    }
    sat
}

/// Closure of `a` under product and, optionally, merge and ω-power.
fn close<V: MergeMonoid>(view: &V, a: &[V::Elem], merge: bool, omega: bool) -> BTreeSet<V::Elem> {
    let mut members: Vec<V::Elem> = Vec::new();
    let mut seen: HashSet<V::Elem> = HashSet::new();
    let mut push = |x: V::Elem, members: &mut Vec<V::Elem>| {
        if seen.insert(x.clone()) {
            members.push(x);
        }
    };
    for x in a {
        push(x.clone(), &mut members);
    }
    let mut next = 0;
    while next < members.len() {
        let i = next;
        for j in 0..=i {
            let l = view.mul(&members[j], &members[i]);
            push(l, &mut members);
            let r = view.mul(&members[i], &members[j]);
            push(r, &mut members);
        }
        if merge {
            let m = view.merge(&members[i]);
            push(m, &mut members);
        }
        if omega {
            let w = view.omega(&members[i]);
            push(w, &mut members);
        }
        next += 1;
    }
    members.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosVariant {
    /// `Clos⁺A`: closure under product.
    Plus,
    /// `Clos_g⁺A`: closure under product and merge.
    GPlus,
    /// `Clos_g*A = Clos_g⁺A ∪ {1}`.
    GStar,
    /// `Clos_ord⁺A`: closure under product, merge and ω-power.
    GOrdPlus,
    /// `Clos_ord A = Clos_ord⁺A ∪ {1}`.
    GOrd,
    /// `Clos_ω A = {a·b^ω | a, b ∈ Clos_g⁺A}`.
    GOmega,
    /// `{a·b^ω | a, b ∈ Clos⁺A}`, the variant built from the plain product closure.
    GOmegaFromPlus,
}

pub fn clos<V: MergeMonoid>(view: &V, a: &[V::Elem], which: ClosVariant) -> BTreeSet<V::Elem> {
    let with_unit = |mut s: BTreeSet<V::Elem>| {
        s.insert(view.unit());
        s
    };
    match which {
        ClosVariant::Plus => close(view, a, false, false),
        ClosVariant::GPlus => close(view, a, true, false),
        ClosVariant::GStar => with_unit(close(view, a, true, false)),
        ClosVariant::GOrdPlus => close(view, a, true, true),
        ClosVariant::GOrd => with_unit(close(view, a, true, true)),
        ClosVariant::GOmega => omega_products(view, &close(view, a, true, false)),
        ClosVariant::GOmegaFromPlus => omega_products(view, &close(view, a, false, false)),
    }
}

fn omega_products<V: MergeMonoid>(view: &V, base: &BTreeSet<V::Elem>) -> BTreeSet<V::Elem> {
    let omegas: BTreeSet<V::Elem> = base.iter().map(|b| view.omega(b)).collect();
    family_product(view, base, &omegas)
}

/// `{x·y | x ∈ xs, y ∈ ys}`.
pub fn family_product<'a, V: MergeMonoid>(
    view: &V,
    xs: impl IntoIterator<Item = &'a V::Elem>,
    ys: &BTreeSet<V::Elem>,
) -> BTreeSet<V::Elem>
where
    V::Elem: 'a,
{
    let mut out = BTreeSet::new();
    for x in xs {
        for y in ys {
            out.insert(view.mul(x, y));
        }
    }
    out
}

fn left_translate<V: MergeMonoid>(
    view: &V,
    a: &V::Elem,
    c: &BTreeSet<V::Elem>,
) -> BTreeSet<V::Elem> {
    c.iter().map(|y| view.mul(a, y)).collect()
}

fn right_translate<V: MergeMonoid>(
    view: &V,
    c: &BTreeSet<V::Elem>,
    a: &V::Elem,
) -> BTreeSet<V::Elem> {
    c.iter().map(|y| view.mul(y, a)).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SaturationError {
    #[error("the generating set is empty")]
    EmptyGenerators,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteCase<E> {
    /// `a·Clos_g⁺A ⊊ Clos_g⁺A`
    LeftDrop(E),
    /// `Clos_g⁺A·a ⊊ Clos_g⁺A`
    RightDrop(E),
    /// `Clos_g⁺A` has a maximum.
    Maximum(E),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalCase<E> {
    /// `a·Clos_ord⁺A ⊊ Clos_ord⁺A`
    LeftDrop(E),
    /// `Clos_ord⁺(Clos_ω A) ⊊ Clos_ord⁺A`
    OmegaDrop,
    /// `x·y = y` and `x^ω = y^ω` for all `x, y ∈ Clos_ord⁺A`.
    Degenerate,
}

fn canonical_generators<E: Clone + Ord>(a: &[E]) -> Result<Vec<E>, SaturationError> {
    let set: BTreeSet<E> = a.iter().cloned().collect();
    if set.is_empty() {
        return Err(SaturationError::EmptyGenerators);
    }
    Ok(set.into_iter().collect())
}

/// Classifies `A` by the finite-word trichotomy; the first applicable case
/// wins, in the order left drop, right drop, maximum.
pub fn trichotomy_finite<V: MergeMonoid>(
    view: &V,
    a: &[V::Elem],
) -> Result<FiniteCase<V::Elem>, SaturationError> {
    let gens = canonical_generators(a)?;
    let closure = clos(view, &gens, ClosVariant::GPlus);
    for g in &gens {
        if left_translate(view, g, &closure) != closure {
            return Ok(FiniteCase::LeftDrop(g.clone()));
        }
    }
    for g in &gens {
        if right_translate(view, &closure, g) != closure {
            return Ok(FiniteCase::RightDrop(g.clone()));
        }
    }
    closure
        .iter()
        .find(|m| closure.iter().all(|c| view.leq(c, m)))
        .cloned()
        .map(FiniteCase::Maximum)
        .ok_or_else(|| {
            SaturationError::Inconsistent(format!(
                "no trichotomy case applies to a closure of {} elements",
                closure.len()
            ))
        })
}

/// Re-checks the defining condition of a finite trichotomy case.
pub fn verify_finite_case<V: MergeMonoid>(
    view: &V,
    a: &[V::Elem],
    case: &FiniteCase<V::Elem>,
) -> bool {
    let closure = clos(view, a, ClosVariant::GPlus);
    let strict_sub = |s: &BTreeSet<V::Elem>| s.is_subset(&closure) && s != &closure;
    match case {
        FiniteCase::LeftDrop(g) => a.contains(g) && strict_sub(&left_translate(view, g, &closure)),
        FiniteCase::RightDrop(g) => {
            a.contains(g) && strict_sub(&right_translate(view, &closure, g))
        }
        FiniteCase::Maximum(m) => closure.contains(m) && closure.iter().all(|c| view.leq(c, m)),
    }
}

/// Classifies `A` by the ordinal-word trichotomy; the first applicable case
/// wins, in the order left drop, ω drop, degenerate.
pub fn trichotomy_ordinal<V: MergeMonoid>(
    view: &V,
    a: &[V::Elem],
) -> Result<OrdinalCase<V::Elem>, SaturationError> {
    let gens = canonical_generators(a)?;
    let closure = clos(view, &gens, ClosVariant::GOrdPlus);
    for g in &gens {
        if left_translate(view, g, &closure) != closure {
            return Ok(OrdinalCase::LeftDrop(g.clone()));
        }
    }
    if omega_drops(view, &gens, &closure) {
        return Ok(OrdinalCase::OmegaDrop);
    }
    if degenerate(view, &closure) {
        return Ok(OrdinalCase::Degenerate);
    }
    Err(SaturationError::Inconsistent(format!(
        "no ordinal trichotomy case applies to a closure of {} elements",
        closure.len()
    )))
}

fn omega_drops<V: MergeMonoid>(view: &V, gens: &[V::Elem], closure: &BTreeSet<V::Elem>) -> bool {
    let omega_part: Vec<V::Elem> = clos(view, gens, ClosVariant::GOmega).into_iter().collect();
    let inner = clos(view, &omega_part, ClosVariant::GOrdPlus);
    inner.is_subset(closure) && &inner != closure
}

fn degenerate<V: MergeMonoid>(view: &V, closure: &BTreeSet<V::Elem>) -> bool {
    closure.iter().all(|x| {
        closure
            .iter()
            .all(|y| view.mul(x, y) == *y && view.omega(x) == view.omega(y))
    })
}

/// Re-checks the defining condition of an ordinal trichotomy case.
pub fn verify_ordinal_case<V: MergeMonoid>(
    view: &V,
    a: &[V::Elem],
    case: &OrdinalCase<V::Elem>,
) -> bool {
    let closure = clos(view, a, ClosVariant::GOrdPlus);
    match case {
        OrdinalCase::LeftDrop(g) => {
            let t = left_translate(view, g, &closure);
            a.contains(g) && t.is_subset(&closure) && t != closure
        }
        OrdinalCase::OmegaDrop => omega_drops(view, a, &closure),
        OrdinalCase::Degenerate => degenerate(view, &closure),
    }
}
