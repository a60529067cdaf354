//! Witness families for members of `Sat`.
//!
//! For a member `X` and a depth `k` the construction yields one word `u_x`
//! per `x ∈ X` with `π(h(u_x)) = x`, and derivations showing that all of
//! them are `≡ᵏ`-equivalent. It follows the provenance of `X`:
//!
//! * a letter seed `{h(a)}` gives the word `a`, the unit gives `ε`;
//! * a product `X·Y` concatenates words of the two families;
//! * a merge `X^merge` uses products of at least `2^k + 1` words of the
//!   family of `X`, related by pumping;
//! * an ω-power `X^ω` uses lasso words `s·t^ω` whose prefixes all have the
//!   same number of factors, the periods being rotated to match.
//!
//! Each family carries a pivot expression and one derivation from the pivot
//! to every word; the derivation between two words goes through the pivot.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::derivation::EquivDerivation;
use super::expr::{eval_expr, WordExpr};
use crate::algebra::{ElementId, LetterMap, OrdinalMonoidPresentation};
use crate::decision::{separate, DecisionError, LanguageRecognizer, LetterSaturation, Verdict};
use crate::powerset::{PowerMonoid, SubsetElement};
use crate::saturation::Provenance;

/// Deepest quantifier depth accepted; merge words grow like `2^k`.
pub const MAX_DEPTH: u32 = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("member {0} is not in the saturation")]
    UnknownMember(usize),
    #[error("member {0} has no usable provenance")]
    MissingProvenance(usize),
    #[error("depth {0} exceeds the supported maximum {MAX_DEPTH}")]
    DepthTooLarge(u32),
    #[error("the languages are separable; there is no witness pair")]
    Separable,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

#[derive(Clone, Debug)]
pub struct WitnessFamily {
    pub member: usize,
    pub set: SubsetElement,
    pub k: u32,
    /// `(x, u_x)` in element order.
    pub words: Vec<(ElementId, WordExpr)>,
    pub pivot: WordExpr,
    /// `to_pivot[i]` derives `pivot ≡ᵏ words[i].1`.
    pub to_pivot: Vec<EquivDerivation>,
}

impl WitnessFamily {
    fn position(&self, x: ElementId) -> Option<usize> {
        self.words.iter().position(|(y, _)| *y == x)
    }

    pub fn word(&self, x: ElementId) -> Option<&WordExpr> {
        self.position(x).map(|i| &self.words[i].1)
    }

    fn to(&self, x: ElementId) -> &EquivDerivation {
        &self.to_pivot[self.position(x).expect("element of the family")]
    }

    /// A derivation of `u_x ≡ᵏ u_y`.
    pub fn derivation(&self, x: ElementId, y: ElementId) -> Option<EquivDerivation> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        if i == j {
            return Some(EquivDerivation::refl(self.words[i].1.clone(), self.k));
        }
        Some(EquivDerivation::trans(
            EquivDerivation::sym(self.to_pivot[i].clone()),
            self.to_pivot[j].clone(),
        ))
    }

    fn is_unit_family(&self) -> bool {
        self.pivot == WordExpr::Empty && self.words.len() == 1 && self.words[0].1 == WordExpr::Empty
    }
}

struct Builder<'a> {
    p: &'a OrdinalMonoidPresentation,
    letters: &'a LetterMap,
    sat: &'a LetterSaturation,
    power: PowerMonoid<'a>,
    k: u32,
    families: BTreeMap<usize, WitnessFamily>,
}

/// Right-nested congruence `P·(P·(…)) ≡ᵏ u_1·(u_2·(…))` from per-factor derivations.
fn cong_chain(ds: &[&EquivDerivation], k: u32) -> EquivDerivation {
    match ds.split_last() {
        None => EquivDerivation::refl(WordExpr::Empty, k),
        Some((last, rest)) => rest.iter().rev().fold((*last).clone(), |acc, d| {
            EquivDerivation::concat_cong((*d).clone(), acc)
        }),
    }
}

impl<'a> Builder<'a> {
    fn family(&self, i: usize) -> &WitnessFamily {
        &self.families[&i]
    }

    fn seed(&self, member: usize, seed: usize) -> Result<WitnessFamily, WitnessError> {
        let letter = self
            .sat
            .seed_letters
            .get(seed)
            .ok_or(WitnessError::MissingProvenance(member))?;
        let x = self
            .letters
            .get(letter)
            .ok_or(WitnessError::MissingProvenance(member))?;
        let word = WordExpr::letter(letter.clone());
        Ok(WitnessFamily {
            member,
            set: self.power.singleton(x),
            k: self.k,
            words: vec![(x, word.clone())],
            pivot: word.clone(),
            to_pivot: vec![EquivDerivation::refl(word, self.k)],
        })
    }

    fn unit(&self, member: usize) -> WitnessFamily {
        WitnessFamily {
            member,
            set: self.power.singleton(self.p.unit()),
            k: self.k,
            words: vec![(self.p.unit(), WordExpr::Empty)],
            pivot: WordExpr::Empty,
            to_pivot: vec![EquivDerivation::refl(WordExpr::Empty, self.k)],
        }
    }

    fn product(&self, member: usize, left: usize, right: usize) -> WitnessFamily {
        let (fx, fy) = (self.family(left), self.family(right));
        let set = &self.sat.members()[member];
        let mut words = Vec::new();
        let mut to_pivot = Vec::new();
        let pivot = if fx.is_unit_family() {
            fy.pivot.clone()
        } else if fy.is_unit_family() {
            fx.pivot.clone()
        } else {
            WordExpr::concat(fx.pivot.clone(), fy.pivot.clone())
        };
        for z in set.iter() {
            let (x, y) = fx
                .set
                .iter()
                .flat_map(|x| fy.set.iter().map(move |y| (x, y)))
                .find(|&(x, y)| self.p.mul(x, y) == z)
                .expect("every element of a product has a factorisation");
            let (ux, uy) = (fx.word(x).unwrap().clone(), fy.word(y).unwrap().clone());
            let (word, d) = if fx.is_unit_family() {
                (uy, fy.to(y).clone())
            } else if fy.is_unit_family() {
                (ux, fx.to(x).clone())
            } else {
                (
                    WordExpr::concat(ux, uy),
                    EquivDerivation::concat_cong(fx.to(x).clone(), fy.to(y).clone()),
                )
            };
            words.push((z, word));
            to_pivot.push(d);
        }
        WitnessFamily {
            member,
            set: set.clone(),
            k: self.k,
            words,
            pivot,
            to_pivot,
        }
    }

    /// Least `m ≥ min_exp` with `y ∈ X^m` for each `y` of the merge, with
    /// a factorisation into elements of `X`.
    fn merge_factorisations(
        &self,
        x: &SubsetElement,
        min_exp: u64,
    ) -> BTreeMap<ElementId, Vec<ElementId>> {
        let cycle = self.power.power_cycle_of(x);
        let limit = min_exp.max(cycle.index as u64) + cycle.period as u64;
        let factors: Vec<ElementId> = x.elements();
        let mut layers: Vec<BTreeMap<ElementId, (Option<ElementId>, ElementId)>> = Vec::new();
        layers.push(factors.iter().map(|&f| (f, (None, f))).collect());
        let mut found: BTreeMap<ElementId, (usize, ElementId)> = BTreeMap::new();
        for m in 1..=limit as usize {
            if m > 1 {
                let mut next = BTreeMap::new();
                for &e in layers[m - 2].keys() {
                    for &f in &factors {
                        next.entry(self.p.mul(e, f)).or_insert((Some(e), f));
                    }
                }
                layers.push(next);
            }
            if m as u64 >= min_exp {
                for &e in layers[m - 1].keys() {
                    found.entry(e).or_insert((m, e));
                }
            }
        }
        found
            .into_iter()
            .map(|(y, (m, _))| {
                let mut seq = Vec::with_capacity(m);
                let mut cur = y;
                for layer in (0..m).rev() {
                    let (prev, f) = layers[layer][&cur];
                    seq.push(f);
                    if let Some(p) = prev {
                        cur = p;
                    }
                }
                seq.reverse();
                (y, seq)
            })
            .collect()
    }

    fn merge(&self, member: usize, of: usize) -> Result<WitnessFamily, WitnessError> {
        let fx = self.family(of);
        let set = &self.sat.members()[member];
        let k = self.k;
        let min_exp = (1u64 << k) + 1;
        let factorisations = self.merge_factorisations(&fx.set, min_exp);
        let pivot = WordExpr::pow(fx.pivot.clone(), min_exp);
        let mut words = Vec::new();
        let mut to_pivot = Vec::new();
        for y in set.iter() {
            let seq = factorisations.get(&y).ok_or_else(|| {
                WitnessError::Inconsistent(format!(
                    "no factorisation of {} in the merge",
                    self.p.name(y)
                ))
            })?;
            let m = seq.len() as u64;
            let uniform = seq.iter().all(|&f| f == seq[0]);
            let factor_words: Vec<WordExpr> =
                seq.iter().map(|&f| fx.word(f).unwrap().clone()).collect();
            let word = if uniform {
                WordExpr::pow(factor_words[0].clone(), m)
            } else {
                WordExpr::concat_all(factor_words.iter().cloned())
            };
            let mut d = EquivDerivation::refl(pivot.clone(), k);
            for n in min_exp..m {
                d = EquivDerivation::trans(d, EquivDerivation::pump(fx.pivot.clone(), n, k));
            }
            let ds: Vec<&EquivDerivation> = seq.iter().map(|&f| fx.to(f)).collect();
            let cong = cong_chain(&ds, k);
            if !(uniform && cong.rule == super::derivation::Rule::Refl) {
                let expanded_pivot = WordExpr::concat_all((0..m).map(|_| fx.pivot.clone()));
                d = EquivDerivation::trans(
                    d,
                    EquivDerivation::struct_eq(
                        WordExpr::pow(fx.pivot.clone(), m),
                        expanded_pivot,
                        k,
                    ),
                );
                d = EquivDerivation::trans(d, cong);
                if uniform {
                    let expanded = WordExpr::concat_all(factor_words.iter().cloned());
                    d = EquivDerivation::trans(
                        d,
                        EquivDerivation::struct_eq(expanded, word.clone(), k),
                    );
                }
            }
            words.push((y, word));
            to_pivot.push(d);
        }
        Ok(WitnessFamily {
            member,
            set: set.clone(),
            k,
            words,
            pivot,
            to_pivot,
        })
    }

    fn omega(&self, member: usize, of: usize) -> Result<WitnessFamily, WitnessError> {
        let fx = self.family(of);
        let set = &self.sat.members()[member];
        let k = self.k;
        let factors = fx.set.elements();

        // Shortest factorisation of every element of X⁺, breadth first.
        let mut reps: BTreeMap<ElementId, Vec<ElementId>> = BTreeMap::new();
        let mut frontier: Vec<ElementId> = Vec::new();
        for &f in &factors {
            if let std::collections::btree_map::Entry::Vacant(e) = reps.entry(f) {
                e.insert(vec![f]);
                frontier.push(f);
            }
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &e in &frontier {
                for &f in &factors {
                    let g = self.p.mul(e, f);
                    if !reps.contains_key(&g) {
                        let mut r = reps[&e].clone();
                        r.push(f);
                        reps.insert(g, r);
                        next.push(g);
                    }
                }
            }
            next.sort();
            frontier = next;
        }

        // A lasso decomposition z = s·t^ω per element, empty prefix preferred.
        let mut lassos: Vec<(ElementId, Vec<ElementId>, Vec<ElementId>)> = Vec::new();
        for z in set.iter() {
            let plain = reps
                .iter()
                .filter(|(t, _)| self.p.omega(**t) == z)
                .min_by_key(|(t, r)| (r.len(), **t))
                .map(|(_, r)| (Vec::new(), r.clone()));
            let lasso = plain.or_else(|| {
                reps.iter()
                    .flat_map(|(s, rs)| reps.iter().map(move |(t, rt)| (s, rs, t, rt)))
                    .filter(|(s, _, t, _)| self.p.mul(**s, self.p.omega(**t)) == z)
                    .min_by_key(|(s, rs, t, rt)| (rs.len(), rt.len(), **s, **t))
                    .map(|(_, rs, _, rt)| (rs.clone(), rt.clone()))
            });
            let (prefix, period) = lasso.ok_or_else(|| {
                WitnessError::Inconsistent(format!("{} has no lasso decomposition", self.p.name(z)))
            })?;
            lassos.push((z, prefix, period));
        }

        // Common prefix length: rotate periods forward (x·(y·x)^ω = (x·y)^ω).
        let ell = lassos.iter().map(|(_, s, _)| s.len()).max().unwrap_or(0);
        for (_, prefix, period) in &mut lassos {
            while prefix.len() < ell {
                prefix.push(period[0]);
                period.rotate_left(1);
            }
        }

        let word_of = |f: &ElementId| fx.word(*f).unwrap().clone();
        let omega_pivot = WordExpr::omega(fx.pivot.clone());
        let pivot = if ell == 0 {
            omega_pivot
        } else {
            WordExpr::concat(
                WordExpr::concat_all((0..ell).map(|_| fx.pivot.clone())),
                omega_pivot,
            )
        };
        let mut words = Vec::new();
        let mut to_pivot = Vec::new();
        for (z, prefix, period) in lassos {
            let period_words: Vec<WordExpr> = period.iter().map(word_of).collect();
            let premises: Vec<EquivDerivation> = period.iter().map(|f| fx.to(*f).clone()).collect();
            let omega_d = if premises.len() == 1
                && premises[0].rule == super::derivation::Rule::Refl
            {
                EquivDerivation::refl(WordExpr::omega(period_words[0].clone()), k)
            } else {
                EquivDerivation::omega_seq_cong(vec![fx.pivot.clone()], period_words, premises, k)
            };
            let (word, d) = if ell == 0 {
                (omega_d.rhs.clone(), omega_d)
            } else {
                let ds: Vec<&EquivDerivation> = prefix.iter().map(|f| fx.to(*f)).collect();
                let prefix_d = cong_chain(&ds, k);
                let d = EquivDerivation::concat_cong(prefix_d, omega_d);
                (d.rhs.clone(), d)
            };
            words.push((z, word));
            to_pivot.push(d);
        }
        Ok(WitnessFamily {
            member,
            set: set.clone(),
            k,
            words,
            pivot,
            to_pivot,
        })
    }

    fn build(&mut self, member: usize) -> Result<(), WitnessError> {
        if self.families.contains_key(&member) {
            return Ok(());
        }
        let rule = *self
            .sat
            .provenance()
            .get(member)
            .ok_or(WitnessError::UnknownMember(member))?;
        for op in rule.operands() {
            if op >= member {
                return Err(WitnessError::MissingProvenance(member));
            }
            self.build(op)?;
        }
        let family = match rule {
            Provenance::Seed { seed } => self.seed(member, seed)?,
            Provenance::Unit => self.unit(member),
            Provenance::Product { left, right } => self.product(member, left, right),
            Provenance::Merge { of } => self.merge(member, of)?,
            Provenance::Omega { of } => self.omega(member, of)?,
        };
        self.verify(&family)?;
        self.families.insert(member, family);
        Ok(())
    }

    fn verify(&self, family: &WitnessFamily) -> Result<(), WitnessError> {
        let expected = &self.sat.members()[family.member];
        let listed: BTreeSet<ElementId> = family.words.iter().map(|(x, _)| *x).collect();
        if family.set != *expected || listed != expected.iter().collect() {
            return Err(WitnessError::Inconsistent(format!(
                "family of member {} does not cover {}",
                family.member,
                expected.display(self.p)
            )));
        }
        for (i, (x, word)) in family.words.iter().enumerate() {
            let value = eval_expr(word, self.p, self.letters)
                .map_err(|e| WitnessError::Inconsistent(e.to_string()))?;
            if value != *x {
                return Err(WitnessError::Inconsistent(format!(
                    "`{word}` evaluates to {} instead of {}",
                    self.p.name(value),
                    self.p.name(*x)
                )));
            }
            let d = &family.to_pivot[i];
            if d.lhs != family.pivot || d.rhs != *word || d.k != family.k {
                return Err(WitnessError::Inconsistent(format!(
                    "derivation for `{word}` has the wrong conclusion"
                )));
            }
        }
        Ok(())
    }
}

/// The witness family of member `member` of `sat` at depth `k`.
pub fn witnesses(
    p: &OrdinalMonoidPresentation,
    letters: &LetterMap,
    sat: &LetterSaturation,
    member: usize,
    k: u32,
) -> Result<WitnessFamily, WitnessError> {
    let mut all = all_witnesses_for(p, letters, sat, &[member], k)?;
    Ok(all.remove(&member).expect("built"))
}

/// Witness families for every member of `sat`, in member order.
pub fn all_witnesses(
    p: &OrdinalMonoidPresentation,
    letters: &LetterMap,
    sat: &LetterSaturation,
    k: u32,
) -> Result<Vec<WitnessFamily>, WitnessError> {
    let members: Vec<usize> = (0..sat.members().len()).collect();
    Ok(all_witnesses_for(p, letters, sat, &members, k)?
        .into_values()
        .collect())
}

fn all_witnesses_for(
    p: &OrdinalMonoidPresentation,
    letters: &LetterMap,
    sat: &LetterSaturation,
    members: &[usize],
    k: u32,
) -> Result<BTreeMap<usize, WitnessFamily>, WitnessError> {
    if k > MAX_DEPTH {
        return Err(WitnessError::DepthTooLarge(k));
    }
    let mut b = Builder {
        p,
        letters,
        sat,
        power: PowerMonoid::new(p),
        k,
        families: BTreeMap::new(),
    };
    for &m in members {
        b.build(m)?;
    }
    Ok(b.families)
}

/// Words `u ∈ K`, `v ∈ L` with a derivation of `u ≡ᵏ v`.
#[derive(Clone, Debug)]
pub struct WitnessPair {
    pub member: usize,
    pub set: SubsetElement,
    pub left_value: ElementId,
    pub right_value: ElementId,
    pub left: WordExpr,
    pub right: WordExpr,
    pub derivation: EquivDerivation,
}

/// For non-separable `K` and `L`, a pair of words in `K × L` that no
/// sentence of quantifier depth `k` tells apart.
pub fn witness_pair(
    k_lang: &LanguageRecognizer,
    l_lang: &LanguageRecognizer,
    k: u32,
) -> Result<WitnessPair, WitnessError> {
    let outcome = separate(k_lang, l_lang)?;
    if outcome.verdict == Verdict::Yes {
        return Err(WitnessError::Separable);
    }
    let blocking = outcome
        .certificate
        .blocking
        .expect("no verdict has a blocking set");
    let family = witnesses(
        &k_lang.presentation,
        &k_lang.letters,
        &outcome.certificate.saturation,
        blocking.member,
        k,
    )?;
    let (x, y) = (blocking.marked[0], blocking.marked[1]);
    Ok(WitnessPair {
        member: blocking.member,
        set: blocking.set,
        left_value: x,
        right_value: y,
        left: family.word(x).unwrap().clone(),
        right: family.word(y).unwrap().clone(),
        derivation: family.derivation(x, y).unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::fig2;
    use crate::decision::saturate_letters;
    use crate::witness::derivation::{check_derivation, check_derivation_detailed, Rule};
    use crate::witness::ef::ef_equiv_finite;
    use crate::witness::expr::parse_expr;

    fn fig2_context() -> (OrdinalMonoidPresentation, LetterMap) {
        (fig2(), LetterMap::from_pairs([("a", ElementId(1))]))
    }

    fn member_of(sat: &LetterSaturation, p: &OrdinalMonoidPresentation, names: &[&str]) -> usize {
        let target = PowerMonoid::new(p).named(names);
        sat.sat.index_of(&target).unwrap()
    }

    #[test]
    fn singleton_seed_family() {
        let (p, letters) = fig2_context();
        let sat = saturate_letters(&p, &letters);
        let fam = witnesses(&p, &letters, &sat, member_of(&sat, &p, &["a"]), 3).unwrap();
        assert_eq!(fam.words, vec![(ElementId(1), WordExpr::letter("a"))]);
        assert_eq!(fam.to_pivot[0].rule, Rule::Refl);
    }

    #[test]
    fn merge_family_pumps() {
        let (p, letters) = fig2_context();
        let sat = saturate_letters(&p, &letters);
        let member = member_of(&sat, &p, &["a", "aa"]);
        for k in 0..=4 {
            let fam = witnesses(&p, &letters, &sat, member, k).unwrap();
            let ua = fam.word(ElementId(1)).unwrap();
            let uaa = fam.word(ElementId(2)).unwrap();
            let exps = match (ua, uaa) {
                (WordExpr::Pow(_, m), WordExpr::Pow(_, n)) => (*m, *n),
                other => panic!("unexpected words {other:?}"),
            };
            assert_eq!(exps.0 % 2, 1);
            assert_eq!(exps.1 % 2, 0);
            assert!(exps.0 >= 1 << k && exps.1 >= 1 << k);
            let d = fam.derivation(ElementId(1), ElementId(2)).unwrap();
            assert!(check_derivation(&d), "{:?}", check_derivation_detailed(&d));
            if k <= 3 {
                assert!(ef_equiv_finite(ua, uaa, k).unwrap());
            }
        }
    }

    #[test]
    fn worked_example_pair() {
        let (p, letters) = fig2_context();
        let j = LanguageRecognizer::new(p.clone(), letters.clone(), [ElementId(3), ElementId(5)])
            .unwrap();
        let kk = LanguageRecognizer::new(p.clone(), letters.clone(), [ElementId(4)]).unwrap();
        for k in 0..=4u32 {
            let pair = witness_pair(&j, &kk, k).unwrap();
            assert_eq!(eval_expr(&pair.left, &p, &letters).unwrap(), ElementId(5));
            assert_eq!(eval_expr(&pair.right, &p, &letters).unwrap(), ElementId(4));
            let mut exps = BTreeSet::new();
            for w in [&pair.left, &pair.right] {
                match w {
                    WordExpr::Concat(l, r) => {
                        assert_eq!(**l, parse_expr("a^w").unwrap());
                        match &**r {
                            WordExpr::Pow(a, n) if **a == WordExpr::letter("a") => exps.insert(*n),
                            other => panic!("unexpected suffix {other}"),
                        };
                    }
                    other => panic!("unexpected word {other}"),
                }
            }
            assert_eq!(exps, BTreeSet::from([(1 << k) + 1, (1 << k) + 2]));
            assert!(check_derivation(&pair.derivation));
            assert_eq!(pair.derivation.lhs, pair.left);
            assert_eq!(pair.derivation.rhs, pair.right);
        }
        let l = LanguageRecognizer::new(p, letters, [ElementId(0), ElementId(3)]).unwrap();
        assert_eq!(
            witness_pair(&kk, &l, 2).unwrap_err(),
            WitnessError::Separable
        );
    }

    #[test]
    fn every_fig2_member_has_sound_witnesses() {
        let (p, letters) = fig2_context();
        let sat = saturate_letters(&p, &letters);
        for k in 0..=3 {
            for fam in all_witnesses(&p, &letters, &sat, k).unwrap() {
                for (x, _) in &fam.words {
                    for (y, _) in &fam.words {
                        let d = fam.derivation(*x, *y).unwrap();
                        assert!(check_derivation(&d), "{:?}", check_derivation_detailed(&d));
                    }
                }
            }
        }
    }
}
