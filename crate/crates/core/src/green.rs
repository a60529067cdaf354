//! Green's relations of a finite ordinal monoid.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::algebra::{ElementId, OrdinalMonoidPresentation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JClassInfo {
    pub members: Vec<ElementId>,
    /// Contains an idempotent.
    pub regular: bool,
    /// Some `x` in the class has `x^ω` in the class.
    pub omega_stable: bool,
    /// Every H-class inside is a singleton.
    pub h_trivial: bool,
}

/// Class identifiers are numbered in order of their least member.
#[derive(Clone, Debug)]
pub struct GreenSummary {
    pub j_class: Vec<usize>,
    pub l_class: Vec<usize>,
    pub r_class: Vec<usize>,
    pub h_class: Vec<usize>,
    pub j_classes: Vec<JClassInfo>,
    right_ideals: Vec<FixedBitSet>,
    left_ideals: Vec<FixedBitSet>,
    two_sided_ideals: Vec<FixedBitSet>,
}

fn classify<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

impl GreenSummary {
    pub fn compute(p: &OrdinalMonoidPresentation) -> Self {
        let n = p.len();
        let mut right_ideals = Vec::with_capacity(n);
        let mut left_ideals = Vec::with_capacity(n);
        let mut two_sided_ideals = Vec::with_capacity(n);
        for x in p.elements() {
            let mut r = FixedBitSet::with_capacity(n);
            let mut l = FixedBitSet::with_capacity(n);
            for y in p.elements() {
                r.insert(p.mul(x, y).0);
                l.insert(p.mul(y, x).0);
            }
            let mut j = FixedBitSet::with_capacity(n);
            for y in l.ones() {
                for z in p.elements() {
                    j.insert(p.mul(ElementId(y), z).0);
                }
            }
            right_ideals.push(r);
            left_ideals.push(l);
            two_sided_ideals.push(j);
        }
        let r_class = classify(right_ideals.iter().cloned());
        let l_class = classify(left_ideals.iter().cloned());
        let j_class = classify(two_sided_ideals.iter().cloned());
        let h_class = classify((0..n).map(|i| (l_class[i], r_class[i])));

        let class_count = j_class.iter().max().map_or(0, |m| m + 1);
        let mut j_classes: Vec<JClassInfo> = (0..class_count)
            .map(|_| JClassInfo {
                members: Vec::new(),
                regular: false,
                omega_stable: false,
                h_trivial: true,
            })
            .collect();
        for x in p.elements() {
            j_classes[j_class[x.0]].members.push(x);
        }
        for info in &mut j_classes {
            let jc = j_class[info.members[0].0];
            info.regular = info.members.iter().any(|&x| p.is_idempotent(x));
            info.omega_stable = info.members.iter().any(|&x| j_class[p.omega(x).0] == jc);
            let mut h_sizes: HashMap<usize, usize> = HashMap::new();
            for &x in &info.members {
                *h_sizes.entry(h_class[x.0]).or_default() += 1;
            }
            info.h_trivial = h_sizes.values().all(|&s| s == 1);
        }

        GreenSummary {
            j_class,
            l_class,
            r_class,
            h_class,
            j_classes,
            right_ideals,
            left_ideals,
            two_sided_ideals,
        }
    }

    /// `x ≤_R y`, i.e. `x ∈ yM`.
    pub fn r_leq(&self, x: ElementId, y: ElementId) -> bool {
        self.right_ideals[y.0].contains(x.0)
    }

    /// `x ≤_L y`, i.e. `x ∈ My`.
    pub fn l_leq(&self, x: ElementId, y: ElementId) -> bool {
        self.left_ideals[y.0].contains(x.0)
    }

    /// `x ≤_J y`, i.e. `x ∈ MyM`.
    pub fn j_leq(&self, x: ElementId, y: ElementId) -> bool {
        self.two_sided_ideals[y.0].contains(x.0)
    }

    pub fn r_equivalent(&self, x: ElementId, y: ElementId) -> bool {
        self.r_class[x.0] == self.r_class[y.0]
    }

    pub fn l_equivalent(&self, x: ElementId, y: ElementId) -> bool {
        self.l_class[x.0] == self.l_class[y.0]
    }

    pub fn j_equivalent(&self, x: ElementId, y: ElementId) -> bool {
        self.j_class[x.0] == self.j_class[y.0]
    }

    pub fn h_equivalent(&self, x: ElementId, y: ElementId) -> bool {
        self.h_class[x.0] == self.h_class[y.0]
    }

    pub fn j_class_of(&self, x: ElementId) -> &JClassInfo {
        &self.j_classes[self.j_class[x.0]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::fig2;

    #[test]
    fn fig2_egg_box() {
        let p = fig2();
        let g = GreenSummary::compute(&p);
        let names = |info: &JClassInfo| {
            info.members
                .iter()
                .map(|&x| p.name(x).to_string())
                .collect::<Vec<_>>()
        };
        let classes: Vec<Vec<String>> = g.j_classes.iter().map(names).collect();
        assert_eq!(
            classes,
            vec![
                vec!["1".to_string()],
                vec!["a".into(), "aa".into()],
                vec!["a^w".into(), "a^w.a".into(), "a^w.a.a".into()],
            ]
        );
        let group = &g.j_classes[1];
        assert!(group.regular);
        assert!(!group.omega_stable);
        assert!(!group.h_trivial);
        let bottom = &g.j_classes[2];
        assert!(bottom.regular && bottom.omega_stable && bottom.h_trivial);
    }

    #[test]
    fn trivial_monoid_has_one_class() {
        let p = OrdinalMonoidPresentation::trivial();
        let g = GreenSummary::compute(&p);
        assert_eq!(g.j_classes.len(), 1);
        let c = &g.j_classes[0];
        assert!(c.regular && c.omega_stable && c.h_trivial);
    }

    #[test]
    fn preorders_are_consistent() {
        let p = fig2();
        let g = GreenSummary::compute(&p);
        for x in p.elements() {
            for y in p.elements() {
                if g.l_leq(x, y) || g.r_leq(x, y) {
                    assert!(g.j_leq(x, y));
                }
                if g.h_equivalent(x, y) {
                    assert!(g.l_equivalent(x, y) && g.r_equivalent(x, y));
                }
            }
        }
    }
}
