//! Derivations of `u ≡ᵏ v` (indistinguishability by first-order sentences of
//! quantifier depth `k`) from the compositional rules
//!
//! ```text
//! u ≡ᵏ u', v ≡ᵏ v'              ⟹  uv ≡ᵏ u'v'
//! u_n ≡ᵏ v_n for all n           ⟹  flatten(u_n) ≡ᵏ flatten(v_n)
//! n ≥ 2^k − 1                    ⟹  uⁿ ≡ᵏ uⁿ⁺¹
//! ```
//!
//! together with reflexivity, symmetry, transitivity and structural equality
//! of expressions denoting the same ordinal word.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::expr::WordExpr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivDerivation {
    pub lhs: WordExpr,
    pub rhs: WordExpr,
    pub k: u32,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Refl,
    /// `lhs` and `rhs` denote the same word.
    StructEq,
    ConcatCong(Box<EquivDerivation>, Box<EquivDerivation>),
    /// `lhs = (l_0 … l_{p−1})^ω`, `rhs = (r_0 … r_{q−1})^ω`; premise `i`
    /// proves `l_{i mod p} ≡ᵏ r_{i mod q}` for `i < lcm(p, q)`.
    OmegaSeqCong {
        lhs_blocks: Vec<WordExpr>,
        rhs_blocks: Vec<WordExpr>,
        premises: Vec<EquivDerivation>,
    },
    /// `lhs = e^n`, `rhs = e^(n+1)`, `n ≥ 2^k − 1`.
    Pump(u64),
    Trans(Box<EquivDerivation>, Box<EquivDerivation>),
    Sym(Box<EquivDerivation>),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Refl => "Refl",
            Rule::StructEq => "StructEq",
            Rule::ConcatCong(..) => "ConcatCong",
            Rule::OmegaSeqCong { .. } => "OmegaSeqCong",
            Rule::Pump(_) => "Pump",
            Rule::Trans(..) => "Trans",
            Rule::Sym(_) => "Sym",
        }
    }
}

impl EquivDerivation {
    pub fn refl(e: WordExpr, k: u32) -> Self {
        EquivDerivation {
            lhs: e.clone(),
            rhs: e,
            k,
            rule: Rule::Refl,
        }
    }

    pub fn struct_eq(lhs: WordExpr, rhs: WordExpr, k: u32) -> Self {
        if lhs == rhs {
            return Self::refl(lhs, k);
        }
        EquivDerivation {
            lhs,
            rhs,
            k,
            rule: Rule::StructEq,
        }
    }

    pub fn concat_cong(d1: EquivDerivation, d2: EquivDerivation) -> Self {
        let k = d1.k;
        let lhs = WordExpr::concat(d1.lhs.clone(), d2.lhs.clone());
        let rhs = WordExpr::concat(d1.rhs.clone(), d2.rhs.clone());
        if d1.rule == Rule::Refl && d2.rule == Rule::Refl {
            return Self::refl(lhs, k);
        }
        EquivDerivation {
            lhs,
            rhs,
            k,
            rule: Rule::ConcatCong(Box::new(d1), Box::new(d2)),
        }
    }

    pub fn omega_seq_cong(
        lhs_blocks: Vec<WordExpr>,
        rhs_blocks: Vec<WordExpr>,
        premises: Vec<EquivDerivation>,
        k: u32,
    ) -> Self {
        EquivDerivation {
            lhs: WordExpr::omega(WordExpr::concat_all(lhs_blocks.iter().cloned())),
            rhs: WordExpr::omega(WordExpr::concat_all(rhs_blocks.iter().cloned())),
            k,
            rule: Rule::OmegaSeqCong {
                lhs_blocks,
                rhs_blocks,
                premises,
            },
        }
    }

    pub fn pump(e: WordExpr, n: u64, k: u32) -> Self {
        EquivDerivation {
            lhs: WordExpr::pow(e.clone(), n),
            rhs: WordExpr::pow(e, n + 1),
            k,
            rule: Rule::Pump(n),
        }
    }

    /// Chains two derivations, dropping reflexive steps.
    pub fn trans(d1: EquivDerivation, d2: EquivDerivation) -> Self {
        if d1.rule == Rule::Refl {
            return d2;
        }
        if d2.rule == Rule::Refl {
            return d1;
        }
        EquivDerivation {
            lhs: d1.lhs.clone(),
            rhs: d2.rhs.clone(),
            k: d1.k,
            rule: Rule::Trans(Box::new(d1), Box::new(d2)),
        }
    }

    pub fn sym(d: EquivDerivation) -> Self {
        match d.rule {
            Rule::Refl => d,
            Rule::Sym(inner) => *inner,
            _ => EquivDerivation {
                lhs: d.rhs.clone(),
                rhs: d.lhs.clone(),
                k: d.k,
                rule: Rule::Sym(Box::new(d)),
            },
        }
    }

    /// Number of rule instances.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|d| d.size()).sum::<usize>()
    }

    pub fn premises(&self) -> Vec<&EquivDerivation> {
        match &self.rule {
            Rule::Refl | Rule::StructEq | Rule::Pump(_) => vec![],
            Rule::ConcatCong(a, b) | Rule::Trans(a, b) => vec![a, b],
            Rule::Sym(d) => vec![d],
            Rule::OmegaSeqCong { premises, .. } => premises.iter().collect(),
        }
    }
}

impl Serialize for EquivDerivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EquivDerivation", 7)?;
        st.serialize_field("rule", self.rule.name())?;
        st.serialize_field("lhs", &self.lhs)?;
        st.serialize_field("rhs", &self.rhs)?;
        st.serialize_field("k", &self.k)?;
        match &self.rule {
            Rule::Pump(n) => st.serialize_field("n", n)?,
            Rule::OmegaSeqCong {
                lhs_blocks,
                rhs_blocks,
                ..
            } => {
                st.serialize_field("lhs_blocks", lhs_blocks)?;
                st.serialize_field("rhs_blocks", rhs_blocks)?;
            }
            _ => {}
        }
        st.serialize_field("premises", &self.premises())?;
        st.end()
    }
}

/// Upper bound on the number of letters expanded when comparing expressions.
const NORMAL_FORM_LIMIT: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Atom {
    Letter(String),
    /// `r^ω` with `r` nonempty, primitive and in normal form.
    Omega(Vec<Atom>),
}

/// Flattens an expression into a canonical atom sequence: finite powers are
/// expanded, ω-powers keep their primitive root, and a suffix of the prefix
/// that matches the end of the period is absorbed by rotation
/// (`x·(y·x)^ω = (x·y)^ω`). Returns `None` past the size limit.
fn normal_form(e: &WordExpr) -> Option<Vec<Atom>> {
    fn push(out: &mut Vec<Atom>, atom: Atom) {
        if let Atom::Omega(mut root) = atom {
            while out.last().is_some() && out.last() == root.last() {
                out.pop();
                root.rotate_right(1);
            }
            out.push(Atom::Omega(root));
        } else {
            out.push(atom);
        }
    }
    fn go(e: &WordExpr, out: &mut Vec<Atom>) -> Option<()> {
        match e {
            WordExpr::Empty => {}
            WordExpr::Letter(a) => out.push(Atom::Letter(a.clone())),
            WordExpr::Concat(l, r) => {
                go(l, out)?;
                let mut right = Vec::new();
                go(r, &mut right)?;
                for a in right {
                    push(out, a);
                }
            }
            WordExpr::Pow(inner, n) => {
                let mut block = Vec::new();
                go(inner, &mut block)?;
                if block.len().saturating_mul(*n as usize) > NORMAL_FORM_LIMIT {
                    return None;
                }
                for _ in 0..*n {
                    for a in &block {
                        push(out, a.clone());
                    }
                }
            }
            WordExpr::OmegaPow(inner) => {
                let mut block = Vec::new();
                go(inner, &mut block)?;
                if !block.is_empty() {
                    push(out, Atom::Omega(primitive_root(block)));
                }
            }
        }
        (out.len() <= NORMAL_FORM_LIMIT).then_some(())
    }
    let mut out = Vec::new();
    go(e, &mut out)?;
    Some(out)
}

/// The shortest block `p` with `r = p^m`; `r^ω = p^ω`.
fn primitive_root(mut r: Vec<Atom>) -> Vec<Atom> {
    let n = r.len();
    for p in 1..=n {
        if n.is_multiple_of(p) && (p..n).all(|i| r[i] == r[i - p]) {
            r.truncate(p);
            return r;
        }
    }
    r
}

/// Whether two expressions denote the same ordinal word, as far as the
/// normal form can tell.
pub fn structurally_equal(a: &WordExpr, b: &WordExpr) -> bool {
    if a == b {
        return true;
    }
    match (normal_form(a), normal_form(b)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// Failure of a rule instance, with the path of premise indices from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationError {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub message: String,
}

impl std::fmt::Display for DerivationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "at /{} ({}): {}",
            path.join("/"),
            self.rule,
            self.message
        )
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pump_bound(k: u32) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

fn check_node(d: &EquivDerivation, path: &mut Vec<usize>) -> Result<(), DerivationError> {
    let fail = |path: &Vec<usize>, message: String| {
        Err(DerivationError {
            path: path.clone(),
            rule: d.rule.name(),
            message,
        })
    };
    for (i, p) in d.premises().iter().enumerate() {
        if p.k != d.k {
            return fail(
                path,
                format!("premise {i} is at depth {}, expected {}", p.k, d.k),
            );
        }
    }
    match &d.rule {
        Rule::Refl => {
            if d.lhs != d.rhs {
                return fail(path, format!("`{}` and `{}` differ", d.lhs, d.rhs));
            }
        }
        Rule::StructEq => {
            if !structurally_equal(&d.lhs, &d.rhs) {
                return fail(
                    path,
                    format!("`{}` and `{}` denote different words", d.lhs, d.rhs),
                );
            }
        }
        Rule::ConcatCong(a, b) => match (&d.lhs, &d.rhs) {
            (WordExpr::Concat(l1, l2), WordExpr::Concat(r1, r2)) => {
                if **l1 != a.lhs || **l2 != b.lhs || **r1 != a.rhs || **r2 != b.rhs {
                    return fail(
                        path,
                        "premises do not match the factors of the conclusion".into(),
                    );
                }
            }
            _ => return fail(path, "both sides must be concatenations".into()),
        },
        Rule::OmegaSeqCong {
            lhs_blocks,
            rhs_blocks,
            premises,
        } => {
            let (p, q) = (lhs_blocks.len(), rhs_blocks.len());
            if p == 0 || q == 0 {
                return fail(path, "block lists must be nonempty".into());
            }
            let period = p / gcd(p, q) * q;
            if premises.len() != period {
                return fail(
                    path,
                    format!("expected {period} premises, found {}", premises.len()),
                );
            }
            for (i, prem) in premises.iter().enumerate() {
                if prem.lhs != lhs_blocks[i % p] || prem.rhs != rhs_blocks[i % q] {
                    return fail(
                        path,
                        format!("premise {i} does not relate blocks {} and {}", i % p, i % q),
                    );
                }
            }
            let lw = WordExpr::omega(WordExpr::concat_all(lhs_blocks.iter().cloned()));
            let rw = WordExpr::omega(WordExpr::concat_all(rhs_blocks.iter().cloned()));
            if !structurally_equal(&d.lhs, &lw) {
                return fail(path, format!("`{}` is not `{lw}`", d.lhs));
            }
            if !structurally_equal(&d.rhs, &rw) {
                return fail(path, format!("`{}` is not `{rw}`", d.rhs));
            }
        }
        Rule::Pump(n) => match (&d.lhs, &d.rhs) {
            (WordExpr::Pow(e1, n1), WordExpr::Pow(e2, n2)) => {
                if e1 != e2 || n1 != n || *n2 != n.saturating_add(1) {
                    return fail(path, format!("expected `u^{n}` and `u^{}`", n + 1));
                }
                if *n < pump_bound(d.k) || *n == 0 {
                    return fail(path, format!("exponent {n} is below 2^{} - 1", d.k));
                }
            }
            _ => return fail(path, "both sides must be finite powers".into()),
        },
        Rule::Trans(a, b) => {
            if a.lhs != d.lhs || b.rhs != d.rhs {
                return fail(path, "premises do not match the conclusion".into());
            }
            if a.rhs != b.lhs {
                return fail(
                    path,
                    format!("middle terms `{}` and `{}` differ", a.rhs, b.lhs),
                );
            }
        }
        Rule::Sym(a) => {
            if a.lhs != d.rhs || a.rhs != d.lhs {
                return fail(path, "premise is not the reversed conclusion".into());
            }
        }
    }
    for (i, p) in d.premises().into_iter().enumerate() {
        path.push(i);
        check_node(p, path)?;
        path.pop();
    }
    Ok(())
}

/// Checks every rule instance; returns the first failure.
pub fn check_derivation_detailed(d: &EquivDerivation) -> Result<(), DerivationError> {
    check_node(d, &mut Vec::new())
}

pub fn check_derivation(d: &EquivDerivation) -> bool {
    check_derivation_detailed(d).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::expr::parse_expr;

    fn e(s: &str) -> WordExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn pump_bound() {
        assert!(check_derivation(&EquivDerivation::pump(e("a"), 3, 2)));
        assert!(!check_derivation(&EquivDerivation::pump(e("a"), 2, 2)));
        assert!(check_derivation(&EquivDerivation::pump(e("a b"), 1, 1)));
    }

    #[test]
    fn structural_equality() {
        assert!(structurally_equal(&e("a^3"), &e("a a a")));
        assert!(structurally_equal(&e("(a b)^2"), &e("a (b a) b")));
        assert!(structurally_equal(&e("(a a)^w"), &e("a^w")));
        assert!(structurally_equal(&e("a (b a)^w"), &e("(a b)^w")));
        assert!(structurally_equal(&e("()^w a"), &e("a")));
        assert!(!structurally_equal(&e("a^w a"), &e("a^w")));
        assert!(!structurally_equal(&e("(a b)^w"), &e("(b a)^w")));
        assert!(!structurally_equal(&e("a^2"), &e("a^3")));
    }

    #[test]
    fn congruences_and_chains() {
        let p = EquivDerivation::pump(e("a"), 3, 2);
        let c = EquivDerivation::concat_cong(EquivDerivation::refl(e("b"), 2), p.clone());
        assert_eq!(c.lhs, e("b . a^3"));
        assert!(check_derivation(&c));

        let chain = EquivDerivation::trans(p.clone(), EquivDerivation::pump(e("a"), 4, 2));
        assert!(check_derivation(&chain));
        assert_eq!(chain.rhs, e("a^5"));
        let back = EquivDerivation::sym(chain);
        assert_eq!(back.lhs, e("a^5"));
        assert!(check_derivation(&back));

        let bad = EquivDerivation {
            lhs: e("a^3"),
            rhs: e("a^5"),
            k: 2,
            rule: Rule::Trans(Box::new(p.clone()), Box::new(p)),
        };
        let err = check_derivation_detailed(&bad).unwrap_err();
        assert_eq!(err.rule, "Trans");
    }

    #[test]
    fn omega_sequences() {
        // (a^1)^ω ≡ (a^2 a)^ω from a^1 ≡ a^2 and a^1 ≡ a.
        let d1 = EquivDerivation::pump(e("a"), 1, 1);
        let d2 = EquivDerivation::struct_eq(e("a^1"), e("a"), 1);
        let d = EquivDerivation::omega_seq_cong(
            vec![e("a^1")],
            vec![e("a^2"), e("a")],
            vec![d1.clone(), d2],
            1,
        );
        assert!(check_derivation(&d), "{:?}", check_derivation_detailed(&d));
        let wrong =
            EquivDerivation::omega_seq_cong(vec![e("a^1")], vec![e("a^2"), e("a")], vec![d1], 1);
        assert!(!check_derivation(&wrong));
    }

    #[test]
    fn depth_mismatch_is_rejected() {
        let d = EquivDerivation::concat_cong(
            EquivDerivation::pump(e("a"), 3, 2),
            EquivDerivation::refl(e("b"), 1),
        );
        let err = check_derivation_detailed(&d).unwrap_err();
        assert!(err.message.contains("depth"));
    }

    #[test]
    fn serialises_rule_names() {
        let d = EquivDerivation::concat_cong(
            EquivDerivation::refl(e("b"), 2),
            EquivDerivation::pump(e("a"), 3, 2),
        );
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["rule"], "ConcatCong");
        assert_eq!(v["premises"][1]["rule"], "Pump");
        assert_eq!(v["premises"][1]["n"], 3);
        assert_eq!(v["lhs"], "b . a^3");
    }
}
