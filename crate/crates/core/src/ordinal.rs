//! Ordinals below `ω^ω` in Cantor normal form, and the closed-form
//! approximant of one-letter words `a^κ`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::merge::MergeMonoid;

/// `ω^e_1·c_1 + … + ω^e_r·c_r` with `e_1 > … > e_r` and every `c_i > 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Cnf {
    terms: Vec<(u32, u64)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ordinal `{input}`: {message}")]
pub struct OrdinalParseError {
    pub input: String,
    pub message: String,
}

impl Cnf {
    pub fn zero() -> Self {
        Cnf::default()
    }

    pub fn finite(n: u64) -> Self {
        let mut c = Cnf::zero();
        c.add_term(0, n);
        c
    }

    /// `ω^e·c`.
    pub fn term(e: u32, c: u64) -> Self {
        let mut out = Cnf::zero();
        out.add_term(e, c);
        out
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Ordinal addition `self + ω^e·c`: smaller terms are absorbed.
    pub fn add_term(&mut self, e: u32, c: u64) {
        if c == 0 {
            return;
        }
        while self.terms.last().is_some_and(|&(le, _)| le < e) {
            self.terms.pop();
        }
        match self.terms.last_mut() {
            Some((le, lc)) if *le == e => *lc += c,
            _ => self.terms.push((e, c)),
        }
    }

    pub fn add(&self, other: &Cnf) -> Cnf {
        let mut out = self.clone();
        for &(e, c) in &other.terms {
            out.add_term(e, c);
        }
        out
    }

    /// Parses sums of terms `n`, `w`, `w^e`, `w*c`, `w^e*c` (also `ω`),
    /// normalising by ordinal addition.
    pub fn parse(s: &str) -> Result<Cnf, OrdinalParseError> {
        let err = |message: &str| OrdinalParseError {
            input: s.to_string(),
            message: message.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty ordinal"));
        }
        let mut out = Cnf::zero();
        for term in compact.split('+') {
            let term = term.replace('ω', "w");
            let (base, coeff) = match term.split_once('*') {
                Some((b, c)) => (
                    b.to_string(),
                    c.parse::<u64>()
                        .map_err(|_| err("coefficient must be a natural number"))?,
                ),
                None => (term.clone(), 1),
            };
            let exponent = if base == "w" {
                1
            } else if let Some(e) = base.strip_prefix("w^") {
                e.parse::<u32>()
                    .map_err(|_| err("exponent must be a natural number"))?
            } else if base.chars().all(|c| c.is_ascii_digit()) && !base.is_empty() {
                if coeff != 1 || term.contains('*') {
                    return Err(err("finite terms take no coefficient"));
                }
                let n = base.parse::<u64>().map_err(|_| err("number too large"))?;
                out.add_term(0, n);
                continue;
            } else {
                return Err(err(&format!("cannot read term `{term}`")));
            };
            out.add_term(exponent, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(e, c)| match (e, c) {
                (0, c) => c.to_string(),
                (1, 1) => "w".into(),
                (1, c) => format!("w*{c}"),
                (e, 1) => format!("w^{e}"),
                (e, c) => format!("w^{e}*{c}"),
            })
            .collect();
        f.write_str(&parts.join("+"))
    }
}

impl std::str::FromStr for Cnf {
    type Err = OrdinalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Cnf::parse(s)
    }
}

/// `κ = ω^ℓ·κ_ℓ + ω^(ℓ−1)·k_(ℓ−1) + … + k_0`, where only whether `κ_ℓ` is
/// zero is retained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnfOrdinal {
    pub ell: u32,
    pub top_nonzero: bool,
    /// `coeffs[m]` is `k_m` for `m < ℓ`.
    pub coeffs: Vec<u64>,
}

impl CnfOrdinal {
    pub fn bounded(kappa: &Cnf, ell: u32) -> Self {
        let mut coeffs = vec![0; ell as usize];
        let mut top_nonzero = false;
        for &(e, c) in kappa.terms() {
            if e >= ell {
                top_nonzero = true;
            } else {
                coeffs[e as usize] = c;
            }
        }
        CnfOrdinal {
            ell,
            top_nonzero,
            coeffs,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproxError {
    #[error("the omega tower of the letter does not stabilise within {0} steps")]
    NoStabilisation(usize),
}

/// The tower `a, a^ω, a^(ω²), …` up to its first repetition.
fn omega_tower<V: MergeMonoid>(
    view: &V,
    a: &V::Elem,
    limit: usize,
) -> Result<Vec<V::Elem>, ApproxError> {
    let mut tower = vec![a.clone()];
    for _ in 0..limit {
        let last = tower.last().unwrap();
        let next = view.omega(last);
        if &next == last {
            return Ok(tower);
        }
        tower.push(next);
    }
    Err(ApproxError::NoStabilisation(limit))
}

const TOWER_LIMIT: usize = 256;

/// The data the approximant depends on: the stabilisation level `ℓ` of the
/// ω-tower of `a` and the threshold `n` from which finite powers of every
/// `a^(ω^m)`, `m < ℓ`, have entered their cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxParameters<E> {
    pub ell: u32,
    pub threshold: u64,
    pub tower: Vec<E>,
}

pub fn approximant_parameters<V: MergeMonoid>(
    view: &V,
    a: &V::Elem,
) -> Result<ApproxParameters<V::Elem>, ApproxError> {
    let tower = omega_tower(view, a, TOWER_LIMIT)?;
    let ell = (tower.len() - 1) as u32;
    let threshold = tower[..tower.len().max(2) - 1]
        .iter()
        .map(|t| view.power_cycle(t).index as u64)
        .max()
        .unwrap_or(1);
    Ok(ApproxParameters {
        ell,
        threshold,
        tower,
    })
}

/// `ρ(a^κ) = τ(a^(ω^ℓ·κ_ℓ)) · τ(a^(ω^(ℓ−1)·k_(ℓ−1))) ⋯ τ(a^(k_0))`, where a
/// block below the threshold is its exact power and a block at or above it
/// is replaced by the merge of `a^(ω^m)`.
pub fn approximate_one_letter<V: MergeMonoid>(
    view: &V,
    a: &V::Elem,
    kappa: &Cnf,
) -> Result<V::Elem, ApproxError> {
    let params = approximant_parameters(view, a)?;
    let bounded = CnfOrdinal::bounded(kappa, params.ell);
    let mut result = if bounded.top_nonzero {
        params.tower[params.ell as usize].clone()
    } else {
        view.unit()
    };
    for m in (0..params.ell as usize).rev() {
        let k = bounded.coeffs[m];
        let block = if k == 0 {
            continue;
        } else if k < params.threshold {
            view.pow(&params.tower[m], k)
        } else {
            view.merge(&params.tower[m])
        };
        result = view.mul(&result, &block);
    }
    Ok(result)
}

/// The exact value of `a^κ`: the product over the terms `ω^e·c` of the `e`-fold
/// ω-power of `a`, raised to `c`.
pub fn eval_one_letter<V: MergeMonoid>(view: &V, a: &V::Elem, kappa: &Cnf) -> V::Elem {
    let mut result = view.unit();
    for &(e, c) in kappa.terms() {
        let mut t = a.clone();
        for _ in 0..e {
            let next = view.omega(&t);
            if next == t {
                break;
            }
            t = next;
        }
        result = view.mul(&result, &view.pow(&t, c));
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::fig2;
    use crate::powerset::PowerMonoid;

    #[test]
    fn parse_and_normalise() {
        assert_eq!(Cnf::parse("w^2+w+1").unwrap().to_string(), "w^2+w+1");
        assert_eq!(Cnf::parse("w + 5").unwrap().terms(), &[(1, 1), (0, 5)]);
        assert_eq!(Cnf::parse("1+w").unwrap(), Cnf::term(1, 1));
        assert_eq!(Cnf::parse("w*2").unwrap(), Cnf::term(1, 2));
        assert_eq!(Cnf::parse("w+w").unwrap(), Cnf::term(1, 2));
        assert_eq!(Cnf::parse("0").unwrap(), Cnf::zero());
        assert_eq!(Cnf::parse("ω^2*3").unwrap(), Cnf::term(2, 3));
        assert!(Cnf::parse("w^").is_err());
        assert!(Cnf::parse("3*2").is_err());
    }

    #[test]
    fn bounded_form() {
        let k = Cnf::parse("w^2+w*3+4").unwrap();
        assert_eq!(
            CnfOrdinal::bounded(&k, 1),
            CnfOrdinal {
                ell: 1,
                top_nonzero: true,
                coeffs: vec![4]
            }
        );
        assert_eq!(
            CnfOrdinal::bounded(&k, 3),
            CnfOrdinal {
                ell: 3,
                top_nonzero: false,
                coeffs: vec![4, 3, 1]
            }
        );
    }

    #[test]
    fn one_letter_in_power_of_fig2() {
        let m = fig2();
        let p = PowerMonoid::new(&m);
        let a = p.named(&["a"]);
        let approx = |s: &str| {
            let x = approximate_one_letter(&p, &a, &Cnf::parse(s).unwrap()).unwrap();
            p.describe(&x)
        };
        assert_eq!(approx("0"), "{1}");
        assert_eq!(approx("1"), "{a,aa}");
        assert_eq!(approx("4"), "{a,aa}");
        assert_eq!(approx("w"), "{a^w}");
        assert_eq!(approx("w*2"), "{a^w}");
        assert_eq!(approx("w+1"), "{a^w.a,a^w.a.a}");
        assert_eq!(approx("w^2+w+1"), "{a^w.a,a^w.a.a}");
        assert_eq!(
            p.describe(&eval_one_letter(&p, &a, &Cnf::parse("w+3").unwrap())),
            "{a^w.a}"
        );
    }
}
