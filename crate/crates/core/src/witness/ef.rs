//! Ehrenfeucht–Fraïssé games on finite words.
//!
//! Two words are `≡ᵏ` iff Duplicator wins the `k`-round game. By the
//! composition lemma for ordered sums, the depth-`r` type of a word is the
//! set of triples `(type_{r-1}(left), letter, type_{r-1}(right))` over its
//! positions, so types of all factors are computed bottom-up and interned.

use std::collections::HashMap;

use thiserror::Error;

use super::expr::WordExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EfBounds {
    pub max_len: usize,
    pub max_k: u32,
}

impl Default for EfBounds {
    fn default() -> Self {
        EfBounds {
            max_len: 64,
            max_k: 4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EfError {
    #[error("expression `{0}` contains an omega-power")]
    Infinite(String),
    #[error("expression `{expr}` expands past the length bound {bound}")]
    TooLong { expr: String, bound: usize },
    #[error("depth {k} exceeds the bound {bound}")]
    TooDeep { k: u32, bound: u32 },
}

struct TypeTable {
    interned: HashMap<Vec<(u32, u32, u32)>, u32>,
}

impl TypeTable {
    fn intern(&mut self, mut key: Vec<(u32, u32, u32)>) -> u32 {
        key.sort_unstable();
        key.dedup();
        let next = self.interned.len() as u32;
        *self.interned.entry(key).or_insert(next)
    }
}

/// `types[i][j]` for `i ≤ j` is the type of the factor `w[i..j]`.
fn next_types(word: &[u32], prev: &[Vec<u32>], table: &mut TypeTable) -> Vec<Vec<u32>> {
    let n = word.len();
    let mut out = vec![vec![0; n + 1]; n + 1];
    for i in 0..=n {
        for j in i..=n {
            let key = (i..j)
                .map(|p| (prev[i][p], word[p], prev[p + 1][j]))
                .collect();
            out[i][j] = table.intern(key);
        }
    }
    out
}

fn encode<'a>(w: &'a [String], letters: &mut HashMap<&'a str, u32>) -> Vec<u32> {
    w.iter()
        .map(|a| {
            let next = letters.len() as u32;
            *letters.entry(a.as_str()).or_insert(next)
        })
        .collect()
}

/// Decides `u ≡ᵏ v` for finite words given as letter sequences.
pub fn ef_equiv_words(u: &[String], v: &[String], k: u32) -> bool {
    let mut letters: HashMap<&str, u32> = HashMap::new();
    let cu = encode(u, &mut letters);
    let cv = encode(v, &mut letters);
    let mut tu = vec![vec![0; cu.len() + 1]; cu.len() + 1];
    let mut tv = vec![vec![0; cv.len() + 1]; cv.len() + 1];
    for _ in 0..k {
        // A fresh table per round keeps the ids of one round comparable.
        let mut table = TypeTable {
            interned: HashMap::new(),
        };
        tu = next_types(&cu, &tu, &mut table);
        tv = next_types(&cv, &tv, &mut table);
    }
    tu[0][cu.len()] == tv[0][cv.len()]
}

/// Decides `u ≡ᵏ v` for finite expressions within the given bounds.
pub fn ef_equiv_finite_bounded(
    u: &WordExpr,
    v: &WordExpr,
    k: u32,
    bounds: EfBounds,
) -> Result<bool, EfError> {
    if k > bounds.max_k {
        return Err(EfError::TooDeep {
            k,
            bound: bounds.max_k,
        });
    }
    let expand = |e: &WordExpr| {
        if !e.is_finite() {
            return Err(EfError::Infinite(e.to_string()));
        }
        e.expand(bounds.max_len).ok_or_else(|| EfError::TooLong {
            expr: e.to_string(),
            bound: bounds.max_len,
        })
    };
    Ok(ef_equiv_words(&expand(u)?, &expand(v)?, k))
}

pub fn ef_equiv_finite(u: &WordExpr, v: &WordExpr, k: u32) -> Result<bool, EfError> {
    ef_equiv_finite_bounded(u, v, k, EfBounds::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::expr::parse_expr;
    use proptest::prelude::*;

    fn eq(u: &str, v: &str, k: u32) -> bool {
        ef_equiv_finite(&parse_expr(u).unwrap(), &parse_expr(v).unwrap(), k).unwrap()
    }

    /// The game itself: Spoiler picks a position in either word, Duplicator
    /// answers in the other, and the pebbled positions must stay a partial
    /// isomorphism for order and letters.
    fn game(u: &[char], v: &[char], k: u32, pu: &mut Vec<usize>, pv: &mut Vec<usize>) -> bool {
        let consistent = (0..pu.len()).all(|i| {
            u[pu[i]] == v[pv[i]] && (0..pu.len()).all(|j| pu[i].cmp(&pu[j]) == pv[i].cmp(&pv[j]))
        });
        if !consistent {
            return false;
        }
        if k == 0 {
            return true;
        }
        let spoiler_u = (0..u.len()).all(|i| {
            (0..v.len()).any(|j| {
                pu.push(i);
                pv.push(j);
                let ok = game(u, v, k - 1, pu, pv);
                pu.pop();
                pv.pop();
                ok
            })
        });
        spoiler_u
            && (0..v.len()).all(|j| {
                (0..u.len()).any(|i| {
                    pu.push(i);
                    pv.push(j);
                    let ok = game(u, v, k - 1, pu, pv);
                    pu.pop();
                    pv.pop();
                    ok
                })
            })
    }

    fn brute(u: &str, v: &str, k: u32) -> bool {
        let u: Vec<char> = u.chars().collect();
        let v: Vec<char> = v.chars().collect();
        game(&u, &v, k, &mut vec![], &mut vec![])
    }

    fn letters(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn small_cases() {
        assert!(eq("a^3", "a^4", 2));
        assert!(!eq("a^2", "a^3", 2));
        assert!(eq("a", "a^2", 1));
        assert!(!eq("a b", "b a", 2));
        assert!(eq("a b", "b a", 1));
        assert!(!eq("()", "a", 1));
        assert!(eq("()", "a", 0));
        assert!(eq("a^7", "a^8", 3));
        assert!(!eq("a^6", "a^7", 3));
    }

    #[test]
    fn bounds() {
        let a = parse_expr("a^65").unwrap();
        let b = parse_expr("a").unwrap();
        assert!(matches!(
            ef_equiv_finite(&a, &b, 1),
            Err(EfError::TooLong { .. })
        ));
        assert!(matches!(
            ef_equiv_finite(&b, &b, 5),
            Err(EfError::TooDeep { .. })
        ));
        let w = parse_expr("a^w").unwrap();
        assert!(matches!(
            ef_equiv_finite(&w, &b, 1),
            Err(EfError::Infinite(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_brute_force(u in "[ab]{0,4}", v in "[ab]{0,4}", k in 0u32..3) {
            prop_assert_eq!(ef_equiv_words(&letters(&u), &letters(&v), k), brute(&u, &v, k));
        }
    }
}
