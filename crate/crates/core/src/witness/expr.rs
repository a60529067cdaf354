//! Ordinal-word expressions over a letter alphabet.
//!
//! Concrete syntax: identifiers are letters, juxtaposition or `.` is
//! concatenation (left associative), `^n` is a finite power, `^w` the
//! ω-power, `()` or `ε` the empty word. Example: `(a)^w . a^5`.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, ElementId, LetterMap, OrdinalMonoidPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordExpr {
    Empty,
    Letter(String),
    Concat(Box<WordExpr>, Box<WordExpr>),
    /// Exponent is at least 1.
    Pow(Box<WordExpr>, u64),
    OmegaPow(Box<WordExpr>),
}

impl WordExpr {
    pub fn letter(a: impl Into<String>) -> Self {
        WordExpr::Letter(a.into())
    }

    pub fn concat(l: WordExpr, r: WordExpr) -> Self {
        WordExpr::Concat(Box::new(l), Box::new(r))
    }

    pub fn pow(e: WordExpr, n: u64) -> Self {
        assert!(n >= 1, "power exponent must be positive");
        WordExpr::Pow(Box::new(e), n)
    }

    pub fn omega(e: WordExpr) -> Self {
        WordExpr::OmegaPow(Box::new(e))
    }

    /// Right-nested concatenation `e1 . (e2 . (… . en))`; empty input gives `Empty`.
    pub fn concat_all(parts: impl IntoIterator<Item = WordExpr>) -> Self {
        let mut parts: Vec<WordExpr> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return WordExpr::Empty;
        };
        while let Some(p) = parts.pop() {
            acc = WordExpr::concat(p, acc);
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        match self {
            WordExpr::Empty | WordExpr::Letter(_) => true,
            WordExpr::Concat(l, r) => l.is_finite() && r.is_finite(),
            WordExpr::Pow(e, _) => e.is_finite(),
            WordExpr::OmegaPow(_) => false,
        }
    }

    /// Expands a finite expression into its letters, or `None` if it contains
    /// an ω-power or has more than `limit` letters.
    pub fn expand(&self, limit: usize) -> Option<Vec<String>> {
        fn go(e: &WordExpr, out: &mut Vec<String>, limit: usize) -> bool {
            match e {
                WordExpr::Empty => true,
                WordExpr::Letter(a) => {
                    out.push(a.clone());
                    out.len() <= limit
                }
                WordExpr::Concat(l, r) => go(l, out, limit) && go(r, out, limit),
                WordExpr::Pow(e, n) => {
                    let start = out.len();
                    if !go(e, out, limit) {
                        return false;
                    }
                    let block = out[start..].to_vec();
                    let total = (block.len() as u128) * (*n as u128) + start as u128;
                    if total > limit as u128 {
                        return false;
                    }
                    for _ in 1..*n {
                        out.extend(block.iter().cloned());
                    }
                    true
                }
                WordExpr::OmegaPow(_) => false,
            }
        }
        let mut out = Vec::new();
        go(self, &mut out, limit).then_some(out)
    }

    pub fn letters(&self) -> Vec<&str> {
        fn go<'a>(e: &'a WordExpr, out: &mut Vec<&'a str>) {
            match e {
                WordExpr::Empty => {}
                WordExpr::Letter(a) => out.push(a),
                WordExpr::Concat(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                WordExpr::Pow(e, _) | WordExpr::OmegaPow(e) => go(e, out),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            WordExpr::Empty | WordExpr::Letter(_) => 1,
            WordExpr::Concat(l, r) => 1 + l.size() + r.size(),
            WordExpr::Pow(e, _) | WordExpr::OmegaPow(e) => 1 + e.size(),
        }
    }
}

/// Evaluates an expression in a presentation under a letter map.
pub fn eval_expr(
    e: &WordExpr,
    p: &OrdinalMonoidPresentation,
    letters: &LetterMap,
) -> Result<ElementId, AlgebraError> {
    Ok(match e {
        WordExpr::Empty => p.unit(),
        WordExpr::Letter(a) => letters.image(a)?,
        WordExpr::Concat(l, r) => p.mul(eval_expr(l, p, letters)?, eval_expr(r, p, letters)?),
        WordExpr::Pow(e, n) => p.pow(eval_expr(e, p, letters)?, *n),
        WordExpr::OmegaPow(e) => p.omega(eval_expr(e, p, letters)?),
    })
}

fn fmt_atom(e: &WordExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        WordExpr::Letter(_) | WordExpr::Empty => write!(f, "{e}"),
        WordExpr::Pow(..) | WordExpr::OmegaPow(..) => write!(f, "{e}"),
        WordExpr::Concat(..) => write!(f, "({e})"),
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Empty => f.write_str("()"),
            WordExpr::Letter(a) => f.write_str(a),
            WordExpr::Concat(l, r) => {
                write!(f, "{l} . ")?;
                match **r {
                    WordExpr::Concat(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            WordExpr::Pow(e, n) => {
                fmt_atom(e, f)?;
                write!(f, "^{n}")
            }
            WordExpr::OmegaPow(e) => {
                fmt_atom(e, f)?;
                f.write_str("^w")
            }
        }
    }
}

impl Serialize for WordExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct ExprParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u64),
    Dot,
    Caret,
    Open,
    Close,
    Epsilon,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ExprParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '.' | '·' => {
                out.push((col, Tok::Dot));
                i += 1;
            }
            '^' => {
                out.push((col, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((col, Tok::Open));
                i += 1;
            }
            ')' => {
                out.push((col, Tok::Close));
                i += 1;
            }
            'ε' => {
                out.push((col, Tok::Epsilon));
                i += 1;
            }
            'ω' => {
                out.push((col, Tok::Ident("w".into())));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse().map_err(|_| ExprParseError {
                    column: col,
                    message: format!("exponent `{text}` is too large"),
                })?;
                out.push((col, Tok::Number(n)));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
            }
            other => {
                return Err(ExprParseError {
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct ExprParser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(c, _)| *c)
    }

    fn error(&self, message: impl Into<String>) -> ExprParseError {
        ExprParseError {
            column: self.column(),
            message: message.into(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Open | Tok::Epsilon))
    }

    fn concat(&mut self) -> Result<WordExpr, ExprParseError> {
        let mut acc = self.postfix()?;
        loop {
            if self.peek() == Some(&Tok::Dot) {
                self.pos += 1;
            } else if !self.starts_atom() {
                return Ok(acc);
            }
            let rhs = self.postfix()?;
            acc = WordExpr::concat(acc, rhs);
        }
    }

    fn postfix(&mut self) -> Result<WordExpr, ExprParseError> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Number(0)) => return Err(self.error("power exponent must be positive")),
                Some(Tok::Number(n)) => e = WordExpr::pow(e, n),
                Some(Tok::Ident(w)) if w == "w" => e = WordExpr::omega(e),
                _ => return Err(self.error("expected a positive exponent or `w` after `^`")),
            }
            self.pos += 1;
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<WordExpr, ExprParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(a)) => {
                self.pos += 1;
                Ok(WordExpr::Letter(a))
            }
            Some(Tok::Epsilon) => {
                self.pos += 1;
                Ok(WordExpr::Empty)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Close) {
                    self.pos += 1;
                    return Ok(WordExpr::Empty);
                }
                let e = self.concat()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(self.error("expected a letter, `(` or `ε`")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

/// Parses the concrete syntax described in the module documentation.
pub fn parse_expr(s: &str) -> Result<WordExpr, ExprParseError> {
    let toks = lex(s)?;
    let mut p = ExprParser {
        toks,
        pos: 0,
        end: s.chars().count() + 1,
    };
    let e = p.concat()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl std::str::FromStr for WordExpr {
    type Err = ExprParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::fig2;
    use proptest::prelude::*;

    fn fig2_letters() -> LetterMap {
        LetterMap::from_pairs([("a", ElementId(1))])
    }

    fn ev(s: &str) -> String {
        let p = fig2();
        let x = eval_expr(&parse_expr(s).unwrap(), &p, &fig2_letters()).unwrap();
        p.name(x).to_string()
    }

    #[test]
    fn evaluation_in_fig2() {
        assert_eq!(ev("a^w"), "a^w");
        assert_eq!(ev("()"), "1");
        assert_eq!(ev("(a)^w . a^3"), "a^w.a");
        assert_eq!(ev("a^w a a"), "a^w.a.a");
        assert_eq!(ev("a a^w"), "a^w");
        let err = eval_expr(&parse_expr("b").unwrap(), &fig2(), &fig2_letters()).unwrap_err();
        assert_eq!(err, AlgebraError::UnknownLetter("b".into()));
    }

    #[test]
    fn syntax() {
        let a = || WordExpr::letter("a");
        assert_eq!(
            parse_expr("(a)^w . a^5").unwrap(),
            WordExpr::concat(WordExpr::omega(a()), WordExpr::pow(a(), 5))
        );
        assert_eq!(parse_expr("a b").unwrap(), parse_expr("a.b").unwrap());
        assert_eq!(parse_expr("ε").unwrap(), WordExpr::Empty);
        assert_eq!(parse_expr("(a b)^2").unwrap().to_string(), "(a . b)^2");
        assert!(parse_expr("a^0").is_err());
        assert!(parse_expr("(a").is_err());
        assert!(parse_expr("a^").is_err());
        assert_eq!(parse_expr("a )").unwrap_err().column, 3);
    }

    #[test]
    fn expansion() {
        let e = parse_expr("(a b)^3 a").unwrap();
        assert_eq!(e.expand(64).unwrap().concat(), "abababa");
        assert!(e.expand(6).is_none());
        assert!(parse_expr("a^w").unwrap().expand(64).is_none());
    }

    fn arb_expr() -> impl Strategy<Value = WordExpr> {
        let leaf = prop_oneof![Just(WordExpr::Empty), "[ab]".prop_map(WordExpr::Letter),];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| WordExpr::concat(l, r)),
                (inner.clone(), 1u64..5).prop_map(|(e, n)| WordExpr::pow(e, n)),
                inner.prop_map(WordExpr::omega),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
    }
}
