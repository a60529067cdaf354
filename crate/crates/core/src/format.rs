//! Line-oriented text format for presentations.
//!
//! ```text
//! # comment
//! elements: 1 a aa
//! unit: 1
//! table:
//! 1  1  a  aa
//! a  a  aa a
//! aa aa a  aa
//! omega: 1 1
//! omega: a aa
//! omega: aa aa
//! letters: a->a
//! accept EVEN: aa
//! ```
//!
//! Products may be given as a `table:` block (one row per left operand,
//! columns in `elements` order) or as `mul: x y z` lines meaning `x·y = z`.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::algebra::{ElementId, LetterMap, OrdinalMonoidPresentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A parsed presentation file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationFile {
    pub presentation: OrdinalMonoidPresentation,
    pub letters: LetterMap,
    /// Named accepting sets in declaration order, each sorted by index.
    pub accepting: Vec<(String, Vec<ElementId>)>,
}

impl PresentationFile {
    pub fn accepting(&self, name: &str) -> Option<&[ElementId]> {
        self.accepting
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.as_slice())
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokens(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, line.len()));
    }
    out.into_iter()
        .map(|(s, e)| Token {
            text: &line[s..e],
            line: line_no,
            column: line[..s].chars().count() + 1,
        })
        .collect()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

struct Parser<'a> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    elements_at: Option<Token<'a>>,
    unit: Option<usize>,
    product: Vec<Vec<Option<usize>>>,
    omega: Vec<Option<usize>>,
    letters: LetterMap,
    accepting: Vec<(String, Vec<ElementId>)>,
}

impl<'a> Parser<'a> {
    fn element(&self, tok: &Token<'a>) -> Result<usize, ParseError> {
        self.index
            .get(tok.text)
            .copied()
            .ok_or_else(|| tok.error(format!("unknown element `{}`", tok.text)))
    }

    fn require_elements(&self, tok: &Token<'a>) -> Result<(), ParseError> {
        if self.elements_at.is_none() {
            Err(tok.error("`elements:` must come first"))
        } else {
            Ok(())
        }
    }

    fn set_product(
        &mut self,
        at: &Token<'a>,
        x: usize,
        y: usize,
        z: usize,
    ) -> Result<(), ParseError> {
        if self.product[x][y].is_some() {
            return Err(at.error(format!(
                "duplicate product entry for `{}` · `{}`",
                self.names[x], self.names[y]
            )));
        }
        self.product[x][y] = Some(z);
        Ok(())
    }
}

fn expect_args<'a>(key: &Token<'a>, args: &[Token<'a>], n: usize) -> Result<(), ParseError> {
    if args.len() != n {
        let at = args.get(n).unwrap_or(key);
        return Err(at.error(format!(
            "`{}` expects {n} identifier{}, found {}",
            key.text,
            if n == 1 { "" } else { "s" },
            args.len()
        )));
    }
    Ok(())
}

/// Parses a presentation file.
pub fn parse_presentation(text: &str) -> Result<PresentationFile, ParseError> {
    let mut p = Parser {
        names: Vec::new(),
        index: HashMap::new(),
        elements_at: None,
        unit: None,
        product: Vec::new(),
        omega: Vec::new(),
        letters: LetterMap::new(),
        accepting: Vec::new(),
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .collect();
    let mut table_rows_left = 0usize;
    let mut table_seen: HashSet<usize> = HashSet::new();
    let mut table_at: Option<Token> = None;
    let mut last_line = 1;

    for &(line_no, line) in &lines {
        last_line = line_no;
        let toks = tokens(line, line_no);
        let Some(first) = toks.first().copied() else {
            continue;
        };

        if table_rows_left > 0 {
            let n = p.names.len();
            let left = p.element(&first)?;
            if !table_seen.insert(left) {
                return Err(first.error(format!("duplicate table row for `{}`", first.text)));
            }
            let cells = &toks[1..];
            if cells.len() != n {
                let at = cells.get(n).unwrap_or(&first);
                return Err(at.error(format!(
                    "table row `{}` has {} entries, expected {n}",
                    first.text,
                    cells.len()
                )));
            }
            for (right, cell) in cells.iter().enumerate() {
                let z = p.element(cell)?;
                p.set_product(cell, left, right, z)?;
            }
            table_rows_left -= 1;
            continue;
        }

        if first.text == "accept" {
            p.require_elements(&first)?;
            let rest = &toks[1..];
            let Some(name_tok) = rest.first() else {
                return Err(first.error("`accept` expects `NAME: elements…`"));
            };
            // The colon may be attached to the name or stand alone.
            let (name, members) = match name_tok.text.strip_suffix(':') {
                Some(n) => (n, &rest[1..]),
                None => match rest.get(1) {
                    Some(colon) if colon.text == ":" => (name_tok.text, &rest[2..]),
                    _ => return Err(name_tok.error("expected `:` after the language name")),
                },
            };
            if name.is_empty() || name.contains(':') {
                return Err(name_tok.error("invalid language name"));
            }
            if p.accepting.iter().any(|(n, _)| n == name) {
                return Err(name_tok.error(format!("duplicate accepting set `{name}`")));
            }
            let mut set = Vec::new();
            for m in members {
                let x = ElementId(p.element(m)?);
                if set.contains(&x) {
                    return Err(m.error(format!("duplicate element `{}` in `{name}`", m.text)));
                }
                set.push(x);
            }
            set.sort();
            p.accepting.push((name.to_string(), set));
            continue;
        }

        let Some(key) = first.text.strip_suffix(':') else {
            return Err(first.error(format!("expected a keyword, found `{}`", first.text)));
        };
        let args = &toks[1..];
        match key {
            "elements" => {
                if p.elements_at.is_some() {
                    return Err(first.error("duplicate `elements:` header"));
                }
                if args.is_empty() {
                    return Err(first.error("the carrier is empty; a monoid needs a unit"));
                }
                for a in args {
                    if a.text.contains("->") || a.text.ends_with(':') {
                        return Err(a.error(format!("invalid element name `{}`", a.text)));
                    }
                    if p.index.insert(a.text.to_string(), p.names.len()).is_some() {
                        return Err(a.error(format!("duplicate element `{}`", a.text)));
                    }
                    p.names.push(a.text.to_string());
                }
                let n = p.names.len();
                p.product = vec![vec![None; n]; n];
                p.omega = vec![None; n];
                p.elements_at = Some(first);
            }
            "unit" => {
                p.require_elements(&first)?;
                expect_args(&first, args, 1)?;
                if p.unit.is_some() {
                    return Err(first.error("duplicate `unit:`"));
                }
                p.unit = Some(p.element(&args[0])?);
            }
            "table" => {
                p.require_elements(&first)?;
                expect_args(&first, args, 0)?;
                if table_at.is_some() {
                    return Err(first.error("duplicate `table:` block"));
                }
                table_at = Some(first);
                table_rows_left = p.names.len();
            }
            "mul" => {
                p.require_elements(&first)?;
                expect_args(&first, args, 3)?;
                let x = p.element(&args[0])?;
                let y = p.element(&args[1])?;
                let z = p.element(&args[2])?;
                p.set_product(&args[0], x, y, z)?;
            }
            "omega" => {
                p.require_elements(&first)?;
                expect_args(&first, args, 2)?;
                let x = p.element(&args[0])?;
                let y = p.element(&args[1])?;
                if p.omega[x].is_some() {
                    return Err(
                        args[0].error(format!("duplicate omega entry for `{}`", args[0].text))
                    );
                }
                p.omega[x] = Some(y);
            }
            "letters" => {
                p.require_elements(&first)?;
                for a in args {
                    let Some((letter, target)) = a.text.split_once("->") else {
                        return Err(
                            a.error(format!("expected `letter->element`, found `{}`", a.text))
                        );
                    };
                    if letter.is_empty() || !letter.chars().all(|c| c.is_alphanumeric() || c == '_')
                    {
                        return Err(a.error(format!("invalid letter `{letter}`")));
                    }
                    let target_tok = Token {
                        text: target,
                        line: a.line,
                        column: a.column + letter.chars().count() + 2,
                    };
                    let x = p.element(&target_tok)?;
                    if p.letters.insert(letter, ElementId(x)).is_some() {
                        return Err(a.error(format!("duplicate letter `{letter}`")));
                    }
                }
            }
            other => return Err(first.error(format!("unknown keyword `{other}:`"))),
        }
    }

    let end = ParseError {
        line: last_line,
        column: 1,
        message: String::new(),
    };
    let at_end = |message: String| ParseError {
        message,
        ..end.clone()
    };
    if table_rows_left > 0 {
        return Err(at_end(format!(
            "table block ends after {} of {} rows",
            p.names.len() - table_rows_left,
            p.names.len()
        )));
    }
    let Some(elements_at) = p.elements_at else {
        return Err(at_end("missing `elements:` header".into()));
    };
    let Some(unit) = p.unit else {
        return Err(elements_at.error("missing `unit:`"));
    };
    let mut product = Vec::with_capacity(p.names.len());
    for (x, row) in p.product.iter().enumerate() {
        let mut full = Vec::with_capacity(row.len());
        for (y, z) in row.iter().enumerate() {
            match z {
                Some(z) => full.push(*z),
                None => {
                    return Err(elements_at.error(format!(
                        "product `{}` · `{}` is not defined",
                        p.names[x], p.names[y]
                    )))
                }
            }
        }
        product.push(full);
    }
    let mut omega = Vec::with_capacity(p.names.len());
    for (x, w) in p.omega.iter().enumerate() {
        match w {
            Some(w) => omega.push(*w),
            None => {
                return Err(
                    elements_at.error(format!("omega value for `{}` is not defined", p.names[x]))
                )
            }
        }
    }
    let presentation = OrdinalMonoidPresentation::from_tables(p.names, unit, product, omega)
        .map_err(|e| elements_at.error(e.to_string()))?;
    Ok(PresentationFile {
        presentation,
        letters: p.letters,
        accepting: p.accepting,
    })
}

/// Prints a presentation file in canonical form: a `table:` block and one
/// `omega:` line per element.
pub fn print_presentation(file: &PresentationFile) -> String {
    let p = &file.presentation;
    let mut out = String::new();
    let width = p
        .names()
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(1);
    let _ = writeln!(out, "elements: {}", p.names().join(" "));
    let _ = writeln!(out, "unit: {}", p.name(p.unit()));
    out.push_str("table:\n");
    for x in p.elements() {
        let row: Vec<String> = p
            .product_row(x)
            .iter()
            .map(|&z| format!("{:width$}", p.name(z)))
            .collect();
        let _ = writeln!(out, "{:width$} {}", p.name(x), row.join(" ").trim_end());
    }
    for x in p.elements() {
        let _ = writeln!(out, "omega: {} {}", p.name(x), p.name(p.omega(x)));
    }
    if !file.letters.is_empty() {
        let letters: Vec<String> = file
            .letters
            .iter()
            .map(|(a, x)| format!("{a}->{}", p.name(x)))
            .collect();
        let _ = writeln!(out, "letters: {}", letters.join(" "));
    }
    for (name, set) in &file.accepting {
        let members: Vec<&str> = set.iter().map(|&x| p.name(x)).collect();
        let _ = writeln!(out, "accept {name}: {}", members.join(" "));
    }
    out
}

impl fmt::Display for PresentationFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_presentation(self))
    }
}
