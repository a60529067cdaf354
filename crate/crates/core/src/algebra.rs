//! Finite ordinal monoids given by their presentation: a unit, a binary
//! product table and an ω-power table.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::cycle::PowerCycle;

/// Index of an element in the carrier of a presentation, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ElementId(pub usize);

impl ElementId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("the carrier is empty; a monoid needs a unit")]
    EmptyCarrier,
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("product table has {rows} rows, expected {expected}")]
    ProductShape { rows: usize, expected: usize },
    #[error("product row {row} has {len} entries, expected {expected}")]
    ProductRow {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("omega table has {len} entries, expected {expected}")]
    OmegaShape { len: usize, expected: usize },
    #[error("table entry {value} is outside the carrier of size {size}")]
    OutOfCarrier { value: usize, size: usize },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("subset is not closed under the operations: {0}")]
    NotClosed(String),
    #[error(
        "omega tower of `{0}` does not stabilise; the presentation is not a valid ordinal monoid"
    )]
    NoStabilisation(String),
}

/// A finite ordinal monoid `(M, 1, ·, −^ω)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalMonoidPresentation {
    names: Vec<String>,
    unit: ElementId,
    product: Vec<ElementId>,
    omega: Vec<ElementId>,
}

impl OrdinalMonoidPresentation {
    /// Builds a presentation from raw tables. `product[x][y]` is `x·y`.
    ///
    /// Only the shape of the input is checked here; the monoid axioms are
    /// checked by [`validate`](Self::validate).
    pub fn from_tables(
        names: Vec<String>,
        unit: usize,
        product: Vec<Vec<usize>>,
        omega: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::DuplicateName(name.clone()));
            }
        }
        let in_carrier = |v: usize| {
            if v < n {
                Ok(ElementId(v))
            } else {
                Err(AlgebraError::OutOfCarrier { value: v, size: n })
            }
        };
        if product.len() != n {
            return Err(AlgebraError::ProductShape {
                rows: product.len(),
                expected: n,
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, entries) in product.iter().enumerate() {
            if entries.len() != n {
                return Err(AlgebraError::ProductRow {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            for &v in entries {
                flat.push(in_carrier(v)?);
            }
        }
        if omega.len() != n {
            return Err(AlgebraError::OmegaShape {
                len: omega.len(),
                expected: n,
            });
        }
        let omega = omega
            .into_iter()
            .map(in_carrier)
            .collect::<Result<Vec<_>, _>>()?;
        let unit = in_carrier(unit)?;
        Ok(OrdinalMonoidPresentation {
            names,
            unit,
            product: flat,
            omega,
        })
    }

    /// The one-element monoid.
    pub fn trivial() -> Self {
        Self::from_tables(vec!["1".into()], 0, vec![vec![0]], vec![0]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + Clone {
        (0..self.len()).map(ElementId)
    }

    pub fn unit(&self) -> ElementId {
        self.unit
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: ElementId) -> &str {
        &self.names[x.0]
    }

    pub fn id(&self, name: &str) -> Option<ElementId> {
        self.names.iter().position(|n| n == name).map(ElementId)
    }

    pub fn mul(&self, x: ElementId, y: ElementId) -> ElementId {
        self.product[x.0 * self.len() + y.0]
    }

    pub fn omega(&self, x: ElementId) -> ElementId {
        self.omega[x.0]
    }

    /// `x^n`, with `x^0` the unit.
    pub fn pow(&self, x: ElementId, n: u64) -> ElementId {
        let mut result = self.unit;
        let mut base = x;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        result
    }

    pub fn product_of(&self, xs: impl IntoIterator<Item = ElementId>) -> ElementId {
        xs.into_iter().fold(self.unit, |acc, x| self.mul(acc, x))
    }

    /// Hash of the tables, used to tell apart subsets over different bases.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    pub fn product_row(&self, x: ElementId) -> &[ElementId] {
        let n = self.len();
        &self.product[x.0 * n..(x.0 + 1) * n]
    }

    pub fn power_cycle(&self, x: ElementId) -> PowerCycle<ElementId> {
        PowerCycle::compute(&x, |a, b| self.mul(*a, *b))
    }

    /// `x^π`, the unique idempotent among the powers of `x`.
    pub fn idempotent_power(&self, x: ElementId) -> ElementId {
        self.power_cycle(x).idempotent(|a, b| self.mul(*a, *b))
    }

    /// `x^(π+k) = x^π · x^k`.
    pub fn power_plus(&self, x: ElementId, k: u64) -> ElementId {
        self.mul(self.idempotent_power(x), self.pow(x, k))
    }

    pub fn is_idempotent(&self, x: ElementId) -> bool {
        self.mul(x, x) == x
    }

    /// Checks group-triviality `x^π = x^(π+1)` for every element.
    pub fn aperiodicity(&self) -> Aperiodicity {
        for x in self.elements() {
            if self.power_plus(x, 1) != self.idempotent_power(x) {
                return Aperiodicity::Counterexample(x);
            }
        }
        Aperiodicity::Aperiodic
    }

    pub fn is_aperiodic(&self) -> bool {
        matches!(self.aperiodicity(), Aperiodicity::Aperiodic)
    }

    /// Iterates `y ← y^ω` from `x` and returns the least `ℓ` with
    /// `x^(ω^ℓ) = x^(ω^(ℓ+1))` together with that value.
    pub fn omega_tower_stabilisation(
        &self,
        x: ElementId,
    ) -> Result<(usize, ElementId), AlgebraError> {
        let mut y = x;
        for level in 0..=2 * self.len() {
            let next = self.omega(y);
            if next == y {
                return Ok((level, y));
            }
            y = next;
        }
        Err(AlgebraError::NoStabilisation(self.name(x).to_string()))
    }

    /// Checks that every `x` R-equivalent to `x^ω` is idempotent.
    pub fn check_r_omega_idempotent(&self) -> bool {
        let green = crate::green::GreenSummary::compute(self);
        self.elements()
            .filter(|&x| green.r_equivalent(x, self.omega(x)))
            .all(|x| self.is_idempotent(x))
    }

    /// Restricts to a subset of the carrier closed under the operations and
    /// containing the unit. Elements keep their relative order.
    pub fn restrict(&self, keep: &[ElementId]) -> Result<Self, AlgebraError> {
        let mut keep: Vec<ElementId> = keep.to_vec();
        keep.sort();
        keep.dedup();
        let position: HashMap<ElementId, usize> =
            keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let map = |x: ElementId| {
            position
                .get(&x)
                .copied()
                .ok_or_else(|| AlgebraError::NotClosed(self.name(x).to_string()))
        };
        let unit = map(self.unit)?;
        let mut product = Vec::with_capacity(keep.len());
        for &x in &keep {
            let row = keep
                .iter()
                .map(|&y| map(self.mul(x, y)))
                .collect::<Result<Vec<_>, _>>()?;
            product.push(row);
        }
        let omega = keep
            .iter()
            .map(|&x| map(self.omega(x)))
            .collect::<Result<Vec<_>, _>>()?;
        let names = keep.iter().map(|&x| self.name(x).to_string()).collect();
        Self::from_tables(names, unit, product, omega)
    }

    /// Checks the presentation laws exhaustively.
    ///
    /// The law list is: associativity, two-sided unit, `1^ω = 1`, the swap
    /// law `x·(y·x)^ω = (x·y)^ω`, and the power law `(xⁿ)^ω = x^ω` for
    /// `1 ≤ n ≤ |M|`. This is a reconstruction of the finite presentation
    /// axioms rather than a quoted list.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let elems: Vec<ElementId> = self.elements().collect();
        for &x in &elems {
            for &y in &elems {
                for &z in &elems {
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                        report.record(Axiom::Associativity, vec![x, y, z]);
                    }
                }
            }
        }
        for &x in &elems {
            if self.mul(self.unit, x) != x {
                report.record(Axiom::LeftUnit, vec![x]);
            }
            if self.mul(x, self.unit) != x {
                report.record(Axiom::RightUnit, vec![x]);
            }
        }
        if self.omega(self.unit) != self.unit {
            report.record(Axiom::OmegaUnit, vec![self.unit]);
        }
        for &x in &elems {
            for &y in &elems {
                let lhs = self.mul(x, self.omega(self.mul(y, x)));
                let rhs = self.omega(self.mul(x, y));
                if lhs != rhs {
                    report.record(Axiom::Swap, vec![x, y]);
                }
            }
        }
        for &x in &elems {
            let mut power = x;
            for n in 1..=self.len() {
                if self.omega(power) != self.omega(x) {
                    report.record(Axiom::Power { n }, vec![x]);
                }
                power = self.mul(power, x);
            }
        }
        report
    }
}

impl Hash for OrdinalMonoidPresentation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.names.hash(state);
        self.unit.hash(state);
        self.product.hash(state);
        self.omega.hash(state);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aperiodicity {
    Aperiodic,
    Counterexample(ElementId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Associativity,
    LeftUnit,
    RightUnit,
    OmegaUnit,
    Swap,
    Power { n: usize },
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Associativity => write!(f, "associativity (x·y)·z = x·(y·z)"),
            Axiom::LeftUnit => write!(f, "left unit 1·x = x"),
            Axiom::RightUnit => write!(f, "right unit x·1 = x"),
            Axiom::OmegaUnit => write!(f, "omega unit 1^w = 1"),
            Axiom::Swap => write!(f, "swap x·(y·x)^w = (x·y)^w"),
            Axiom::Power { n } => write!(f, "power (x^{n})^w = x^w"),
        }
    }
}

/// A violated law with its first counterexample and the number of failing tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<ElementId>,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn record(&mut self, axiom: Axiom, witness: Vec<ElementId>) {
        match self.violations.iter_mut().find(|v| v.axiom == axiom) {
            Some(v) => v.count += 1,
            None => self.violations.push(Violation {
                axiom,
                witness,
                count: 1,
            }),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, pred: impl Fn(&Axiom) -> bool) -> bool {
        self.violations.iter().any(|v| pred(&v.axiom))
    }
}

/// The letter-to-element map `h: Σ → M`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LetterMap {
    map: BTreeMap<String, ElementId>,
}

impl LetterMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, ElementId)>) -> Self {
        LetterMap {
            map: pairs.into_iter().map(|(a, x)| (a.into(), x)).collect(),
        }
    }

    /// Returns the previous image if the letter was already mapped.
    pub fn insert(&mut self, letter: impl Into<String>, x: ElementId) -> Option<ElementId> {
        self.map.insert(letter.into(), x)
    }

    pub fn get(&self, letter: &str) -> Option<ElementId> {
        self.map.get(letter).copied()
    }

    pub fn image(&self, letter: &str) -> Result<ElementId, AlgebraError> {
        self.get(letter)
            .ok_or_else(|| AlgebraError::UnknownLetter(letter.to_string()))
    }

    /// Letters in alphabetical order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, ElementId)> {
        self.map.iter().map(|(a, &x)| (a.as_str(), x))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
