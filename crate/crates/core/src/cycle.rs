//! Eventually periodic power sequences `x, x², x³, …` in a finite semigroup.

use std::collections::HashMap;
use std::hash::Hash;

/// The power sequence of an element up to its first repetition.
///
/// `powers[i]` holds `x^(i+1)`. The sequence enters its cycle at exponent
/// `index` and repeats with period `period`, so `x^(index + period) = x^index`.
#[derive(Clone, Debug)]
pub struct PowerCycle<T> {
    pub powers: Vec<T>,
    pub index: usize,
    pub period: usize,
}

impl<T: Clone + Eq + Hash> PowerCycle<T> {
    pub fn compute(x: &T, mul: impl Fn(&T, &T) -> T) -> Self {
        let mut seen: HashMap<T, usize> = HashMap::new();
        let mut powers = Vec::new();
        let mut current = x.clone();
        loop {
            let exponent = powers.len() + 1;
            if let Some(&first) = seen.get(&current) {
                return PowerCycle {
                    powers,
                    index: first,
                    period: exponent - first,
                };
            }
            seen.insert(current.clone(), exponent);
            powers.push(current.clone());
            current = mul(&current, x);
        }
    }

    /// `x^n` for any `n >= 1`.
    pub fn power(&self, n: usize) -> &T {
        assert!(n >= 1, "exponent must be positive");
        let n = if n < self.index {
            n
        } else {
            self.index + (n - self.index) % self.period
        };
        &self.powers[n - 1]
    }

    /// The elements of the cycle, starting at `x^index`.
    pub fn cycle(&self) -> &[T] {
        &self.powers[self.index - 1..]
    }

    /// The unique idempotent in the cycle.
    pub fn idempotent(&self, mul: impl Fn(&T, &T) -> T) -> T {
        self.cycle()
            .iter()
            .find(|e| mul(e, e) == **e)
            .cloned()
            .expect("every cycle of a finite semigroup contains an idempotent")
    }

    /// Exponent `n` with `x^n = x^π`, `n >= index`, `n` a multiple of the period.
    pub fn idempotent_exponent(&self) -> usize {
        let mut n = self.period;
        while n < self.index {
            n += self.period;
        }
        n
    }
}
