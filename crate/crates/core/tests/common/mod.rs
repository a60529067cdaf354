#![allow(dead_code)]

use std::path::PathBuf;

use ordsep::algebra::{ElementId, OrdinalMonoidPresentation};
use ordsep::format::{parse_presentation, PresentationFile};
use ordsep::powerset::{PowerMonoid, SubsetElement};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Every `*.mon` file of the corpus, sorted by file name.
pub fn corpus() -> Vec<(String, PresentationFile)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "mon"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let file = parse_presentation(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (p.file_stem().unwrap().to_string_lossy().into_owned(), file)
        })
        .collect()
}

pub fn load(name: &str) -> PresentationFile {
    corpus()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no corpus file {name}"))
        .1
}

/// Subsets of a carrier of at most 16 elements as bitmasks, with every
/// operation spelled out from the tables of the base monoid.
pub struct Naive<'a> {
    pub p: &'a OrdinalMonoidPresentation,
}

impl<'a> Naive<'a> {
    pub fn new(p: &'a OrdinalMonoidPresentation) -> Self {
        assert!(p.len() <= 16);
        Naive { p }
    }

    pub fn elems(&self, x: u32) -> Vec<ElementId> {
        (0..self.p.len())
            .filter(|i| x >> i & 1 == 1)
            .map(ElementId)
            .collect()
    }

    pub fn mask(&self, xs: impl IntoIterator<Item = ElementId>) -> u32 {
        xs.into_iter().fold(0, |m, x| m | 1 << x.0)
    }

    pub fn all_nonempty(&self) -> Vec<u32> {
        (1..1u32 << self.p.len()).collect()
    }

    pub fn unit(&self) -> u32 {
        1 << self.p.unit().0
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let mut out = 0;
        for a in self.elems(x) {
            for b in self.elems(y) {
                out |= 1 << self.p.mul(a, b).0;
            }
        }
        out
    }

    /// `⋃_{1 ≤ m ≤ len} X^m`.
    pub fn products_up_to(&self, x: u32, len: usize) -> u32 {
        let mut layer = x;
        let mut out = x;
        for _ in 1..len {
            layer = self.mul(layer, x);
            out |= layer;
        }
        out
    }

    /// `{s·t^ω}` over words `s`, `t` of elements of `X` of length at most
    /// `|M| + 1`.
    pub fn omega_lasso(&self, x: u32) -> u32 {
        let words = self.products_up_to(x, self.p.len() + 1);
        let mut out = 0;
        for s in self.elems(words) {
            for t in self.elems(words) {
                out |= 1 << self.p.mul(s, self.p.omega(t)).0;
            }
        }
        out
    }

    /// `⋂_{1 ≤ n ≤ N/2} ⋃_{n ≤ m ≤ N} X^m` with `N = 2^(|M|+1)`.
    pub fn merge_window(&self, x: u32) -> u32 {
        let big = 1usize << (self.p.len() + 1);
        let mut powers = vec![x];
        while powers.len() < big {
            powers.push(self.mul(*powers.last().unwrap(), x));
        }
        let mut out = u32::MAX;
        for n in 1..=big / 2 {
            let tail = powers[n - 1..].iter().fold(0, |m, &p| m | p);
            out &= tail;
        }
        out
    }

    pub fn to_subset(&self, power: &PowerMonoid, x: u32) -> SubsetElement {
        power.subset(self.elems(x))
    }

    pub fn mask_of(&self, x: &SubsetElement) -> u32 {
        self.mask(x.iter())
    }
}
