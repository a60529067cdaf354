//! Separation, covering and pointlike sets, with self-checkable certificates.
//!
//! Everything here is driven by `Sat`, the saturation of the letter
//! singletons `{h(a)}` in the power monoid. `K` and `L` are separable iff no
//! member of `Sat` meets both `F_K` and `F_L`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{AlgebraError, ElementId, LetterMap, OrdinalMonoidPresentation};
use crate::format::PresentationFile;
use crate::merge::MergeMonoid;
use crate::powerset::{PowerMonoid, SubsetElement};
use crate::saturation::{replay_rule, saturate, Provenance, SaturationResult};

/// `(M, h, F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageRecognizer {
    pub presentation: OrdinalMonoidPresentation,
    pub letters: LetterMap,
    /// Sorted by index.
    pub accepting: Vec<ElementId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecisionError {
    #[error("recognizers use different presentations or letter maps; build a joint recognizer (for example the product of the two monoids) and give both accepting sets over it")]
    NotJoint,
    #[error("letter `{letter}` maps outside the carrier")]
    LetterOutOfCarrier { letter: String },
    #[error("accepting element {0} is outside the carrier")]
    AcceptingOutOfCarrier(usize),
    #[error("no accepting set named `{0}`")]
    UnknownLanguage(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl LanguageRecognizer {
    pub fn new(
        presentation: OrdinalMonoidPresentation,
        letters: LetterMap,
        accepting: impl IntoIterator<Item = ElementId>,
    ) -> Result<Self, DecisionError> {
        for (a, x) in letters.iter() {
            if x.0 >= presentation.len() {
                return Err(DecisionError::LetterOutOfCarrier {
                    letter: a.to_string(),
                });
            }
        }
        let accepting: BTreeSet<ElementId> = accepting.into_iter().collect();
        if let Some(x) = accepting.iter().find(|x| x.0 >= presentation.len()) {
            return Err(DecisionError::AcceptingOutOfCarrier(x.0));
        }
        Ok(LanguageRecognizer {
            presentation,
            letters,
            accepting: accepting.into_iter().collect(),
        })
    }

    pub fn from_file(file: &PresentationFile, name: &str) -> Result<Self, DecisionError> {
        let set = file
            .accepting(name)
            .ok_or_else(|| DecisionError::UnknownLanguage(name.to_string()))?;
        Self::new(
            file.presentation.clone(),
            file.letters.clone(),
            set.iter().copied(),
        )
    }

    pub fn accepts(&self, x: ElementId) -> bool {
        self.accepting.binary_search(&x).is_ok()
    }

    fn same_context(&self, other: &LanguageRecognizer) -> bool {
        self.presentation == other.presentation && self.letters == other.letters
    }
}

/// `Sat` together with the letter behind each seed.
#[derive(Clone, Debug)]
pub struct LetterSaturation {
    /// `seed_letters[i]` is the letter whose image seeded `sat.seeds()[i]`.
    pub seed_letters: Vec<String>,
    pub sat: SaturationResult<SubsetElement>,
}

impl LetterSaturation {
    pub fn members(&self) -> &[SubsetElement] {
        self.sat.members()
    }

    pub fn provenance(&self) -> &[Provenance] {
        self.sat.provenance()
    }
}

/// Saturates the letter singletons, letters in alphabetical order.
pub fn saturate_letters(p: &OrdinalMonoidPresentation, letters: &LetterMap) -> LetterSaturation {
    let power = PowerMonoid::new(p);
    let seed_letters: Vec<String> = letters.iter().map(|(a, _)| a.to_string()).collect();
    let seeds: Vec<SubsetElement> = letters.iter().map(|(_, x)| power.singleton(x)).collect();
    LetterSaturation {
        seed_letters,
        sat: saturate(&power, &seeds),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
}

/// A member of `Sat` meeting every accepting set, with one marked element
/// per set (the least in index order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocking {
    pub member: usize,
    pub set: SubsetElement,
    pub marked: Vec<ElementId>,
}

/// Evidence for a verdict: the stored `Sat`, the accepting sets in question,
/// and the blocking member if the answer is no.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub saturation: LetterSaturation,
    pub accepting: Vec<Vec<ElementId>>,
    pub blocking: Option<Blocking>,
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        if self.blocking.is_some() {
            Verdict::No
        } else {
            Verdict::Yes
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeparationOutcome {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct CoverOutcome {
    pub verdict: Verdict,
    pub certificate: Certificate,
    /// No languages to cover with: answered yes without a scan.
    pub trivially_yes: bool,
}

/// The first member of `Sat`, in discovery order, meeting every set.
fn find_blocking(sat: &LetterSaturation, sets: &[Vec<ElementId>]) -> Option<Blocking> {
    sat.members().iter().enumerate().find_map(|(i, x)| {
        let marked: Option<Vec<ElementId>> = sets
            .iter()
            .map(|f| f.iter().copied().find(|&e| x.contains(e)))
            .collect();
        marked.map(|marked| Blocking {
            member: i,
            set: x.clone(),
            marked,
        })
    })
}

/// Decides whether `K` and `L` can be separated by a first-order definable
/// language.
pub fn separate(
    k: &LanguageRecognizer,
    l: &LanguageRecognizer,
) -> Result<SeparationOutcome, DecisionError> {
    if !k.same_context(l) {
        return Err(DecisionError::NotJoint);
    }
    let saturation = saturate_letters(&k.presentation, &k.letters);
    let accepting = vec![k.accepting.clone(), l.accepting.clone()];
    let blocking = find_blocking(&saturation, &accepting);
    let certificate = Certificate {
        saturation,
        accepting,
        blocking,
    };
    Ok(SeparationOutcome {
        verdict: certificate.verdict(),
        certificate,
    })
}

/// Decides whether `L` is covered by first-order definable languages each
/// disjoint from one of `K_1, …, K_n`, i.e. whether no member of `Sat`
/// meets `F_L` and all of the `F_{K_i}`.
pub fn cover(
    l: &LanguageRecognizer,
    ks: &[LanguageRecognizer],
) -> Result<CoverOutcome, DecisionError> {
    if ks.iter().any(|k| !k.same_context(l)) {
        return Err(DecisionError::NotJoint);
    }
    let saturation = saturate_letters(&l.presentation, &l.letters);
    let mut accepting = vec![l.accepting.clone()];
    accepting.extend(ks.iter().map(|k| k.accepting.clone()));
    let trivially_yes = ks.is_empty();
    let blocking = if trivially_yes {
        None
    } else {
        find_blocking(&saturation, &accepting)
    };
    let certificate = Certificate {
        saturation,
        accepting,
        blocking,
    };
    Ok(CoverOutcome {
        verdict: certificate.verdict(),
        certificate,
        trivially_yes,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("seed {seed}: letter `{letter}` does not produce the stored seed")]
    BadSeed { seed: usize, letter: String },
    #[error("member {member}: provenance {rule:?} does not reproduce it")]
    BadProvenance { member: usize, rule: Provenance },
    #[error("member {member} is listed twice")]
    DuplicateMember { member: usize },
    #[error("the stored family is not closed: {0}")]
    NotClosed(String),
    #[error("blocking member {0} is not in the stored family")]
    DanglingBlocking(usize),
    #[error("marked element {element} is not in both the blocking set and accepting set {set}")]
    BadMark { set: usize, element: usize },
    #[error("member {0} meets every accepting set, contradicting the yes verdict")]
    MissedBlocking(usize),
}

/// Re-checks a certificate against the recognizer context.
///
/// Every member is replayed from its provenance; for a no verdict the
/// blocking member and its marks are checked, for a yes verdict the family
/// is checked to be closed and re-scanned.
pub fn check_certificate(
    cert: &Certificate,
    p: &OrdinalMonoidPresentation,
    letters: &LetterMap,
) -> Result<(), CertificateError> {
    let power = PowerMonoid::new(p);
    let sat = &cert.saturation;
    let seeds = sat.sat.seeds();
    if seeds.len() != sat.seed_letters.len() {
        return Err(CertificateError::BadSeed {
            seed: seeds.len().min(sat.seed_letters.len()),
            letter: String::new(),
        });
    }
    for (i, (seed, letter)) in seeds.iter().zip(&sat.seed_letters).enumerate() {
        match letters.get(letter) {
            Some(x) if *seed == power.singleton(x) => {}
            _ => {
                return Err(CertificateError::BadSeed {
                    seed: i,
                    letter: letter.clone(),
                })
            }
        }
    }
    let members = sat.members();
    let mut seen = std::collections::HashSet::new();
    for (i, rule) in sat.provenance().iter().enumerate() {
        if !seen.insert(&members[i]) {
            return Err(CertificateError::DuplicateMember { member: i });
        }
        match replay_rule(&power, seeds, members, i, rule) {
            Some(x) if x == members[i] => {}
            _ => {
                return Err(CertificateError::BadProvenance {
                    member: i,
                    rule: *rule,
                })
            }
        }
    }
    match &cert.blocking {
        Some(b) => {
            if members.get(b.member) != Some(&b.set) {
                return Err(CertificateError::DanglingBlocking(b.member));
            }
            if b.marked.len() != cert.accepting.len() {
                return Err(CertificateError::BadMark {
                    set: b.marked.len(),
                    element: usize::MAX,
                });
            }
            for (i, (&x, f)) in b.marked.iter().zip(&cert.accepting).enumerate() {
                if !b.set.contains(x) || !f.contains(&x) {
                    return Err(CertificateError::BadMark {
                        set: i,
                        element: x.0,
                    });
                }
            }
        }
        None => {
            let required: Vec<SubsetElement> = std::iter::once(power.unit())
                .chain(letters.iter().map(|(_, x)| power.singleton(x)))
                .collect();
            for r in &required {
                if !seen.contains(r) {
                    return Err(CertificateError::NotClosed(format!(
                        "missing {}",
                        power.describe(r)
                    )));
                }
            }
            for x in members {
                let mut produced = vec![power.merge(x), power.omega(x)];
                for y in members {
                    produced.push(power.mul(x, y));
                }
                if let Some(z) = produced.iter().find(|z| !seen.contains(z)) {
                    return Err(CertificateError::NotClosed(format!(
                        "{} is produced from {} but not stored",
                        power.describe(z),
                        power.describe(x)
                    )));
                }
            }
            // An empty list of accepting sets comes from a trivial cover.
            if cert.accepting.len() > 1 {
                if let Some(b) = find_blocking(sat, &cert.accepting) {
                    return Err(CertificateError::MissedBlocking(b.member));
                }
            }
        }
    }
    Ok(())
}

/// The ∅-free downward closure of `Sat` under inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointlikeFamily {
    pub sets: BTreeSet<SubsetElement>,
}

impl PointlikeFamily {
    pub fn contains(&self, x: &SubsetElement) -> bool {
        self.sets.contains(x)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Members not strictly contained in another member.
    pub fn maximal(&self) -> Vec<&SubsetElement> {
        self.sets
            .iter()
            .filter(|x| !self.sets.iter().any(|y| y != *x && x.is_subset(y)))
            .collect()
    }
}

/// The pointlike sets of `h`: every nonempty subset of a member of `Sat`.
pub fn pointlikes(p: &OrdinalMonoidPresentation, letters: &LetterMap) -> PointlikeFamily {
    let sat = saturate_letters(p, letters);
    let mut sets = BTreeSet::new();
    for x in sat.members() {
        if sets.contains(x) {
            continue;
        }
        sets.extend(x.nonempty_subsets());
    }
    PointlikeFamily { sets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::fig2;

    fn rec(names: &[&str]) -> LanguageRecognizer {
        let p = fig2();
        let set: Vec<ElementId> = names.iter().map(|n| p.id(n).unwrap()).collect();
        LanguageRecognizer::new(p, LetterMap::from_pairs([("a", ElementId(1))]), set).unwrap()
    }

    #[test]
    fn worked_example_verdicts() {
        let j = rec(&["a^w", "a^w.a.a"]);
        let k = rec(&["a^w.a"]);
        let l = rec(&["1", "a^w"]);

        let jk = separate(&j, &k).unwrap();
        assert_eq!(jk.verdict, Verdict::No);
        let b = jk.certificate.blocking.as_ref().unwrap();
        let p = &j.presentation;
        assert_eq!(b.set.display(p).to_string(), "{a^w.a,a^w.a.a}");
        assert_eq!(check_certificate(&jk.certificate, p, &j.letters), Ok(()));

        let kl = separate(&k, &l).unwrap();
        assert_eq!(kl.verdict, Verdict::Yes);
        assert_eq!(check_certificate(&kl.certificate, p, &k.letters), Ok(()));

        assert_eq!(separate(&k, &j).unwrap().verdict, Verdict::No);
        assert_eq!(
            separate(&rec(&[]), &rec(&[])).unwrap().verdict,
            Verdict::Yes
        );
    }

    #[test]
    fn mutated_certificates_fail() {
        let j = rec(&["a^w", "a^w.a.a"]);
        let k = rec(&["a^w.a"]);
        let mut cert = separate(&j, &k).unwrap().certificate;
        let target = cert.blocking.as_ref().unwrap().member;
        let rule = cert.saturation.sat.provenance()[target];
        let edited = match rule {
            Provenance::Product { left, right } => Provenance::Product {
                left: right,
                right: left,
            },
            other => panic!("unexpected provenance {other:?}"),
        };
        cert.saturation.sat.provenance_mut()[target] = edited;
        let err = check_certificate(&cert, &j.presentation, &j.letters).unwrap_err();
        assert!(
            matches!(err, CertificateError::BadProvenance { .. }),
            "{err}"
        );
    }

    #[test]
    fn truncated_yes_certificate_fails() {
        let k = rec(&["a^w.a"]);
        let l = rec(&["1", "a^w"]);
        let mut cert = separate(&k, &l).unwrap().certificate;
        cert.saturation.sat.truncate(3);
        assert!(matches!(
            check_certificate(&cert, &k.presentation, &k.letters),
            Err(CertificateError::NotClosed(_))
        ));
    }

    #[test]
    fn covering() {
        let j = rec(&["a^w", "a^w.a.a"]);
        let k = rec(&["a^w.a"]);
        let l = rec(&["1", "a^w"]);
        assert_eq!(
            cover(&j, std::slice::from_ref(&k)).unwrap().verdict,
            Verdict::No
        );
        assert_eq!(
            cover(&l, std::slice::from_ref(&k)).unwrap().verdict,
            Verdict::Yes
        );
        let trivial = cover(&l, &[]).unwrap();
        assert!(trivial.trivially_yes);
        assert_eq!(trivial.verdict, Verdict::Yes);
        assert_eq!(
            check_certificate(&trivial.certificate, &l.presentation, &l.letters),
            Ok(())
        );
        assert_eq!(
            cover(&j, &[k.clone(), rec(&["a^w.a.a"])]).unwrap().verdict,
            Verdict::No
        );
        assert_eq!(cover(&j, &[k, rec(&["1"])]).unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn joint_recognizer_required() {
        let k = rec(&["a^w.a"]);
        let mut other = rec(&["a"]);
        other.letters = LetterMap::from_pairs([("a", ElementId(2))]);
        assert_eq!(separate(&k, &other).unwrap_err(), DecisionError::NotJoint);
    }

    #[test]
    fn pointlikes_of_fig2_and_trivial() {
        let p = fig2();
        let letters = LetterMap::from_pairs([("a", ElementId(1))]);
        let pl = pointlikes(&p, &letters);
        let power = PowerMonoid::new(&p);
        assert!(pl.contains(&power.named(&["a^w.a"])));
        assert!(pl.contains(&power.named(&["a^w.a", "a^w.a.a"])));
        assert!(!pl.contains(&power.named(&["a", "a^w"])));
        assert_eq!(pl.len(), 8);

        let t = OrdinalMonoidPresentation::trivial();
        let pl = pointlikes(&t, &LetterMap::new());
        assert_eq!(pl.sets.len(), 1);
    }
}
