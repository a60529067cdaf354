mod common;

use common::{corpus, load};
use ordsep::algebra::ElementId;
use ordsep::format::{parse_presentation, print_presentation};
use ordsep::green::GreenSummary;
use ordsep::powerset::PowerMonoid;

#[test]
fn corpus_has_the_expected_files() {
    let names: Vec<String> = corpus().into_iter().map(|(n, _)| n).collect();
    for want in ["fig2", "trivial", "u1", "limit", "mod2", "mod3"] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
}

#[test]
fn every_presentation_validates() {
    for (name, file) in corpus() {
        let report = file.presentation.validate();
        assert!(report.is_ok(), "{name}: {:?}", report.violations);
    }
}

#[test]
fn print_then_parse_is_the_identity() {
    for (name, file) in corpus() {
        let text = print_presentation(&file);
        let again = parse_presentation(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(again, file, "{name}");
        assert_eq!(print_presentation(&again), text, "{name}");
    }
}

#[test]
fn omega_stable_j_classes_are_h_trivial() {
    for (name, file) in corpus() {
        let g = GreenSummary::compute(&file.presentation);
        for c in &g.j_classes {
            if c.omega_stable {
                assert!(c.h_trivial, "{name}: {:?}", c.members);
            }
        }
    }
}

#[test]
fn omega_values_are_idempotent_and_absorb_powers() {
    for (name, file) in corpus() {
        let p = &file.presentation;
        for x in p.elements() {
            let w = p.omega(x);
            assert_eq!(p.mul(w, w), w, "{name}: {}", p.name(x));
            assert_eq!(p.mul(x, w), w, "{name}: {}", p.name(x));
            assert!(p.is_idempotent(p.idempotent_power(x)), "{name}");
        }
    }
}

#[test]
fn aperiodicity_of_the_corpus() {
    let expected = [
        ("fig2", false),
        ("trivial", true),
        ("u1", true),
        ("limit", true),
        ("mod2", false),
        ("mod3", false),
    ];
    for (name, aperiodic) in expected {
        assert_eq!(load(name).presentation.is_aperiodic(), aperiodic, "{name}");
    }
}

#[test]
fn fig2_matches_the_worked_example() {
    let file = load("fig2");
    let p = &file.presentation;
    assert_eq!(p.len(), 6);
    let id = |n: &str| p.id(n).unwrap();
    assert_eq!(p.omega(id("a")), id("a^w"));
    assert_eq!(p.mul(id("a^w"), id("a")), id("a^w.a"));
    assert_eq!(p.mul(id("a^w.a"), id("a")), id("a^w.a.a"));
    assert_eq!(p.mul(id("a"), id("a^w")), id("a^w"));
    assert_eq!(file.letters.get("a"), Some(id("a")));
    let names = |lang: &str| -> Vec<&str> {
        file.accepting(lang)
            .unwrap()
            .iter()
            .map(|&x: &ElementId| p.name(x))
            .collect()
    };
    assert_eq!(names("J"), ["a^w", "a^w.a.a"]);
    assert_eq!(names("K"), ["a^w.a"]);
    assert_eq!(names("L"), ["1", "a^w"]);
}

#[test]
fn missing_omega_row_names_the_element() {
    let text = std::fs::read_to_string(common::corpus_dir().join("fig2.mon")).unwrap();
    let mutated: String = text
        .lines()
        .filter(|l| !l.starts_with("omega: aa "))
        .map(|l| format!("{l}\n"))
        .collect();
    let err = parse_presentation(&mutated).unwrap_err();
    assert!(err.message.contains("`aa`"), "{err}");
}

#[test]
fn power_presentations_of_small_corpus_validate() {
    for (name, file) in corpus() {
        let power = PowerMonoid::new(&file.presentation)
            .power_presentation(None, 6)
            .unwrap();
        assert!(power.presentation.validate().is_ok(), "{name}");
        assert_eq!(
            power.presentation.len(),
            (1 << file.presentation.len()) - 1,
            "{name}"
        );
    }
}
