use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordsep"))
        .args(args)
        .output()
        .unwrap()
}

fn structured(args: &[&str]) -> Value {
    let mut all = vec!["--format", "structured"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect()
}

#[test]
fn separate_reports_the_blocking_set() {
    let v = structured(&["separate", &corpus("fig2.mon"), "J", "K"]);
    assert_eq!(v["command"], "separate");
    assert_eq!(v["verdict"], "no");
    assert_eq!(strings(&v["blocking"]["elements"]), ["a^w.a", "a^w.a.a"]);
    assert_eq!(v["blocking"]["marked"]["J"], "a^w.a.a");
    assert_eq!(v["blocking"]["marked"]["K"], "a^w.a");
    let chain = v["blocking"]["provenance_chain"].as_array().unwrap();
    assert_eq!(chain.last().unwrap()["provenance"]["rule"], "product");
}

#[test]
fn separate_yes_attests_every_member() {
    let v = structured(&["separate", &corpus("fig2.mon"), "K", "L"]);
    assert_eq!(v["verdict"], "yes");
    assert!(v["separator"].is_string());
    for m in v["saturation"].as_array().unwrap() {
        assert!(!m["misses"].as_array().unwrap().is_empty(), "{m}");
    }
}

#[test]
fn witness_at_depth_two_uses_exponents_five_and_six() {
    let v = structured(&["witness", &corpus("fig2.mon"), "J", "K", "--k", "2"]);
    let mut words = [
        v["left"]["word"].as_str().unwrap().to_string(),
        v["right"]["word"].as_str().unwrap().to_string(),
    ];
    words.sort();
    assert_eq!(words, ["a^w . a^5", "a^w . a^6"]);
    assert_eq!(v["derivation_checked"], true);
    assert_eq!(v["derivation"]["k"], 2);
}

#[test]
fn witness_on_separable_languages_is_rejected() {
    let out = run(&["witness", &corpus("fig2.mon"), "K", "L"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_trivial_is_ok() {
    let out = run(&["validate", &corpus("trivial.mon")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ok: true"), "{text}");
}

#[test]
fn malformed_input_exits_with_two_and_a_location() {
    let dir = std::env::temp_dir().join(format!("ordsep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.mon");
    std::fs::write(&path, "elements: 1 a\nunit: 1\nmul: 1 1 1\nmul: 1 b a\n").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.mon:4:"), "{err}");
    let out = run(&["--format", "structured", "validate", path.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "malformed-input");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_language_and_missing_file_are_input_errors() {
    assert_eq!(
        run(&["separate", &corpus("fig2.mon"), "J", "NOPE"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["validate", "/nonexistent/x.mon"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["eval", &corpus("fig2.mon"), "a^"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "approx",
            &corpus("fig2.mon"),
            "--letter",
            "a",
            "--ordinal",
            "w^"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn structured_output_is_deterministic() {
    for args in [
        vec!["saturate", "fig2.mon"],
        vec!["separate", "fig2.mon", "J", "K"],
        vec!["cover", "mod3.mon", "ZERO", "ONE", "TWO"],
        vec!["pointlikes", "mod3.mon"],
        vec!["witness", "fig2.mon", "J", "K", "--k", "3"],
    ] {
        let path = corpus(args[1]);
        let mut full = vec!["--format", "structured", args[0], &path];
        full.extend_from_slice(&args[2..]);
        let a = run(&full);
        let b = run(&full);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn other_subcommands() {
    let v = structured(&["eval", &corpus("fig2.mon"), "(a)^w . a^5"]);
    assert_eq!(v["value"], "a^w.a");
    let v = structured(&[
        "approx",
        &corpus("fig2.mon"),
        "--letter",
        "a",
        "--ordinal",
        "w+1",
    ]);
    assert_eq!(strings(&v["approximant"]), ["a^w.a", "a^w.a.a"]);
    assert_eq!(strings(&v["exact"]), ["a^w.a"]);
    let v = structured(&["aperiodic", &corpus("mod2.mon")]);
    assert_eq!(v["aperiodic"], false);
    let v = structured(&["aperiodic", &corpus("limit.mon")]);
    assert_eq!(v["aperiodic"], true);
    let v = structured(&["greens", &corpus("fig2.mon")]);
    assert_eq!(v["j_classes"].as_array().unwrap().len(), 3);
    let v = structured(&["pointlikes", &corpus("fig2.mon")]);
    assert_eq!(v["count"], 8);
    let v = structured(&[
        "saturate",
        &corpus("fig2.mon"),
        "--seed",
        "a^w",
        "--seed",
        "a,aa",
    ]);
    assert_eq!(v["seeds"], "explicit");
    let v = structured(&["validate", "--power", &corpus("mod3.mon")]);
    assert_eq!(v["power"]["merge_ok"], true);
}

#[test]
fn cover_flags_an_empty_family_of_constraints() {
    let v = structured(&["cover", &corpus("mod2.mon"), "EVEN"]);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["trivially_yes"], true);
    let v = structured(&["cover", &corpus("mod2.mon"), "EVEN", "ODD"]);
    assert_eq!(v["verdict"], "no");
    assert_eq!(v["trivially_yes"], false);
}
