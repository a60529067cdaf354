//! The `ordsep` command line.
//!
//! Every run builds one JSON record; `--format structured` prints it as is
//! and `--format human` renders the same record as indented text.
//! Exit status: 0 on success (verdicts live in the output), 2 on malformed
//! input, 3 on an internal inconsistency.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{Aperiodicity, ElementId, OrdinalMonoidPresentation};
use crate::decision::{
    check_certificate, cover, pointlikes, saturate_letters, separate, Certificate,
    LanguageRecognizer, LetterSaturation,
};
use crate::format::{parse_presentation, PresentationFile};
use crate::green::GreenSummary;
use crate::merge::{validate_merge_axioms, MergeMonoid};
use crate::ordinal::{
    approximant_parameters, approximate_one_letter, eval_one_letter, Cnf, CnfOrdinal,
};
use crate::powerset::{PowerMonoid, SubsetElement, DEFAULT_POWER_CAP};
use crate::saturation::{saturate, Provenance, SaturationResult};
use crate::witness::construct::{witness_pair, WitnessError};
use crate::witness::derivation::check_derivation_detailed;
use crate::witness::expr::{eval_expr, parse_expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "ordsep",
    version,
    about = "First-order separation for regular languages of countable ordinal words"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: OutputFormat,

    /// Largest base carrier for which the full power monoid is built.
    #[arg(long, global = true, default_value_t = DEFAULT_POWER_CAP)]
    pub cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the presentation laws.
    Validate {
        file: PathBuf,
        /// Also build the power monoid and check the merge laws on it.
        #[arg(long)]
        power: bool,
    },
    /// Green's relations: J-classes with their H-classes and flags.
    Greens { file: PathBuf },
    /// Decide whether every element satisfies x^π = x^(π+1).
    Aperiodic { file: PathBuf },
    /// Saturate seed sets in the power monoid (default: the letter images).
    Saturate {
        file: PathBuf,
        /// A seed set as comma-separated element names; repeatable.
        #[arg(long = "seed")]
        seeds: Vec<String>,
    },
    /// Decide first-order separability of two languages of the file.
    Separate { file: PathBuf, k: String, l: String },
    /// Decide whether L is covered by first-order languages avoiding K1 … Kn.
    Cover {
        file: PathBuf,
        l: String,
        ks: Vec<String>,
    },
    /// Pointlike sets of the letter map.
    Pointlikes { file: PathBuf },
    /// A pair of words in K × L indistinguishable at quantifier depth k.
    Witness {
        file: PathBuf,
        k_lang: String,
        l_lang: String,
        #[arg(long = "k", default_value_t = 2)]
        depth: u32,
    },
    /// Evaluate a word expression such as `(a)^w . a^5`.
    Eval { file: PathBuf, expr: String },
    /// The one-letter approximant of a^κ in the power monoid.
    Approx {
        file: PathBuf,
        #[arg(long)]
        letter: String,
        #[arg(long)]
        ordinal: String,
    },
}

/// What a run produced: exit status and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn status(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "malformed-input",
            Failure::Internal(_) => "internal-inconsistency",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

type Outcome = Result<Value, Failure>;

fn load(path: &Path) -> Result<PresentationFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_presentation(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

fn names(p: &OrdinalMonoidPresentation, xs: impl IntoIterator<Item = ElementId>) -> Vec<String> {
    xs.into_iter().map(|x| p.name(x).to_string()).collect()
}

fn set_names(p: &OrdinalMonoidPresentation, x: &SubsetElement) -> Vec<String> {
    names(p, x.iter())
}

fn recognizer(file: &PresentationFile, name: &str) -> Result<LanguageRecognizer, Failure> {
    LanguageRecognizer::from_file(file, name).map_err(|e| Failure::Input(e.to_string()))
}

fn member_record(
    p: &OrdinalMonoidPresentation,
    index: usize,
    x: &SubsetElement,
    rule: &Provenance,
) -> Value {
    json!({ "index": index, "elements": set_names(p, x), "provenance": rule })
}

fn closure_records(
    p: &OrdinalMonoidPresentation,
    sat: &SaturationResult<SubsetElement>,
) -> Vec<Value> {
    sat.members()
        .iter()
        .zip(sat.provenance())
        .enumerate()
        .map(|(i, (x, r))| member_record(p, i, x, r))
        .collect()
}

/// Indices of the members `member` was built from, including itself.
fn ancestors(sat: &LetterSaturation, member: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack = vec![member];
    while let Some(i) = stack.pop() {
        if out.insert(i) {
            stack.extend(sat.provenance()[i].operands());
        }
    }
    out
}

fn certificate_record(
    p: &OrdinalMonoidPresentation,
    cert: &Certificate,
    languages: &[&str],
) -> Value {
    let sat = &cert.saturation;
    match &cert.blocking {
        Some(b) => {
            let chain: Vec<Value> = ancestors(sat, b.member)
                .into_iter()
                .map(|i| member_record(p, i, &sat.members()[i], &sat.provenance()[i]))
                .collect();
            let marked: serde_json::Map<String, Value> = languages
                .iter()
                .zip(&b.marked)
                .map(|(l, &x)| (l.to_string(), Value::from(p.name(x))))
                .collect();
            json!({
                "blocking": {
                    "index": b.member,
                    "elements": set_names(p, &b.set),
                    "marked": marked,
                    "provenance_chain": chain,
                },
                "saturation_size": sat.members().len(),
            })
        }
        None => {
            let attestation: Vec<Value> = sat
                .members()
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let misses: Vec<&str> = languages
                        .iter()
                        .zip(&cert.accepting)
                        .filter(|(_, f)| !f.iter().any(|&e| x.contains(e)))
                        .map(|(l, _)| *l)
                        .collect();
                    json!({
                        "index": i,
                        "elements": set_names(p, x),
                        "provenance": sat.provenance()[i],
                        "misses": misses,
                    })
                })
                .collect();
            json!({ "saturation": attestation, "saturation_size": sat.members().len() })
        }
    }
}

fn checked(cert: &Certificate, file: &PresentationFile) -> Result<bool, Failure> {
    check_certificate(cert, &file.presentation, &file.letters)
        .map(|_| true)
        .map_err(|e| Failure::Internal(format!("certificate does not re-check: {e}")))
}

fn merge_into(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn cmd_validate(file: &Path, power: bool, cap: usize) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    let report = p.validate();
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| json!({ "axiom": v.axiom.to_string(), "witness": names(p, v.witness.iter().copied()), "count": v.count }))
        .collect();
    let mut out = json!({
        "command": "validate",
        "elements": p.len(),
        "ok": report.is_ok(),
        "violations": violations,
    });
    if power {
        let pp = PowerMonoid::new(p)
            .power_presentation(None, cap)
            .map_err(|e| Failure::Input(e.to_string()))?;
        let view = pp.merge_view();
        let merge_report = validate_merge_axioms(&view, &view.carrier());
        let merge_violations: Vec<Value> = merge_report
            .violations
            .iter()
            .map(|v| json!({ "axiom": format!("{:?}", v.axiom), "witness": names(&pp.presentation, v.witness.iter().copied()), "count": v.count }))
            .collect();
        out = merge_into(
            out,
            json!({ "power": {
                "elements": pp.presentation.len(),
                "presentation_ok": pp.presentation.validate().is_ok(),
                "merge_ok": merge_report.is_ok(),
                "merge_violations": merge_violations,
            }}),
        );
    }
    Ok(out)
}

fn cmd_greens(file: &Path) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    let g = GreenSummary::compute(p);
    let classes: Vec<Value> = g
        .j_classes
        .iter()
        .map(|c| {
            let mut h: Vec<Vec<String>> = Vec::new();
            let mut seen = BTreeSet::new();
            for &x in &c.members {
                if seen.insert(g.h_class[x.0]) {
                    h.push(names(
                        p,
                        c.members.iter().copied().filter(|&y| g.h_equivalent(x, y)),
                    ));
                }
            }
            json!({
                "members": names(p, c.members.iter().copied()),
                "h_classes": h,
                "regular": c.regular,
                "omega_stable": c.omega_stable,
                "h_trivial": c.h_trivial,
            })
        })
        .collect();
    Ok(json!({ "command": "greens", "j_classes": classes }))
}

fn cmd_aperiodic(file: &Path) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    Ok(match p.aperiodicity() {
        Aperiodicity::Aperiodic => json!({ "command": "aperiodic", "aperiodic": true }),
        Aperiodicity::Counterexample(x) => {
            let e = p.idempotent_power(x);
            json!({
                "command": "aperiodic",
                "aperiodic": false,
                "counterexample": {
                    "element": p.name(x),
                    "idempotent_power": p.name(e),
                    "next_power": p.name(p.mul(e, x)),
                },
            })
        }
    })
}

fn parse_seed(
    p: &OrdinalMonoidPresentation,
    power: &PowerMonoid,
    s: &str,
) -> Result<SubsetElement, Failure> {
    let mut out = SubsetElement::empty(p);
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let x = p
            .id(name)
            .ok_or_else(|| Failure::Input(format!("unknown element `{name}` in seed `{s}`")))?;
        out.insert(x);
    }
    if out.is_empty() {
        return Err(Failure::Input(format!("seed `{s}` is empty")));
    }
    Ok(power.subset(out.iter()))
}

fn cmd_saturate(file: &Path, seeds: &[String]) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    let power = PowerMonoid::new(p);
    let (seed_sets, seed_source) = if seeds.is_empty() {
        let sat = saturate_letters(p, &f.letters);
        return Ok(json!({
            "command": "saturate",
            "seeds": "letters",
            "seed_letters": sat.seed_letters,
            "members": closure_records(p, &sat.sat),
        }));
    } else {
        (
            seeds
                .iter()
                .map(|s| parse_seed(p, &power, s))
                .collect::<Result<Vec<_>, _>>()?,
            "explicit",
        )
    };
    let sat = saturate(&power, &seed_sets);
    Ok(json!({
        "command": "saturate",
        "seeds": seed_source,
        "seed_sets": seed_sets.iter().map(|s| set_names(p, s)).collect::<Vec<_>>(),
        "members": closure_records(p, &sat),
    }))
}

const SEPARATOR_NOTE: &str = "no separating formula is synthesised; a separator is S = {u | ρ(σ(u)) ∩ F_K ≠ ∅} for an FO-approximant ρ into the saturation, which exists because no saturation member meets both accepting sets";

fn cmd_separate(file: &Path, k: &str, l: &str) -> Outcome {
    let f = load(file)?;
    let (rk, rl) = (recognizer(&f, k)?, recognizer(&f, l)?);
    let outcome = separate(&rk, &rl).map_err(|e| Failure::Input(e.to_string()))?;
    let ok = checked(&outcome.certificate, &f)?;
    let mut out = json!({
        "command": "separate",
        "languages": [k, l],
        "verdict": outcome.verdict,
        "certificate_checked": ok,
    });
    out = merge_into(
        out,
        certificate_record(&f.presentation, &outcome.certificate, &[k, l]),
    );
    if outcome.certificate.blocking.is_none() {
        out = merge_into(out, json!({ "separator": SEPARATOR_NOTE }));
    }
    Ok(out)
}

fn cmd_cover(file: &Path, l: &str, ks: &[String]) -> Outcome {
    let f = load(file)?;
    let rl = recognizer(&f, l)?;
    let rks = ks
        .iter()
        .map(|k| recognizer(&f, k))
        .collect::<Result<Vec<_>, _>>()?;
    let outcome = cover(&rl, &rks).map_err(|e| Failure::Input(e.to_string()))?;
    let ok = checked(&outcome.certificate, &f)?;
    let mut languages: Vec<&str> = vec![l];
    languages.extend(ks.iter().map(String::as_str));
    let out = json!({
        "command": "cover",
        "language": l,
        "against": ks,
        "verdict": outcome.verdict,
        "trivially_yes": outcome.trivially_yes,
        "certificate_checked": ok,
    });
    Ok(merge_into(
        out,
        certificate_record(&f.presentation, &outcome.certificate, &languages),
    ))
}

fn cmd_pointlikes(file: &Path) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    let pl = pointlikes(p, &f.letters);
    let mut sets: Vec<&SubsetElement> = pl.sets.iter().collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(json!({
        "command": "pointlikes",
        "count": pl.len(),
        "sets": sets.iter().map(|s| set_names(p, s)).collect::<Vec<_>>(),
        "maximal": pl.maximal().iter().map(|s| set_names(p, s)).collect::<Vec<_>>(),
    }))
}

fn cmd_witness(file: &Path, k_lang: &str, l_lang: &str, depth: u32) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    let (rk, rl) = (recognizer(&f, k_lang)?, recognizer(&f, l_lang)?);
    let pair = witness_pair(&rk, &rl, depth).map_err(|e| match e {
        WitnessError::Inconsistent(m) => Failure::Internal(m),
        WitnessError::Separable => Failure::Input(format!(
            "{k_lang} and {l_lang} are separable; there is no witness pair"
        )),
        other => Failure::Input(other.to_string()),
    })?;
    check_derivation_detailed(&pair.derivation)
        .map_err(|e| Failure::Internal(format!("emitted derivation does not check: {e}")))?;
    let value = |e| eval_expr(e, p, &f.letters).map_err(|e| Failure::Internal(e.to_string()));
    let (lv, rv) = (value(&pair.left)?, value(&pair.right)?);
    if !rk.accepts(lv) || !rl.accepts(rv) {
        return Err(Failure::Internal(
            "witness words fall outside their languages".into(),
        ));
    }
    Ok(json!({
        "command": "witness",
        "languages": [k_lang, l_lang],
        "k": depth,
        "blocking": { "index": pair.member, "elements": set_names(p, &pair.set) },
        "left": { "word": pair.left, "value": p.name(lv) },
        "right": { "word": pair.right, "value": p.name(rv) },
        "derivation_checked": true,
        "derivation_size": pair.derivation.size(),
        "derivation": pair.derivation,
    }))
}

fn cmd_eval(file: &Path, expr: &str) -> Outcome {
    let f = load(file)?;
    let e = parse_expr(expr).map_err(|e| Failure::Input(format!("expression: {e}")))?;
    let x =
        eval_expr(&e, &f.presentation, &f.letters).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(json!({
        "command": "eval",
        "expr": e,
        "value": f.presentation.name(x),
    }))
}

fn cmd_approx(file: &Path, letter: &str, ordinal: &str) -> Outcome {
    let f = load(file)?;
    let p = &f.presentation;
    let x = f
        .letters
        .get(letter)
        .ok_or_else(|| Failure::Input(format!("unknown letter `{letter}`")))?;
    let kappa = Cnf::parse(ordinal).map_err(|e| Failure::Input(e.to_string()))?;
    let power = PowerMonoid::new(p);
    let a = power.singleton(x);
    let params =
        approximant_parameters(&power, &a).map_err(|e| Failure::Internal(e.to_string()))?;
    let approx =
        approximate_one_letter(&power, &a, &kappa).map_err(|e| Failure::Internal(e.to_string()))?;
    let exact = eval_one_letter(&power, &a, &kappa);
    if !power.leq(&exact, &approx) {
        return Err(Failure::Internal(
            "exact value is not below the approximant".into(),
        ));
    }
    Ok(json!({
        "command": "approx",
        "letter": letter,
        "ordinal": kappa.to_string(),
        "bounded_form": CnfOrdinal::bounded(&kappa, params.ell),
        "threshold": params.threshold,
        "approximant": set_names(p, &approx),
        "exact": set_names(p, &exact),
    }))
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { file, power } => cmd_validate(file, *power, cli.cap),
        Command::Greens { file } => cmd_greens(file),
        Command::Aperiodic { file } => cmd_aperiodic(file),
        Command::Saturate { file, seeds } => cmd_saturate(file, seeds),
        Command::Separate { file, k, l } => cmd_separate(file, k, l),
        Command::Cover { file, l, ks } => cmd_cover(file, l, ks),
        Command::Pointlikes { file } => cmd_pointlikes(file),
        Command::Witness {
            file,
            k_lang,
            l_lang,
            depth,
        } => cmd_witness(file, k_lang, l_lang, *depth),
        Command::Eval { file, expr } => cmd_eval(file, expr),
        Command::Approx {
            file,
            letter,
            ordinal,
        } => cmd_approx(file, letter, ordinal),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Greens { .. } => "greens",
        Command::Aperiodic { .. } => "aperiodic",
        Command::Saturate { .. } => "saturate",
        Command::Separate { .. } => "separate",
        Command::Cover { .. } => "cover",
        Command::Pointlikes { .. } => "pointlikes",
        Command::Witness { .. } => "witness",
        Command::Eval { .. } => "eval",
        Command::Approx { .. } => "approx",
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) if items.iter().all(is_scalar) => Some(format!(
            "{{{}}}",
            items.iter().map(scalar).collect::<Vec<_>>().join(", ")
        )),
        Value::Object(m) if m.len() <= 3 && m.values().all(is_scalar) => Some(
            m.iter()
                .map(|(k, v)| format!("{k}={}", scalar(v)))
                .collect::<Vec<_>>()
                .join(" "),
        ),
        v if is_scalar(v) => Some(scalar(v)),
        _ => None,
    }
}

fn render(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                match inline(v) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(out, v, indent + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match inline(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render(out, item, indent + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

/// Renders a record as indented `key: value` text.
pub fn render_human(v: &Value) -> String {
    let mut out = String::new();
    render(&mut out, v, 0);
    out
}

fn emit<T: Serialize>(format: OutputFormat, record: &T) -> String {
    let value = serde_json::to_value(record).expect("records are plain data");
    match format {
        OutputFormat::Structured => {
            let mut s = serde_json::to_string_pretty(&value).expect("records are plain data");
            s.push('\n');
            s
        }
        OutputFormat::Human => render_human(&value),
    }
}

pub fn run(cli: &Cli) -> RunOutput {
    match dispatch(cli) {
        Ok(record) => RunOutput {
            status: 0,
            stdout: emit(cli.format, &record),
            stderr: String::new(),
        },
        Err(failure) => {
            let record = json!({
                "command": command_name(&cli.command),
                "error": { "kind": failure.kind(), "message": failure.message() },
            });
            let stdout = match cli.format {
                OutputFormat::Structured => emit(cli.format, &record),
                OutputFormat::Human => String::new(),
            };
            RunOutput {
                status: failure.status(),
                stdout,
                stderr: format!("error: {}\n", failure.message()),
            }
        }
    }
}
