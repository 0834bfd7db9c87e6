use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn run_with(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ckalg"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("CKALG_WORKERS", w),
        None => cmd.env_remove("CKALG_WORKERS"),
    };
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with(args, None)
}

fn validate(schema: &str, doc: &Value) {
    let path = root().join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{}: {errors:#?}", path.display());
}

/// Runs a successful command and checks its output against the schema.
fn ok(schema: &str, args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    validate(schema, &doc);
    doc
}

/// Runs a failing command, checks the exit code and the diagnostic.
fn fails(code: i32, args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&out.stderr).expect("stderr is one JSON document");
    validate("error", &doc);
    doc
}

#[test]
fn check_generator() {
    let doc = ok("check", &["check", &fixture("t4.json")]);
    assert_eq!(doc["all_hold"], true);
    assert_eq!(doc["universe"], 4);
}

#[test]
fn check_reports_broken_star_without_failing() {
    let doc = ok("check", &["check", &fixture("t3_bad_star.json")]);
    assert_eq!(doc["all_hold"], false);
    assert_eq!(doc["axioms"]["p2"]["holds"], false);
}

#[test]
fn spectrum_of_swap_square() {
    let doc = ok("spectrum", &["spectrum", &fixture("t4_sq_swap.json"), "--filters"]);
    assert_eq!(doc["components"][0]["subtype"], "3.3");
    assert_eq!(doc["signature"]["t33"], 1);
    assert_eq!(doc["decomposition"]["t4"], 2);
    assert_eq!(doc["filters"]["a"]["holds"], true);
}

#[test]
fn spectrum_fixtures_validate() {
    for f in ["t2.json", "t3.json", "t3_sq_id.json", "t3_x_t4.json", "t4_swap.json", "t3_sq_swap.json"] {
        ok("spectrum", &["spectrum", &fixture(f)]);
    }
}

#[test]
fn epi_modes() {
    let doc = ok("epi", &["epi", "--from", &fixture("t4.json"), "--onto", &fixture("t4.json")]);
    assert_eq!(doc["count"], "2");
    assert_eq!(doc["bijection"], true);
    let doc = ok("epi", &["epi", "--from", &fixture("t3_sq_id.json"), "--onto", &fixture("t3.json"), "--formula"]);
    assert_eq!(doc["repaired"], "2");
    let doc = ok("epi", &["epi", "--from", &fixture("t4_sq_swap.json"), "--onto", &fixture("t4_sq_swap.json"), "--audit"]);
    assert!(doc["audit"].as_array().unwrap().iter().any(|a| a["agree"] == false));
}

#[test]
fn aut_audit_on_swap_square() {
    let doc = ok("aut", &["aut", &fixture("t4_sq_swap.json"), "--audit"]);
    assert_eq!(doc["count"], "4");
    let printed = &doc["audit"][0];
    assert_eq!(printed["formula"], "24");
    assert_eq!(printed["oracle"], "4");
    assert_eq!(printed["agree"], false);
}

#[test]
fn free_both_for_k1() {
    let doc = ok("free", &["free", "--k", "1", "--n", "1", "--method", "both"]);
    assert_eq!(doc["results"][0]["total"], "48");
    assert_eq!(doc["results"][1]["total"], "48");
    assert_eq!(doc["agree"], true);
}

#[test]
fn free_lattice_method_misses_the_twisted_class() {
    // Cyclic family only: the twisted T₄ (4 elements, α = 1) is absent.
    let doc = ok("free", &["free", "--k", "2", "--n", "1", "--method", "lattice-ie"]);
    assert_eq!(doc["results"][0]["total"], (15_925_248u64 / 4).to_string());
    let doc = ok("free", &["free", "--k", "1", "--n", "2", "--method", "lattice-ie"]);
    assert_eq!(doc["results"][0]["total"], "15925248");
}

#[test]
fn alpha_both_flags_the_printed_fraction() {
    let doc = ok("alpha", &["alpha", "--i", "4", "--d", "2", "--n", "1", "--method", "both"]);
    assert_eq!(doc["entries"][0]["alpha"], "10/4");
    assert_eq!(doc["entries"][0]["integral"], false);
    assert_eq!(doc["entries"][1]["alpha"], "2");
    assert_eq!(doc["agree"], false);
}

#[test]
fn simples_and_audit() {
    let doc = ok("simples", &["simples", "--k", "2", "--n", "1"]);
    assert_eq!(doc["classes"].as_array().unwrap().len(), 7);
    let doc = ok("audit", &["audit"]);
    assert_eq!(doc["totals_agree"], true);
    let doc = ok("audit", &["audit", "--from", &fixture("t3_x_t4.json"), "--onto", &fixture("t3.json")]);
    assert_eq!(doc["kind"], "counts");
}

#[test]
fn free_build_small() {
    let doc = ok("free-build", &["free-build", "--k", "1", "--n", "1", "--tables"]);
    assert_eq!(doc["size"], "48");
    assert_eq!(doc["tables"]["universe"], 48);
}

#[test]
fn exit_codes() {
    let doc = fails(1, &["spectrum", &fixture("malformed.json")]);
    assert_eq!(doc["error"]["kind"], "invalid_input");
    let doc = fails(1, &["spectrum", &fixture("t3_bad_star.json")]);
    assert_eq!(doc["error"]["locus"], "axioms");
    fails(1, &["spectrum", &fixture("missing.json")]);
    fails(1, &["alpha", "--i", "5", "--d", "1", "--n", "1"]);
    let doc = fails(2, &["aut", &fixture("t4_sq_swap.json"), "--cap", "8"]);
    assert_eq!(doc["error"]["flag"], "--cap");
    let doc = fails(2, &["free", "--k", "3", "--n", "1", "--method", "oracle", "--tuple-cap", "10"]);
    assert_eq!(doc["error"]["flag"], "--tuple-cap");
    let doc = fails(2, &["free-build", "--k", "1", "--n", "2"]);
    assert_eq!(doc["error"]["flag"], "--extended");
}

#[test]
fn argument_errors_exit_before_work() {
    for args in [&["nonsense"][..], &["free", "--k", "1"], &["free", "--k", "1", "--n", "1", "--bogus"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn table_format() {
    let out = run(&["--format", "table", "free", "--k", "1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("results[0].total") && l.ends_with("48")));
}

#[test]
fn output_independent_of_workers() {
    let args = ["epi", "--from", &fixture("t3_x_t4.json"), "--onto", &fixture("t3_x_t4.json")];
    let one = run_with(&args, Some("1"));
    let many = run_with(&args, Some("8"));
    assert_eq!(one.stdout, many.stdout);
}
