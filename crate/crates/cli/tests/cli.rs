mod common;

use std::process::{Command, Stdio};
use std::io::Write;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use common::{q, Beta, Field};
use twisted_hahn::{CocycleSpec, FieldConfig, RationalExponent, SeriesContext, TruncationPolicy, TwistedSeries};
use twisted_hahn_cli::{run, Outcome};

fn run_json(args: &[&str], body: &Value) -> Outcome {
    let body = body.to_string();
    let mut argv = vec!["twisted-hahn"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--json", &body]);
    run(argv, &mut std::io::empty())
}

fn context(p: u32, e: u32, cocycle: Value, cutoff: &str) -> Value {
    json!({
        "field": {"p": p, "e": e, "precision": 16},
        "cocycle": cocycle,
        "truncation": {"max_terms": 64, "cutoff": cutoff},
    })
}

fn carry1() -> Value {
    json!({"kind": "carry", "scale": "1"})
}

fn series(ctx: &Value, terms: &[(&str, &str)]) -> Value {
    let terms: Vec<Value> = terms.iter().map(|(h, c)| json!({"h": h, "coeff": c})).collect();
    json!({"context": ctx, "terms": terms})
}

fn error_kind(out: &Outcome) -> String {
    let v: Value = serde_json::from_str(&out.stdout).expect("error output is JSON");
    v["error"].as_str().expect("error code").to_string()
}

#[test]
fn mismatched_contexts_exit_3() {
    let a = series(&context(5, 1, carry1(), "4"), &[("0", "1")]);
    let b = series(&context(5, 1, json!({"kind": "zero"}), "4"), &[("0", "1")]);
    let out = run_json(&["series", "mul"], &json!({"a": a, "b": b}));
    assert_eq!(out.code, 3, "{}", out.stdout);
    assert_eq!(error_kind(&out), "ContextMismatch");
}

#[test]
fn inverting_zero_exits_4() {
    let a = series(&context(5, 1, carry1(), "4"), &[]);
    let out = run_json(&["series", "inv"], &json!({"a": a}));
    assert_eq!(out.code, 4, "{}", out.stdout);
    let out = run_json(&["padic", "inv"], &json!({"field": {"p": 3, "e": 1, "precision": 8}, "a": "0"}));
    assert_eq!(out.code, 4, "{}", out.stdout);
}

#[test]
fn unknown_fields_are_rejected() {
    let out = run_json(&["group", "cmp"], &json!({"a": {"z": 0, "h": "0"}, "b": {"z": 1, "h": "0"}, "c": 1}));
    assert_eq!(out.code, 2);
    assert_eq!(error_kind(&out), "ParseError");
}

#[test]
fn bad_field_config_exits_2() {
    let out = run_json(&["padic", "inv"], &json!({"field": {"p": 6, "e": 1, "precision": 8}, "a": "1"}));
    assert_eq!(out.code, 2, "{}", out.stdout);
}

#[test]
fn group_cmp_orders_by_exponent_first() {
    let out = run_json(&["group", "cmp"], &json!({"a": {"z": 5, "h": "0"}, "b": {"z": -5, "h": "1/3"}}));
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "{\"cmp\":-1}\n");
}

#[test]
fn series_val_of_zero_is_inf() {
    let a = series(&context(5, 2, carry1(), "4"), &[]);
    let out = run_json(&["series", "val"], &json!({"a": a}));
    assert_eq!(out.stdout, "\"inf\"\n");
    let a = series(&context(5, 2, carry1(), "4"), &[("1/2", "25")]);
    let out = run_json(&["series", "val"], &json!({"a": a}));
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v, json!({"z": 4, "h": "1/2"}));
}

#[test]
fn output_file_leaves_stdout_empty() {
    let dir = std::env::temp_dir().join(format!("twisted-hahn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sum.json");
    let body = json!({"cocycle": carry1(), "a": {"z": 0, "h": "1/2"}, "b": {"z": 0, "h": "1/2"}}).to_string();
    let out = run(
        ["twisted-hahn", "group", "add", "--json", &body, "--output", path.to_str().unwrap()],
        &mut std::io::empty(),
    );
    assert_eq!(out, Outcome { code: 0, stdout: String::new() });
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, "{\"z\":-1,\"h\":\"1\"}\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_twisted-hahn"))
        .args(["group", "neg", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let body = json!({"cocycle": carry1(), "a": {"z": 0, "h": "1/2"}}).to_string();
    child.stdin.take().unwrap().write_all(body.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "{\"z\":1,\"h\":\"-1/2\"}\n");
}

#[test]
fn missing_file_exits_74() {
    let out = run(["twisted-hahn", "series", "val", "--input", "/definitely/not/here.json"], &mut std::io::empty());
    assert_eq!(out.code, 74);
    assert_eq!(error_kind(&out), "IoError");
}

#[test]
fn lift_check_depends_only_on_seed() {
    let go = |image: Value, seed: &str| {
        let body = json!({
            "context": context(5, 2, carry1(), "6"),
            "phi_bar": {"image_of_pi": image},
            "spec": {"q": "1"},
        })
        .to_string();
        run(["twisted-hahn", "lift", "check", "--json", &body, "--seed", seed, "--trials", "15"], &mut std::io::empty())
    };
    let identity = json!({"coords": ["0", "1"]});
    assert_eq!(go(identity.clone(), "4"), go(identity, "4"));
    // pi -> -pi does not fix the section, so the report lists failures
    let flip = json!({"coords": ["0", "-1"]});
    let (a, b) = (go(flip.clone(), "4"), go(flip, "4"));
    assert_eq!(a, b);
    assert_eq!(a.code, 1);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["sigma_compatible"], json!(false));
    // not a root of x^2 - 5
    let out = go(json!("0"), "4");
    assert_eq!(out.code, 2, "{}", out.stdout);
}

#[test]
fn compatible_lift_check_passes() {
    let out = run(
        [
            "twisted-hahn",
            "lift",
            "check",
            "--input",
            concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/lift_check.json"),
            "--trials",
            "10",
        ],
        &mut std::io::empty(),
    );
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["ok"], json!(true));
    assert_eq!(v["trials"], json!(10));
}

#[test]
fn verify_runs_named_suites() {
    let out = run(["twisted-hahn", "verify", "--suite", "cocycle_laws", "--trials", "5"], &mut std::io::empty());
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 1);
    assert_eq!(v["ok"], json!(true));
}

/// Products computed through the command line match the rational oracle.
#[test]
fn series_mul_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = Field { p: 5, e: 2 };
    let ctx = SeriesContext::new(
        FieldConfig::new(5, 2, 16).unwrap(),
        CocycleSpec::carry(RationalExponent::one()).unwrap(),
        TruncationPolicy::new(4096, RationalExponent::from_integer(6)).unwrap(),
    );
    let cutoff = q(6, 1);
    for _ in 0..20 {
        let a = common::random_series(&mut rng, &f, 6, 6, 0, 3);
        let b = common::random_series(&mut rng, &f, 6, 6, 0, 3);
        let body = json!({
            "a": common::to_series(&f, &ctx, &a),
            "b": common::to_series(&f, &ctx, &b),
        });
        let out = run_json(&["series", "mul"], &body);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let got: TwistedSeries = serde_json::from_str(&out.stdout).unwrap();
        let want = common::series_mul(&f, &Beta::Carry(q(1, 1)), &a, &b, &cutoff);
        common::compare(&f, &got, &want, &cutoff).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adding zero reproduces the canonical form of the input.
    #[test]
    fn adding_zero_is_canonical(seed in any::<u64>(), e in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Field { p: 3, e: e as usize };
        let ctx = SeriesContext::new(
            FieldConfig::new(3, e, 12).unwrap(),
            CocycleSpec::carry(RationalExponent::ratio(1, 2)).unwrap(),
            TruncationPolicy::new(64, RationalExponent::from_integer(5)).unwrap(),
        );
        let a = common::to_series(&f, &ctx, &common::random_series(&mut rng, &f, 8, 8, -2, 5));
        let zero = TwistedSeries::zero(&ctx);
        let out = run_json(&["series", "add"], &json!({"a": a, "b": zero}));
        prop_assert_eq!(out.code, 0);
        prop_assert_eq!(out.stdout, format!("{}\n", serde_json::to_string(&a).unwrap()));
    }
}
