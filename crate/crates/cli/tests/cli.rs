use std::path::{Path, PathBuf};

use mtc_orbifold::models::lattice_modular_data;
use mtc_orbifold_cli::run_with_tolerance;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_tol(args: &[&str], tol: Option<&str>) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mtc-orbifold").chain(args.iter().copied());
    let code = run_with_tolerance(argv, tol, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_tol(args, None)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let r = run(&a);
    (
        r.code,
        serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout)),
    )
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn export(dir: &Path, model: &str) {
    let r = run(&["model", "export", model, "--out", s(dir)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

/// Lattice k = 1 modular data with one off-diagonal entry nudged by `eps`.
fn skewed_md(eps: f64) -> String {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    format!(
        r#"{{"labels":["r0","r1"],"vacuum":0,"S":[[[{h},0],[{},0]],[[{h},0],[{},0]]]}}"#,
        h + eps,
        -h
    )
}

#[test]
fn qdim_lists_four_unit_rows_and_glob_four() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path(), "lattice_k2");
    let md = dir.path().join("lattice_k2.md.json");
    let r = run(&["qdim", s(&md)]);
    assert_eq!(r.code, 0);
    let rows: Vec<&str> = r.stdout.lines().filter(|l| l.starts_with('r')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|l| l.split_whitespace().nth(1) == Some("1")));
    assert!(r.stdout.contains("glob 4 "));

    let (code, v) = json(&["qdim", s(&md)]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["global_dimension"]["value"], 4.0);
    assert_eq!(v["result"]["quantum_dimensions"].as_array().unwrap().len(), 4);
}

#[test]
fn sector_mass_seven() {
    let (code, v) = json(&["sector-mass", "--T", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let x = v["result"]["solution"]["x"].as_array().unwrap();
    assert_eq!(x.len(), 7);
    assert!(x.iter().all(|e| e.as_f64() == Some(0.142857142857)));
}

#[test]
fn asymmetric_s_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", &skewed_md(0.01));
    let r = run(&["check", s(&bad)]);
    assert_eq!(r.code, 1, "{}{}", r.stdout, r.stderr);
    let line = r.stdout.lines().find(|l| l.starts_with("symmetry")).unwrap();
    assert!(line.contains("FAIL") && line.contains("0.01"), "{line}");

    let (code, v) = json(&["check", s(&bad)]);
    assert_eq!(code, 1);
    let checks = v["result"]["validation"]["checks"].as_array().unwrap();
    let sym = checks.iter().find(|c| c["name"] == "symmetry").unwrap();
    assert_eq!(sym["pass"], false);
    assert!((sym["deviation"].as_f64().unwrap() - 0.01).abs() < 1e-9);
}

#[test]
fn tolerance_override_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let md = write(dir.path(), "md.json", &skewed_md(1e-5));
    assert_eq!(run_tol(&["check", s(&md)], None).code, 1);
    assert_eq!(run_tol(&["check", s(&md)], Some("1e-3")).code, 0);
    let r = run_tol(&["check", s(&md)], Some("loose"));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("MTC_TOLERANCE"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\n  \"labels\": [\"a\",\n  }\n");
    let r = run(&["glob", s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3, column 3"), "{}", r.stderr);

    let (code, v) = json(&["glob", s(&bad)]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "input");

    // valid JSON, wrong schema
    let wrong = write(
        dir.path(),
        "wrong.json",
        r#"{"labels": ["a"], "vacuum": 0, "S": [[[1,0]]], "extra": 1}"#,
    );
    assert_eq!(run(&["glob", s(&wrong)]).code, 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["glob", s(&missing)]).code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["qdim"]).code, 2);
    assert_eq!(run(&["sector-mass", "--T", "3", "--bogus"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["double", "--group", "S3"]).code, 2);
    assert_eq!(run(&["qdim-limit", "--model-pair", "nope"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("orbifold"));
}

#[test]
fn fusion_of_a_single_label() {
    let dir = tempfile::tempdir().unwrap();
    let md = write(dir.path(), "k3.json", &lattice_modular_data(3).unwrap().to_json());
    let r = run(&["fusion", s(&md), "--of", "r2"]);
    assert_eq!(r.code, 0);
    // Z_6 group ring
    for (b, c) in [(0, 2), (3, 5), (4, 0), (5, 1)] {
        let row = format!("r2    r{b}     r{c}");
        assert!(r.stdout.contains(&row), "{row} missing in\n{}", r.stdout);
    }
    let (code, v) = json(&["fusion", s(&md)]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["products"].as_array().unwrap().len(), 36);
    assert_eq!(v["result"]["axioms"], "ok");
    assert_eq!(run(&["fusion", s(&md), "--of", "zz"]).code, 2);
}

#[test]
fn orbifold_on_exported_bundles() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["lattice_k3", "holomorphic_T4"] {
        export(dir.path(), model);
        let md = dir.path().join(format!("{model}.md.json"));
        let desc = dir.path().join(format!("{model}.orbifold.json"));
        let (code, v) = json(&["orbifold", s(&md), s(&desc)]);
        assert_eq!(code, 0, "{v}");
        let ids: Vec<&str> = v["result"]["identities"]["identities"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["id"].as_str().unwrap())
            .collect();
        assert_eq!(
            ids,
            [
                "glob_vg_equals_g_squared_glob_v",
                "glob_v_orbit_sum",
                "g_glob_v_union_sum",
                "glob_vg_irreducible_sum"
            ]
        );
    }
    let derived = json(&[
        "orbifold",
        s(&dir.path().join("lattice_k3.md.json")),
        s(&dir.path().join("lattice_k3.orbifold.json")),
    ])
    .1;
    assert_eq!(
        derived["result"]["derived"]["irreducibles"].as_array().unwrap().len(),
        10
    );
}

#[test]
fn orbifold_identity_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path(), "lattice_k2");
    let desc_path = dir.path().join("lattice_k2.orbifold.json");
    let mut desc: Value = serde_json::from_str(&std::fs::read_to_string(&desc_path).unwrap()).unwrap();
    // claim a twisted quantum dimension of 2 instead of sqrt 2
    for m in desc["sectors"]["1"].as_array_mut().unwrap() {
        m["qdim"] = 2.0.into();
    }
    let bad = write(dir.path(), "bad.orbifold.json", &desc.to_string());
    let (code, v) = json(&["orbifold", s(&dir.path().join("lattice_k2.md.json")), s(&bad)]);
    assert_eq!(code, 1);
    assert_eq!(v["pass"], false);
    let failed: Vec<&str> = v["result"]["identities"]["identities"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"g_glob_v_union_sum"), "{failed:?}");
}

#[test]
fn double_of_klein_four() {
    let (code, v) = json(&["double", "--group", "Z2xZ2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["irreps"].as_array().unwrap().len(), 16);
    assert_eq!(v["result"]["fusion"]["products"].as_array().unwrap().len(), 256);
    assert_eq!(v["result"]["isomorphism"]["pass"], true);
    let r = run(&["double", "--group", "Z3"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("coassociative"));
}

#[test]
fn qdim_limits() {
    let (code, v) = json(&["qdim-limit", "--model-pair", "heisenberg_d2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["limit"]["kind"], "divergent");
    let (code, v) = json(&["qdim-limit", "--model-pair", "lattice_k4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["limit"]["value"], 2.0);
    let (code, v) = json(&[
        "qdim-limit",
        "--model-pair",
        "lattice(2,1)/lattice(2,0)",
        "--strategy",
        "raw",
    ]);
    assert_eq!(code, 0);
    assert!((v["result"]["limit"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    // raw grid never reaches the divergence threshold here
    let (code, v) = json(&["qdim-limit", "--model-pair", "heisenberg_d1", "--strategy", "raw"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["limit"]["kind"], "inconclusive");
}

#[test]
fn character_dump_and_eval() {
    let r = run(&["char", "--model", "heisenberg(1)", "--terms", "4", "--dump"]);
    assert_eq!(r.code, 0);
    // 1/eta = q^{-1/24} (1 + q + 2q^2 + 3q^3 + 5q^4 + ...), exponents up to 4 kept
    let dump: Vec<&str> = r.stdout.lines().filter(|l| l.contains('\t')).collect();
    assert_eq!(
        dump,
        ["-1/24\t1/1", "23/24\t1/1", "47/24\t2/1", "71/24\t3/1", "95/24\t5/1"]
    );
    let (code, v) = json(&["char", "--model", "lattice_twisted(2)", "--eval", "1.5"]);
    assert_eq!(code, 0);
    assert!(v["result"]["value"].as_f64().unwrap() > 0.0);
    assert_eq!(run(&["char", "--model", "lattice(2,9)"]).code, 2);
}

#[test]
fn export_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out");
    let r = run(&["model", "export", "heisenberg_d1", "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(out.join("heisenberg_d1.characters.json").exists());
    export(dir.path(), "holomorphic_T3");
    let md = dir.path().join("holomorphic_T3.md.json");
    assert_eq!(run(&["check", s(&md)]).code, 0);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path(), "lattice_k4");
    let md = dir.path().join("lattice_k4.md.json");
    let desc = dir.path().join("lattice_k4.orbifold.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["orbifold", s(&md), s(&desc), "--format", "json"],
        vec!["orbifold", s(&md), s(&desc)],
        vec!["fusion", s(&md), "--format", "json"],
        vec!["double", "--group", "Z6", "--format", "json"],
        vec!["sector-mass", "--T", "64", "--format", "json"],
        vec!["char", "--model", "lattice(4,3)", "--eval", "0.7", "--dump"],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn floats_have_at_most_twelve_significant_digits() {
    let (_, v) = json(&["qdim-limit", "--model-pair", "lattice_k2"]);
    assert_eq!(v["result"]["limit"]["value"].to_string(), "1.41421356237");
}
