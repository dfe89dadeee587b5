use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hybrid_core::group::{build_group, GroupSpec};
use jsonschema::JSONSchema;
use serde_json::Value;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybrid"))
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("binary runs")
}

fn schema() -> JSONSchema {
    let text = std::fs::read_to_string(crate_dir().join("schemas/report.schema.json")).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::compile(&value).expect("schema compiles")
}

/// Runs, checks the exit code and schema validity, and returns the report.
fn report(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    let schema = schema();
    if let Err(errors) = schema.validate(&v) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{e} at {}", e.instance_path))
            .collect();
        panic!("{args:?} violates the schema: {msgs:?}");
    };
    v
}

#[test]
fn hybrid_s4_v4() {
    let v = report(&["hybrid", "--group", "S4", "--N", "V4", "-p", "3"], 0);
    assert_eq!(v["payload"]["certificate"]["verdict"], true);
    assert_eq!(v["payload"]["certificate"]["n_order"], 4);
    assert_eq!(v["payload"]["shape_text"], "Z3[S3] ⊕ M3(Z3) ⊕ M3(Z3)");
}

#[test]
fn hybrid_negative_is_still_success() {
    let v = report(&["hybrid", "--group", "S4", "--N", "A4", "-p", "3"], 0);
    assert_eq!(v["payload"]["certificate"]["verdict"], false);
    assert_eq!(v["payload"]["shape"], Value::Null);
}

#[test]
fn eimc_case_file() {
    let v = report(&["eimc", "--case", "cases/s4_over_Q.json"], 0);
    let verdict = &v["payload"]["verdict"];
    assert_eq!(verdict["level"], "holds-with-uniqueness");
    let rules: Vec<&str> = verdict["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["rule"].as_str().unwrap())
        .collect();
    assert_eq!(rules, ["R-HYBRID-SYLOW", "R-MU", "R-UNIQ-UP"]);
}

#[test]
fn shipped_cases() {
    for (file, level) in [
        ("s4_p3_asserted.json", "holds-with-uniqueness"),
        ("dicyclic_frobenius_p3.json", "holds"),
        ("modified_affine_16_p5.json", "holds"),
        ("lie_s4_p3.json", "holds-with-uniqueness"),
    ] {
        let v = report(&["eimc", "--case", &format!("cases/{file}")], 0);
        assert_eq!(v["payload"]["verdict"]["level"], level, "{file}");
    }
}

#[test]
fn chartable_trivial() {
    let v = report(&["chartable", "--group", "trivial"], 0);
    assert_eq!(v["payload"]["table"]["values"], serde_json::json!([["1"]]));
    assert_eq!(v["payload"]["structure"], "1");
}

#[test]
fn frobenius_and_iwasawa() {
    let v = report(&["frobenius", "--group", "A4"], 0);
    assert_eq!(
        v["payload"]["structure"]["kernel"]["members"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
    let v = report(&["frobenius", "--group", "S4"], 0);
    assert_eq!(v["payload"]["structure"], Value::Null);
    let v = report(&["iwasawa-shape", "--h", "S4", "--N", "V4", "-p", "3"], 0);
    assert_eq!(v["payload"]["certificate"]["verdict"], true);
    assert!(v["payload"]["shape_text"]
        .as_str()
        .unwrap()
        .starts_with("Z3[[S3⋊Γ]]"));
}

#[test]
fn domain_errors_exit_two() {
    let v = report(&["eimc", "--case", "cases/contradiction.json"], 2);
    assert_eq!(v["error"]["kind"], "contradiction");
    let v = report(&["hybrid", "--group", "Nope7", "--N", "1", "-p", "3"], 2);
    assert_eq!(v["error"]["kind"], "unknown_constructor");
    let v = report(&["hybrid", "--group", "S4", "--N", "C3", "-p", "3"], 2);
    assert_eq!(v["error"]["exit_code"], 2);
    let v = report(&["eimc", "--group", "S4", "-p", "4"], 2);
    assert_eq!(v["error"]["kind"], "parameter");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        "{\n  \"mode\": \"finite_extension\",\n  \"group\": S4\n}\n",
    )
    .unwrap();
    let v = report(&["eimc", "--case", path.to_str().unwrap()], 2);
    assert_eq!(v["error"]["kind"], "malformed_json");
    assert_eq!(v["error"]["line"], 3);
    assert!(v["error"]["column"].as_u64().unwrap() > 0);
}

#[test]
fn order_cap_is_a_domain_error() {
    let v = report(&["--cap", "100", "chartable", "--group", "S5"], 2);
    assert_eq!(v["error"]["kind"], "order_cap");
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["census", "--family", "metacyclic:23", "--primes", "3,5"],
        vec!["eimc", "--case", "cases/dicyclic_frobenius_p3.json"],
        vec!["chartable", "--group", "Aff7"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn echoed_specs_round_trip() {
    for g in [
        "S4",
        "Aff8",
        "Dic3",
        "7:3",
        r#"{"construct":"dihedral","params":{"n":5}}"#,
    ] {
        let v = report(&["chartable", "--group", g], 0);
        let echoed = GroupSpec::from_value(v["request"]["group"].clone()).unwrap();
        let spec = if g.starts_with('{') {
            GroupSpec::from_value(serde_json::from_str(g).unwrap()).unwrap()
        } else {
            GroupSpec::from_shortcut(g).unwrap()
        };
        let original = build_group(&spec).unwrap();
        assert_eq!(
            build_group(&echoed).unwrap().fingerprint(),
            original.fingerprint(),
            "{g}"
        );
    }
}

fn levels(table: &Value) -> Vec<(String, String)> {
    table["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["group"].as_str().unwrap().to_string(),
                r["level"].as_str().unwrap_or("skipped").to_string(),
            )
        })
        .collect()
}

#[test]
fn census_metacyclic_all_hold() {
    let v = report(
        &["census", "--family", "metacyclic:50", "--primes", "3,5,7"],
        0,
    );
    for t in v["payload"]["tables"].as_array().unwrap() {
        for (g, level) in levels(t) {
            assert!(
                level == "holds" || level == "holds-with-uniqueness",
                "{g}: {level}"
            );
        }
        assert_eq!(t["skipped"], 0);
    }
}

#[test]
fn census_affine_rows_hold() {
    let v = report(
        &[
            "census",
            "--family",
            "affine:3,4,5,7,8,9",
            "--primes",
            "3,5,7",
        ],
        0,
    );
    let qs = [3u64, 4, 5, 7, 8, 9];
    for t in v["payload"]["tables"].as_array().unwrap() {
        let p = t["p"].as_u64().unwrap();
        for (q, (g, level)) in qs.iter().zip(levels(t)) {
            if q % p != 0 {
                assert!(
                    level == "holds" || level == "holds-with-uniqueness",
                    "{g} at {p}: {level}"
                );
            }
        }
    }
}

#[test]
fn census_empty_family() {
    let v = report(&["census", "--family", "groups:", "--primes", "3"], 0);
    assert_eq!(v["payload"]["tables"][0]["rows"], serde_json::json!([]));
}

#[test]
fn census_writes_one_table_per_prime() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = report(
        &[
            "census",
            "--family",
            "metacyclic:13",
            "--primes",
            "3,5",
            "--out-dir",
            d,
        ],
        0,
    );
    assert_eq!(v["payload"]["files"].as_array().unwrap().len(), 4);
    for p in [3, 5] {
        let text = std::fs::read_to_string(Path::new(d).join(format!("census_p{p}.json"))).unwrap();
        let t: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(t["p"], p);
        assert!(Path::new(d).join(format!("census_p{p}.md")).exists());
    }
}

#[test]
fn markdown_output() {
    let out = run(&[
        "--format",
        "markdown",
        "eimc",
        "--case",
        "cases/s4_over_Q.json",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("**holds-with-uniqueness**"));
    assert!(text.contains("R-UNIQ-UP"));
}

#[test]
fn report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&[
        "--out",
        path.to_str().unwrap(),
        "frobenius",
        "--group",
        "S3",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(schema().is_valid(&v));
}
