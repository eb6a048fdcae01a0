use std::fs;
use std::process::Command;

use liftcov::cli::{run, EXIT_BOUND, EXIT_INVALID, EXIT_NEGATIVE, EXIT_OK, OUT_DIR_ENV};
use liftcov::covers::CoverSpec;
use liftcov::subgroups::Subgroup;
use serde_json::Value;

fn liftcov(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("liftcov").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

const CASE_ONE: &[&str] = &[
    "check",
    "--p",
    "2",
    "--k",
    "1",
    "--n",
    "3",
    "--factors",
    "2,2",
    "--images",
    "1,0;0,1;1,1",
];

#[test]
fn check_case_one_is_liftable() {
    let (code, out, _) = liftcov(CASE_ONE);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("liftable\n"));
    assert!(out.contains("kernel order 1"));
}

#[test]
fn check_constant_cover_on_three_points() {
    // Literal all-ones images do not sum to zero mod 2.
    let base = [
        "check",
        "--p",
        "2",
        "--k",
        "1",
        "--n",
        "3",
        "--factors",
        "2",
    ];
    let (code, _, err) = liftcov(&[&base[..], &["--images", "1;1;1"]].concat());
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("NotSumZero"));

    // The sum-zero version needs a zero image, which only lax mode accepts.
    let ones = [&base[..], &["--images", "1;1;0"]].concat();
    let (code, _, err) = liftcov(&ones);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("ZeroBranchImage"));
    let (code, out, _) = liftcov(&[&ones[..], &["--lax"]].concat());
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.starts_with("not liftable: witness (2 3)"));
}

#[test]
fn text_and_json_agree() {
    let lax_ones = [
        "check",
        "--p",
        "2",
        "--k",
        "1",
        "--n",
        "3",
        "--factors",
        "2",
        "--images",
        "1;1;0",
        "--lax",
    ];
    for args in [CASE_ONE, &lax_ones[..]] {
        let (text_code, text, _) = liftcov(args);
        let (json_code, json, _) = liftcov(&[&["--format", "json"][..], args].concat());
        assert_eq!(text_code, json_code);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(
            v["liftable"].as_bool().unwrap(),
            text.starts_with("liftable")
        );
        match v["witness"].as_str() {
            Some(w) => assert!(text.contains(&format!("witness {w}"))),
            None => assert!(v["witness"].is_null()),
        }
        let spec: CoverSpec = serde_json::from_value(v["spec"].clone()).unwrap();
        let kernel: Subgroup = serde_json::from_value(v["kernel"].clone()).unwrap();
        assert_eq!(spec.kernel().unwrap(), kernel);
        assert_eq!(v["kernel_order"].as_u64().unwrap() as u128, kernel.order());
    }
}

#[test]
fn check_reads_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(
        &good,
        r#"{"p":2,"k":2,"n":4,"factors":[2,4],"images":[[1,1],[0,1],[0,1],[1,1]]}"#,
    )
    .unwrap();
    let (code, out, _) = liftcov(&["check", "--input", good.to_str().unwrap()]);
    assert!(code == EXIT_OK || code == EXIT_NEGATIVE);
    assert!(out.contains("deck group Z_2 x Z_4"));
    assert!(out.contains("kernel order 8"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"p":2,"k":2,"n":4,"factors":[2,4],"images":"#).unwrap();
    let (code, _, err) = liftcov(&[
        "--format",
        "json",
        "check",
        "--input",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_INVALID);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"]["code"], "Parse");

    let (code, _, _) = liftcov(&[
        "check",
        "--input",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn canonical_examples() {
    let (code, out, _) = liftcov(&["canonical", "--p", "2", "--k", "2", "--gens", "2,1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("ell = 1\nr = (0)\nQ = [[1,2],[0,1]]\nomega = (1 2)\n"));

    let (_, out, _) = liftcov(&["canonical", "--p", "3", "--k", "1", "--gens", "1,0;0,1"]);
    assert!(out.contains("Q = [[1,0],[0,1]]\nomega = ()\n"));

    let (_, out, _) = liftcov(&[
        "canonical",
        "--p",
        "3",
        "--k",
        "1",
        "--m",
        "2",
        "--gens",
        "",
    ]);
    assert!(out.starts_with("ell = 0\n"));

    let (code, _, _) = liftcov(&["canonical", "--p", "4", "--k", "1", "--gens", "1"]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn canonical_json_rebuilds() {
    let (_, out, _) = liftcov(&[
        "--format",
        "json",
        "canonical",
        "--p",
        "2",
        "--k",
        "3",
        "--gens",
        "2,4,6;0,4,4",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let c: Subgroup = serde_json::from_value(v["subgroup"].clone()).unwrap();
    assert_eq!(v["order"].as_u64().unwrap() as u128, c.order());
    let again = Subgroup::from_generators(c.ctx(), 3, &[vec![2, 4, 6], vec![0, 4, 4]]).unwrap();
    assert_eq!(c, again);
    assert_eq!(v["triple"]["omega"], c.canonical_triple().omega.to_string());
}

#[test]
fn classify_writes_reproducible_atlas() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = liftcov(&[
        "classify", "--p", "2", "--k", "2", "--n", "4", "--output", d,
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("liftable 3"));
    let path = dir.path().join("census_p2_k2_n4.json");
    let first = fs::read(&path).unwrap();
    liftcov(&[
        "classify", "--p", "2", "--k", "2", "--n", "4", "--output", d,
    ]);
    assert_eq!(first, fs::read(&path).unwrap());

    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["match"], true);
    let lifted = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["liftable"] == true)
        .count();
    assert_eq!(lifted, 3);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert!(!keys.contains(&"elapsed_ms"));

    liftcov(&[
        "classify", "--p", "2", "--k", "2", "--n", "4", "--output", d, "--timing",
    ]);
    let timed: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert!(timed["elapsed_ms"].is_u64());
}

#[test]
fn classify_bound_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = liftcov(&[
        "classify",
        "--p",
        "2",
        "--k",
        "2",
        "--n",
        "12",
        "--bound",
        "1000",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_BOUND);
    assert!(err.contains("BoundExceeded"));
}

#[test]
fn verify_and_audit() {
    let (code, out, _) = liftcov(&["verify", "--grid", "2,3:1:3-5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("all match\n"));
    assert_eq!(out.lines().count(), 7);

    let (code, out, _) = liftcov(&["--format", "json", "verify", "--grid", "2:2:4;2:2:6"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let counts: Vec<u64> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["liftable_classes"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![3, 2]);

    let (code, _, _) = liftcov(&["verify", "--grid", "2:2:8"]);
    assert_eq!(code, EXIT_BOUND);
    let (code, _, _) = liftcov(&["verify", "--grid", "2:2"]);
    assert_eq!(code, EXIT_INVALID);

    let (code, out, _) = liftcov(&["audit", "--p", "2", "--k", "2", "--n", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("no violations\n"));
}

#[test]
fn usage_errors_exit_invalid() {
    assert_eq!(liftcov(&[]).0, EXIT_INVALID);
    assert_eq!(liftcov(&["frobnicate"]).0, EXIT_INVALID);
    assert_eq!(liftcov(&["classify", "--p", "2"]).0, EXIT_INVALID);
    assert_eq!(liftcov(&["--format", "yaml", "verify"]).0, EXIT_INVALID);
    assert_eq!(liftcov(&["--help"]).0, EXIT_OK);
}

#[test]
fn binary_uses_output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_liftcov"))
        .args(["classify", "--p", "3", "--k", "1", "--n", "3"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(dir.path().join("census_p3_k1_n3.json").exists());

    let status = Command::new(env!("CARGO_BIN_EXE_liftcov"))
        .args([
            "check",
            "--p",
            "2",
            "--k",
            "1",
            "--n",
            "3",
            "--factors",
            "2",
            "--images",
            "1;1;0",
            "--lax",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_NEGATIVE));
}
