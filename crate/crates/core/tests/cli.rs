//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn symgrass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symgrass"))
        .args(args)
        .env_remove("SYMGRASS_CACHE")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn enumerate_is_deterministic_and_reuses_the_cache() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let first = symgrass(&["enumerate", "--n", "2", "--p", "3", "--out", path(out)]);
    assert_eq!(code(&first), 0);
    assert!(String::from_utf8_lossy(&first.stderr).contains("0 levels reused, 2 written"));
    let csv = fs::read(out.join("counts_n2_p3.csv")).unwrap();
    let cache = fs::read(out.join("cache/grassmannian_n2_p3_k1.json")).unwrap();

    let second = symgrass(&["enumerate", "--n", "2", "--p", "3", "--out", path(out)]);
    assert_eq!(code(&second), 0);
    assert!(String::from_utf8_lossy(&second.stderr).contains("2 levels reused, 0 written"));
    assert_eq!(fs::read(out.join("counts_n2_p3.csv")).unwrap(), csv);
    assert_eq!(fs::read(out.join("cache/grassmannian_n2_p3_k1.json")).unwrap(), cache);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn truncated_cache_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("c");
    assert_eq!(code(&symgrass(&["enumerate", "--n", "2", "--p", "2", "--cache", path(&cache)])), 0);
    let file = cache.join("grassmannian_n2_p2_k0.json");
    let bytes = fs::read(&file).unwrap();
    fs::write(&file, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(code(&symgrass(&["enumerate", "--n", "2", "--p", "2", "--cache", path(&cache)])), 2);
}

#[test]
fn outside_the_grid_is_a_usage_error() {
    assert_eq!(code(&symgrass(&["enumerate", "--n", "9", "--p", "2"])), 2);
    assert_eq!(code(&symgrass(&["enumerate", "--n", "2", "--p", "7"])), 2);
    assert_eq!(code(&symgrass(&["verify", "--n", "2", "--p", "2", "--suite", "nonsense"])), 2);
    assert_eq!(code(&symgrass(&["verify", "--n", "2", "--p", "2", "--k", "2"])), 2);
    assert_eq!(code(&symgrass(&["frobnicate"])), 2);
}

#[test]
fn infeasible_single_suite_is_skipped_with_code_two() {
    let o = symgrass(&["verify", "--n", "3", "--p", "3", "--suite", "classification"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("SKIP"));
}

#[test]
fn passing_suite_writes_reports() {
    let dir = TempDir::new().unwrap();
    let o = symgrass(&[
        "verify", "--n", "2", "--p", "2", "--suite", "reconstruction", "--trials", "3", "--out", path(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("report_reconstruction_n2_p2.csv")).unwrap();
    assert!(csv.starts_with("lemma,n,p,k,expected,actual,pass"));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report_reconstruction_n2_p2.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
}

#[test]
fn failing_suite_exits_one() {
    // the classification family at k = 0 is not the oracle's answer
    let o = symgrass(&["verify", "--n", "2", "--p", "2", "--suite", "classification", "--k", "0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn induce_then_reconstruct_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let o = symgrass(&["random-collineation", "--n", "3", "--p", "2", "--seed", "4", "--out", path(out)]);
    assert_eq!(code(&o), 0);
    let emb = out.join("embedding_n3_p2_seed4.json");
    assert_eq!(code(&symgrass(&["induce", path(&emb), "--k", "2", "--out", path(out)])), 0);
    assert_eq!(code(&symgrass(&["induce", path(&emb), "--k", "3", "--out", path(out)])), 2);

    let map = out.join("map_n3_p2_k2.json");
    let rec = out.join("rec");
    let o = symgrass(&["reconstruct", path(&map), "--out", path(&rec)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let original: serde_json::Value = serde_json::from_slice(&fs::read(&emb).unwrap()).unwrap();
    let recovered: serde_json::Value = serde_json::from_slice(&fs::read(rec.join("embedding.json")).unwrap()).unwrap();
    assert_eq!(original, recovered);
    let cert: serde_json::Value = serde_json::from_slice(&fs::read(rec.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], true);

    // rerunning gives identical bytes
    let again = out.join("again");
    assert_eq!(code(&symgrass(&["reconstruct", path(&map), "--out", path(&again)])), 0);
    assert_eq!(fs::read(rec.join("certificate.json")).unwrap(), fs::read(again.join("certificate.json")).unwrap());
}

#[test]
fn corrupted_map_fails_with_a_witness() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    symgrass(&["random-collineation", "--n", "2", "--p", "3", "--out", path(out)]);
    let emb = out.join("embedding_n2_p3_seed0.json");
    assert_eq!(code(&symgrass(&["induce", path(&emb), "--k", "1", "--out", path(out)])), 0);
    let map_path = out.join("map_n2_p3_k1.json");
    let mut map: serde_json::Value = serde_json::from_slice(&fs::read(&map_path).unwrap()).unwrap();
    // no nontrivial transposition of lines preserves adjacency
    let (x, y) = (map["table"][0][1].clone(), map["table"][1][1].clone());
    map["table"][0][1] = y;
    map["table"][1][1] = x;
    fs::write(&map_path, serde_json::to_vec(&map).unwrap()).unwrap();

    let rec = out.join("rec");
    let o = symgrass(&["reconstruct", path(&map_path), "--out", path(&rec)]);
    assert_eq!(code(&o), 1);
    let cert: serde_json::Value = serde_json::from_slice(&fs::read(rec.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], false);
    assert!(!rec.join("embedding.json").exists());
    let text = cert.to_string();
    assert!(text.contains("\"witness\":{") || text.contains("\"witness\":["), "{text}");
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, b"{\"source\":").unwrap();
    assert_eq!(code(&symgrass(&["reconstruct", path(&bad)])), 2);
    assert_eq!(code(&symgrass(&["induce", path(&bad), "--k", "0"])), 2);
    assert_eq!(code(&symgrass(&["reconstruct", path(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn help_lists_the_grid() {
    for args in [vec!["--help"], vec!["verify", "--help"], vec!["reconstruct", "--help"]] {
        let o = symgrass(&args);
        assert_eq!(code(&o), 0);
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.contains("Feasibility grid") && text.contains("Exit codes"), "{text}");
    }
}
