use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> (Output, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_sha256-dc"))
        .args(args)
        .output()
        .expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out, json)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn table5() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/table5.hex")
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sha256-dc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn collide_reports_every_pair() {
    let (out, j) = run(&[
        "collide",
        "--multiple",
        "3",
        "--count",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["command"], "collide");
    assert_eq!(j["seed"], 7);
    assert_eq!(j["result"]["collisions"], 100);
    let pair = &j["result"]["pairs"][0];
    assert_eq!(pair["variant"], "add_linear");
    assert!(pair["digest"]
        .as_array()
        .unwrap()
        .iter()
        .all(|h| h.as_str().unwrap().len() == 8));
}

#[test]
fn even_multiples_give_identical_messages() {
    let (out, j) = run(&["collide", "--multiple", "2", "--count", "3"]);
    assert_eq!(code(&out), 1);
    assert_eq!(j["result"]["distinct"], 0);
}

#[test]
fn census_matches_single_bit_counts() {
    let (out, j) = run(&["census", "--kind", "sha256-xor", "--steps", "40"]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["result"]["min"], 110);
    assert_eq!(j["result"]["max"], 297);
}

#[test]
fn verify_word_resolves_the_printed_grid() {
    let path = table5();
    let (out, j) = run(&["verify-word", "--file", &path, "--steps", "40"]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["result"]["valid"], true);
    assert_eq!(j["result"]["weight"], 26);
    assert_eq!(j["result"]["layout"], "column-major/lsb-first");
}

#[test]
fn invalid_word_exits_with_one() {
    let path = scratch("bad.hex");
    let mut text = String::new();
    for i in 0..20 {
        text.push_str(&format!("{:08x}\n", if i == 17 { 1 } else { 0 }));
    }
    std::fs::write(&path, text).unwrap();
    let (out, j) = run(&[
        "verify-word",
        "--file",
        path.to_str().unwrap(),
        "--steps",
        "20",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(j["result"]["valid"], false);
    let (out, _) = run(&["extend-word", "--file", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&run(&["no-such-command"]).0), 2);
    assert_eq!(code(&run(&["census", "--bogus"]).0), 2);
    assert_eq!(code(&run(&["census", "--kind", "md5"]).0), 2);
    assert_eq!(code(&run(&["collide", "--seed", "soon"]).0), 2);
}

#[test]
fn search_is_reproducible_and_extends() {
    let word = scratch("w24.hex");
    let args = [
        "search",
        "--steps",
        "24",
        "--iterations",
        "300",
        "--budget-secs",
        "0",
        "--seed",
        "3",
    ];
    let (out, a) = run(&args);
    assert_eq!(code(&out), 0);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", word.to_str().unwrap()]);
    let (_, b) = run(&with_out);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["valid"], true);

    let (out, ext) = run(&[
        "extend-word",
        "--file",
        word.to_str().unwrap(),
        "--steps",
        "30",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(ext["result"]["input_weight"], a["result"]["weight"]);
    assert_eq!(ext["result"]["words"].as_array().unwrap().len(), 30);
}

#[test]
fn table3_totals_and_csv() {
    let csv = scratch("activity.csv");
    let (out, j) = run(&["table3", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["result"]["weight"], 27);
    assert_eq!(j["result"]["total_e"], 84);
    assert_eq!(j["result"]["first16_e"], 20);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("step,maj,ch,e\n0,000,000,0\n1,100,100,2\n"));
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn fig2_writes_sweep_csv() {
    let csv = scratch("sweep.csv");
    let (out, j) = run(&[
        "fig2",
        "--from",
        "16",
        "--to",
        "22",
        "--horizon",
        "20",
        "--iterations",
        "100",
        "--budget-secs",
        "0",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["result"]["all_valid"], true);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("steps,weight,method,seed,iterations\n16,1,searched,0,"));
    assert!(text.contains("\n22,"));
    assert!(text.contains("extended"));
}

#[test]
fn far_window_kernel() {
    let (out, j) = run(&["solve-disturbance", "--window", "far"]);
    assert_eq!(code(&out), 0);
    let g: Vec<&str> = j["result"]["generators"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(g[..4], ["10000000", "a0000000", "c0000000", "a0000000"]);
    assert_eq!(j["result"]["orders"][0], 16);
}

#[test]
fn vectors_match_reference_digests() {
    let (out, j) = run(&["vectors"]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["result"]["vectors"][0]["matches_reference"], true);
    let (out, j) = run(&["vectors", "--variant", "add-linear"]);
    assert_eq!(code(&out), 0);
    assert_eq!(j["result"]["vectors"][0]["matches_reference"], Value::Null);
}

#[test]
fn random_seed_is_recorded() {
    let (out, j) = run(&["table1", "--seed", "random"]);
    assert_eq!(code(&out), 0);
    assert!(j["seed"].is_u64());
    let (_, fixed) = run(&["table1", "--delta", "1", "--start", "5"]);
    assert_eq!(fixed["result"]["rows"][1]["dw"], "fffffffc");
    assert_eq!(fixed["result"]["rows"][1]["step"], 6);
}

#[test]
fn local_collision_estimate_is_reproducible() {
    let args = [
        "local-collision-mc",
        "--trials",
        "20000",
        "--seed",
        "4",
        "--workers",
        "2",
    ];
    let (out, a) = run(&args);
    assert_eq!(code(&out), 0);
    let (_, b) = run(&args);
    assert_eq!(a["result"]["estimate"], b["result"]["estimate"]);
    assert_eq!(a["result"]["approximate_cost"], 9);
}
