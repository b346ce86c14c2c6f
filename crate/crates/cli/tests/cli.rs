// Copyright 2026 The ghzdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! End-to-end tests driving the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ghzdist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("ghzdist-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn basis_envelope_shape_and_presets() {
    let doc = run_json(&["basis", "--n", "2", "--preset", "maximal"]);
    assert_eq!(doc["tool"], "ghzdist");
    assert_eq!(doc["command"], "basis");
    assert_eq!(doc["results"]["n"], 2);
    assert_eq!(doc["results"]["kind"], "all_entangled");
    assert_eq!(doc["results"]["pairs"][0]["alpha_sq"], 0.5);
    // Deterministic output carries no timing field by default.
    assert!(doc.get("timing_ms").is_none());

    let doc = run_json(&["basis", "--n", "3", "--preset", "hybrid:2"]);
    assert_eq!(doc["results"]["kind"], "hybrid:2");
    let pairs = doc["results"]["pairs"].as_array().unwrap();
    let products = pairs
        .iter()
        .filter(|p| p["alpha_sq"].as_f64() == Some(1.0))
        .count();
    assert_eq!(products, 2, "two degenerate pairs give four product states");
}

#[test]
fn byte_identical_output_for_identical_seeds() {
    let a = run(&["basis", "--n", "3", "--preset", "random:42"]);
    let b = run(&["basis", "--n", "3", "--preset", "random:42"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");

    let c = run(&["basis", "--n", "3", "--preset", "random:43"]);
    assert_ne!(a.stdout, c.stdout);

    // --seed flag form agrees with the inline form.
    let d = run(&["basis", "--n", "3", "--preset", "random", "--seed", "42"]);
    let da: Value = serde_json::from_slice(&d.stdout).unwrap();
    let aa: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(da["results"], aa["results"]);
}

#[test]
fn basis_file_round_trips_through_analyze() {
    let path = temp_path("bell.json");
    let file_arg = path.to_str().unwrap();
    run_json(&[
        "basis", "--n", "2", "--preset", "maximal", "--out", file_arg,
    ]);

    // The bare payload parses back as a basis input.
    let doc = run_json(&["analyze", "--basis", file_arg, "--set", "all"]);
    let results = &doc["results"];
    assert_eq!(results["status"], "not_perfect");
    assert_eq!(results["set_size"], 4);
    assert_eq!(results["hayashi_bound"], 2);
    assert_eq!(results["structural_bound"], 2);
    let witnesses = results["witnesses"].as_array().unwrap();
    assert_eq!(witnesses.len(), 1);
    assert_eq!(witnesses[0]["kind"], "three_in_a_block");
    std::fs::remove_file(&path).ok();
}

#[test]
fn analyze_hybrid_pair_plus_product_witness() {
    let path = temp_path("hybrid.json");
    let file_arg = path.to_str().unwrap();
    run_json(&[
        "basis", "--n", "3", "--preset", "hybrid:2", "--out", file_arg,
    ]);

    // Max construction (6 states) plus one leftover sign: witnessed via
    // the pair-plus-product pattern somewhere.
    let doc = run_json(&["analyze", "--basis", file_arg, "--set", "all-plus,pair:0:-"]);
    let results = &doc["results"];
    assert_eq!(results["set_size"], 7);
    assert_eq!(results["status"], "conclusive_only");
    let kinds: Vec<&str> = results["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"pair_plus_product"), "kinds: {kinds:?}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn construct_and_simulate_are_perfect() {
    let path = temp_path("b3.json");
    let file_arg = path.to_str().unwrap();
    run_json(&[
        "basis", "--n", "3", "--preset", "maximal", "--out", file_arg,
    ]);

    let doc = run_json(&["construct", "--basis", file_arg, "--verify"]);
    assert_eq!(doc["results"]["size"], 4);
    assert_eq!(doc["results"]["verified_perfect"], true);

    // The analyzer agrees: no witness, both bounds saturated at 4.
    let doc = run_json(&["analyze", "--basis", file_arg, "--set", "all-plus"]);
    assert_eq!(doc["results"]["status"], "perfect_ok");
    assert_eq!(doc["results"]["hayashi_bound"], 4);
    assert_eq!(doc["results"]["structural_bound"], 4);
    assert_eq!(doc["results"]["witnesses"].as_array().unwrap().len(), 0);

    // The same set through the simulate command, fully separated.
    let doc = run_json(&[
        "simulate", "--basis", file_arg, "--set", "all-plus", "--config", "0|1|2",
    ]);
    let min = doc["results"]["min_success"].as_f64().unwrap();
    assert!((min - 1.0).abs() < 1e-12);

    // The worked three-qubit example through the block protocol.
    let doc = run_json(&[
        "simulate",
        "--basis",
        file_arg,
        "--set",
        "pair:0:both,pair:3:both",
        "--config",
        "1|02",
        "--protocol",
        "block",
    ]);
    let min = doc["results"]["min_success"].as_f64().unwrap();
    assert!((min - 1.0).abs() < 1e-12);
    std::fs::remove_file(&path).ok();
}

#[test]
fn blocks_listing_counts() {
    let path = temp_path("b4.json");
    let file_arg = path.to_str().unwrap();
    run_json(&[
        "basis", "--n", "4", "--preset", "maximal", "--out", file_arg,
    ]);
    let doc = run_json(&["blocks", "--basis", file_arg]);
    let rows = doc["results"]["bipartitions"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert_eq!(row["blocks"].as_array().unwrap().len(), 4);
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn sdp_from_basis_and_from_instance_file() {
    let path = temp_path("bell-sdp.json");
    let file_arg = path.to_str().unwrap();
    run_json(&[
        "basis", "--n", "2", "--preset", "maximal", "--out", file_arg,
    ]);

    let doc = run_json(&[
        "sdp", "--basis", file_arg, "--labels", "all", "--cut", "0|1",
    ]);
    let results = &doc["results"];
    assert_eq!(results["converged"], true);
    assert_eq!(results["verdict"], "not_perfect_by_ppt");
    let primal = results["primal"].as_f64().unwrap();
    assert!((primal - 0.5).abs() < 1e-4);
    assert!(results["gap"].as_f64().unwrap() < 1e-6);

    // Same ensemble through an instance file with explicit matrices.
    let h = 0.5f64;
    let phi_plus = vec![
        vec![[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]],
        vec![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        vec![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        vec![[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]],
    ];
    let phi_minus = vec![
        vec![[h, 0.0], [0.0, 0.0], [0.0, 0.0], [-h, 0.0]],
        vec![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        vec![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        vec![[-h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]],
    ];
    let instance = serde_json::json!({
        "cut": "0|1",
        "priors": [0.5, 0.5],
        "states": [phi_plus, phi_minus],
    });
    let ipath = temp_path("instance.json");
    std::fs::write(&ipath, serde_json::to_string(&instance).unwrap()).unwrap();
    let doc = run_json(&["sdp", "--instance", ipath.to_str().unwrap()]);
    // Two orthogonal states: PPT optimum 1.
    let primal = doc["results"]["primal"].as_f64().unwrap();
    assert!((primal - 1.0).abs() < 1e-6);
    assert_eq!(doc["results"]["verdict"], "relaxation_inconclusive");
    std::fs::remove_file(&path).ok();
    std::fs::remove_file(&ipath).ok();

    // Global mode reports no PPT fields.
    let path2 = temp_path("bell-global.json");
    run_json(&[
        "basis",
        "--n",
        "2",
        "--preset",
        "maximal",
        "--out",
        path2.to_str().unwrap(),
    ]);
    let doc = run_json(&[
        "sdp",
        "--basis",
        path2.to_str().unwrap(),
        "--labels",
        "all",
        "--global",
    ]);
    assert!(doc["results"].get("verdict").is_none());
    let primal = doc["results"]["primal"].as_f64().unwrap();
    assert!((primal - 1.0).abs() < 1e-6);
    std::fs::remove_file(&path2).ok();
}

#[test]
fn exit_codes_reflect_completion_not_verdicts() {
    // A not_perfect verdict still exits 0.
    let path = temp_path("bell-exit.json");
    let file_arg = path.to_str().unwrap();
    run_json(&[
        "basis", "--n", "2", "--preset", "maximal", "--out", file_arg,
    ]);
    let out = run(&["analyze", "--basis", file_arg, "--set", "all"]);
    assert!(out.status.success());

    // Bad preset: usage failure, nonzero exit, diagnostic on stderr.
    let out = run(&["basis", "--n", "2", "--preset", "bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));

    // Invalid set spec addressing a degenerate pair.
    let hpath = temp_path("hy-exit.json");
    run_json(&[
        "basis",
        "--n",
        "3",
        "--preset",
        "hybrid:1",
        "--out",
        hpath.to_str().unwrap(),
    ]);
    let out = run(&[
        "analyze",
        "--basis",
        hpath.to_str().unwrap(),
        "--set",
        "pair:3:+",
    ]);
    assert!(!out.status.success());
    std::fs::remove_file(&path).ok();
    std::fs::remove_file(&hpath).ok();
}

#[test]
fn compact_json_flag_is_single_line() {
    let out = run(&["basis", "--n", "2", "--preset", "maximal", "--json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim().lines().count(), 1);
}
