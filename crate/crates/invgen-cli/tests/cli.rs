use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, Output};

use invgen::core::io::{parse_function, parse_samples};
use invgen::core::brute_force_satisfying_set;
use invgen_cli::recompute_tv_from_counts;
use serde_json::Value;

fn invgen(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invgen")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = invgen(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], dir: &Path) -> i32 {
    invgen(args, dir).status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const MAJORITY: &str = r#"{"kind":"ltf","n":3,"weights":[1,1,1],"theta":1}"#;

#[test]
fn gen_writes_satisfying_samples_reproducibly() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let args = ["gen", "--class", "ltf", "--n", "12", "--seed", "7", "--samples", "10000", "--out", "a"];
    ok(&args, d);
    let mut again = args;
    again[args.len() - 1] = "b";
    ok(&again, d);
    for file in ["function.json", "samples.txt"] {
        assert_eq!(std::fs::read(d.join("a").join(file)).unwrap(), std::fs::read(d.join("b").join(file)).unwrap());
    }
    let f = parse_function(&std::fs::read_to_string(d.join("a/function.json")).unwrap()).unwrap();
    let xs = parse_samples(&std::fs::read_to_string(d.join("a/samples.txt")).unwrap(), Some(12)).unwrap();
    assert_eq!(xs.len(), 10_000);
    assert!(xs.iter().all(|x| f.eval_unchecked(x)));
}

#[test]
fn gen_rejects_unsatisfiable_plant() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("f.json"), r#"{"kind":"false","n":4}"#).unwrap();
    assert_eq!(code(&["gen", "--class", "ltf", "--n", "4", "--function", "f.json", "--out", "o"], tmp.path()), 2);
    assert_eq!(code(&["gen", "--class", "kdnf", "--k", "3", "--n", "2", "--out", "o"], tmp.path()), 2);
}

#[test]
fn invert_majority_report() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("maj.json"), MAJORITY).unwrap();
    ok(&["gen", "--class", "ltf", "--n", "3", "--function", "maj.json", "--samples", "3000", "--seed", "1", "--out", "data"], d);
    let run = || {
        ok(
            &["invert", "--class", "ltf", "--samples", "data/samples.txt", "--function", "maj.json", "--seed", "2",
              "--draws", "20000", "--out", "r1"],
            d,
        );
        ["report.json", "sampler.json"].map(|file| std::fs::read(d.join("r1").join(file)).unwrap())
    };
    let first = run();
    assert_eq!(first, run());
    let r = json(&d.join("r1/report.json"));
    assert_eq!(r["schema"], 1);
    let w = r["winner_grid_index"].as_u64().unwrap() as usize;
    assert_eq!(r["transcript"]["grid"][w]["admitted"], true);
    assert!(r["tv"]["tv"].as_f64().unwrap() <= 0.25);
    assert_eq!(r["exact_support"]["target_support"], 4);
    let timings = json(&d.join("r1/timings.json"));
    assert!(timings["stages"]["inverse_generate"].as_f64().is_some());

    // Audit: every derived number is recomputable from the recorded counts.
    let counts: BTreeMap<String, u64> = serde_json::from_value(r["tv"]["counts"].clone()).unwrap();
    let f = parse_function(MAJORITY).unwrap();
    let support: BTreeSet<String> = brute_force_satisfying_set(&f, 3).unwrap().iter().map(|x| x.to_string()).collect();
    assert_eq!(recompute_tv_from_counts(&counts, &support), r["tv"]["tv"].as_f64().unwrap());
    let accepted: u64 = counts.values().sum();
    assert_eq!(accepted + r["tv"]["bottom"].as_u64().unwrap(), r["tv"]["draws"].as_u64().unwrap());
    let cert = &r["sampler"]["certificate"];
    assert_eq!(
        cert["alpha"].as_f64().unwrap(),
        cert["hits"].as_f64().unwrap() / cert["samples"].as_f64().unwrap()
    );
    assert_eq!(cert["kappa"].as_f64().unwrap(), 8.0 * cert["g_fraction"].as_f64().unwrap());
    let ex = &r["exact_support"];
    let (a, b, i) = (ex["sampler_support"].as_f64().unwrap(), ex["target_support"].as_f64().unwrap(), ex["intersection"].as_f64().unwrap());
    assert!((ex["tv"].as_f64().unwrap() - (1.0 - i / a.max(b))).abs() < 1e-12);
}

#[test]
fn invert_input_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("empty.txt"), "").unwrap();
    std::fs::write(d.join("bad.txt"), "0101\n0111\n01x1\n").unwrap();
    assert_eq!(code(&["invert", "--class", "ltf", "--samples", "empty.txt", "--out", "o"], d), 2);
    let out = invgen(&["invert", "--class", "ltf", "--samples", "bad.txt", "--out", "o"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(code(&["invert", "--class", "dnf", "--samples", "bad.txt", "--out", "o"], d), 2);
    assert_eq!(code(&["invert", "--class", "ltf", "--samples", "missing.txt", "--out", "o"], d), 2);
}

fn sampler_file(g: &str, n: usize) -> String {
    format!(r#"{{"g":{g},"h":{{"kind":"true","n":{n}}},"trials":1,"generator_delta":1e-9,"certificate":null}}"#)
}

#[test]
fn eval_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("maj.json"), MAJORITY).unwrap();
    std::fs::write(d.join("exact.json"), sampler_file(MAJORITY, 3)).unwrap();
    let r: Value = serde_json::from_str(&ok(&["eval", "--sampler", "exact.json", "--function", "maj.json"], d)).unwrap();
    assert_eq!(r["tv"]["mode"], "exact");
    assert_eq!(r["tv"]["draws"], 1_000_000);
    assert!(r["tv"]["tv"].as_f64().unwrap() <= 0.005);

    std::fs::write(d.join("low.json"), sampler_file(r#"{"kind":"conjunction","n":3,"literals":[-1,-2]}"#, 3)).unwrap();
    let r: Value =
        serde_json::from_str(&ok(&["eval", "--sampler", "low.json", "--function", "maj.json", "--draws", "10000"], d)).unwrap();
    assert!(r["tv"]["tv"].as_f64().unwrap() >= 0.99);
    assert_eq!(r["tv"]["pass"], false);

    let wide = r#"{"kind":"dnf","n":30,"terms":[[1,2],[-3]]}"#;
    std::fs::write(d.join("wide.json"), wide).unwrap();
    std::fs::write(d.join("wide_s.json"), sampler_file(wide, 30)).unwrap();
    let r: Value =
        serde_json::from_str(&ok(&["eval", "--sampler", "wide_s.json", "--function", "wide.json", "--draws", "2000"], d)).unwrap();
    assert_eq!(r["tv"]["mode"], "empirical");
    assert_eq!(r["tv"]["support_caveat"], true);

    assert_eq!(code(&["eval", "--sampler", "wide_s.json", "--function", "maj.json"], d), 2);
    assert_eq!(code(&["eval", "--sampler", "wide_s.json", "--function", "wide.json", "--exact"], d), 4);
}

#[test]
fn forward_commands_and_graphs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let dnf = r#"{"kind":"dnf","n":10,"terms":[[1,2,3],[-4,5],[6,-7,8,9]]}"#;
    std::fs::write(d.join("f.json"), dnf).unwrap();
    let c1 = ok(&["count", "--function", "f.json", "--seed", "3"], d);
    assert_eq!(c1, ok(&["count", "--function", "f.json", "--seed", "3"], d));
    let c: Value = serde_json::from_str(&c1).unwrap();
    let exact = c["exact_count"].as_f64().unwrap();
    assert!((c["count"].as_f64().unwrap() - exact).abs() <= 0.05 * exact);

    ok(&["sample", "--function", "f.json", "--draws", "500", "--seed", "4", "--out", "s1.txt"], d);
    ok(&["sample", "--function", "f.json", "--draws", "500", "--seed", "4", "--out", "s2.txt"], d);
    assert_eq!(std::fs::read(d.join("s1.txt")).unwrap(), std::fs::read(d.join("s2.txt")).unwrap());
    let f = parse_function(dnf).unwrap();
    let xs = parse_samples(&std::fs::read_to_string(d.join("s1.txt")).unwrap(), Some(10)).unwrap();
    assert!(xs.iter().all(|x| f.eval_unchecked(x)));

    std::fs::write(d.join("c8.txt"), "8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 1\n").unwrap();
    let g1 = ok(&["graphauto", "--graph", "c8.txt", "--seed", "5", "--draws", "50000"], d);
    assert_eq!(g1, ok(&["graphauto", "--graph", "c8.txt", "--seed", "5", "--draws", "50000"], d));
    let g: Value = serde_json::from_str(&g1).unwrap();
    assert_eq!(g["group_order"], 16);
    assert!(g["tv"].as_f64().unwrap() <= 0.05);
    let counts: BTreeMap<String, u64> = serde_json::from_value(g["counts"].clone()).unwrap();
    assert_eq!(counts.values().sum::<u64>(), 50_000);

    std::fs::write(d.join("bad.txt"), "3\n1 1\n").unwrap();
    assert_eq!(code(&["graphauto", "--graph", "bad.txt"], d), 2);
    std::fs::write(d.join("big.txt"), "12\n1 2\n").unwrap();
    assert_eq!(code(&["graphauto", "--graph", "big.txt"], d), 4);
}
