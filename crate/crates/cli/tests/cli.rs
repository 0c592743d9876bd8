use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn invring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invring"))
        .args(args)
        .env_remove("INVRING_CACHE_DIR")
        .env_remove("INVRING_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn hilbert_n5_ends_with_974() {
    let o = invring(&["hilbert", "--n", "5", "--bound", "10", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["n"], 5);
    assert_eq!(v["bound"], 10);
    let c = v["coefficients"].as_array().unwrap();
    assert_eq!(c.len(), 11);
    assert_eq!(c.last().unwrap(), "974");
}

#[test]
fn mu_and_eval() {
    assert_eq!(stdout(&invring(&["mu", "--n", "6"])), "4");
    assert_eq!(stdout(&invring(&["mu", "--n", "4"])), "3");
    let o = invring(&["eval", "--n", "5", "--invariant", "g:5:1100000000", "--graph", "g:5:1110000000"]);
    assert_eq!(stdout(&o), "3");
}

#[test]
fn dimension_agrees_both_ways() {
    let v = json(&invring(&["dimension", "--n", "5", "--degree", "10", "--json"]));
    assert_eq!(v["hilbert"], "974");
    assert_eq!(v["enumerated"], 974);
}

#[test]
fn exit_codes() {
    let o = invring(&["dominance", "--n", "5", "--bound", "6", "--expect", "dominated"]);
    assert_eq!(o.status.code(), Some(1));
    let o = invring(&["dominance", "--n", "5", "--bound", "6", "--expect", "failure"]);
    assert_eq!(o.status.code(), Some(0));
    let o = invring(&["dominance", "--n", "4", "--bound", "6", "--expect", "dominated"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(invring(&["hilbert", "--n", "5", "--frobnicate"]).status.code(), Some(2));
    let o = invring(&["eval", "--n", "5", "--invariant", "g:5:11", "--graph", "g:5:1110000000"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(invring(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn product_output_round_trips() {
    let a = invring::Action::graph(4).unwrap();
    for args in [
        vec!["mul", "--n", "4", "--left", "g:4:100000", "--right", "2*g:4:110000", "--json"],
        vec!["chain-mul", "--n", "4", "--left", "g:4:100000", "--right", "g:4:100000", "--json"],
    ] {
        let v = json(&invring(&args));
        let from_text = invring::orbits::parse_polynomial(&a, v["encoding"].as_str().unwrap()).unwrap();
        let from_json = invring::InvariantPolynomial::from_json(&a, &v["invariant"]).unwrap();
        assert_eq!(from_text, from_json);
    }
    let v = json(&invring(&["chain-mul", "--n", "4", "--left", "g:4:100000", "--right", "g:4:100000", "--json"]));
    assert_eq!(v["encoding"], "g:4:200000");
}

#[test]
fn mgs_json_generators_reparse() {
    let o = invring(&["mgs", "--n", "4", "--cap", "6", "--json"]);
    let v = json(&o);
    assert_eq!(v["count"], 9);
    let a = invring::Action::graph(4).unwrap();
    for g in v["generators"].as_array().unwrap() {
        let p = invring::orbits::parse_polynomial(&a, g["encoding"].as_str().unwrap()).unwrap();
        assert_eq!(p, invring::InvariantPolynomial::from_json(&a, &g["invariant"]).unwrap());
    }
}

#[test]
fn output_independent_of_threads() {
    let args = ["secondary-degrees", "--n", "5", "--json"];
    let one = invring(&[&args[..], &["--threads", "1"]].concat());
    let four = invring(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    let one = invring(&["mgs", "--n", "4", "--cap", "5", "--threads", "1"]);
    let four = invring(&["mgs", "--n", "4", "--cap", "5", "--threads", "4"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn cache_hits_misses_and_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["hilbert", "--n", "6", "--bound", "8", "--cache-dir", d];
    let first = invring(&args);
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let entry = &entries[0];

    // a planted value proves the second call is served from the cache
    let mut v: Value = serde_json::from_slice(&fs::read(entry).unwrap()).unwrap();
    let real = v["output"].clone();
    v["output"] = "planted".into();
    fs::write(entry, v.to_string()).unwrap();
    assert_eq!(stdout(&invring(&args)), "planted");

    // disabled cache recomputes
    let o = invring(&[&args[..], &["--no-cache"]].concat());
    assert_eq!(stdout(&o), real.as_str().unwrap());

    // an entry from another engine version is ignored
    v["engine"] = "0.0.0".into();
    fs::write(entry, v.to_string()).unwrap();
    assert_eq!(invring(&args).stdout, first.stdout);

    // corruption is recomputed and overwritten
    fs::write(entry, b"{ not json").unwrap();
    assert_eq!(invring(&args).stdout, first.stdout);
    let fixed: Value = serde_json::from_slice(&fs::read(entry).unwrap()).unwrap();
    assert_eq!(fixed["output"], real);

    // a different configuration gets its own entry
    invring(&["hilbert", "--n", "6", "--bound", "9", "--cache-dir", d]);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_invring"))
        .args(["limit-hilbert", "--bound", "6"])
        .env("INVRING_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "1 1 3 8 23 66 212");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn verify_emits_one_verdict_per_line() {
    let o = invring(&["verify", "--suite", "sign-lemma", "--json"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    let v: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(v["suite"], "sign-lemma");
    assert_eq!(v["passed"], true);
}

#[test]
fn separate_and_enumerate() {
    let o = invring(&[
        "separate", "--n", "5", "--invariant", "g:5:1000000000", "--invariant", "g:5:1100000000",
        "--first", "g:5:1110000000", "--second", "g:5:1100100000",
    ]);
    assert_eq!(stdout(&o), "false");
    let v = json(&invring(&["enumerate", "--n", "4", "--degree", "3", "--json"]));
    assert_eq!(v["count"], 6);
    let v = json(&invring(&["enumerate", "--n", "4", "--degree", "3", "--simple", "--json"]));
    assert_eq!(v["count"], 3);
}

#[test]
fn counts_and_secondaries() {
    let o = invring(&["connected-counts", "--max-k", "3", "--max-d", "3", "--json"]);
    let v = json(&o);
    // connected multigraphs on 3 vertices with 2 and 3 edges
    assert_eq!(v["rows"][2][2], "1");
    assert_eq!(v["rows"][2][3], "2");
    let v = json(&invring(&["secondary-degrees", "--n", "4", "--json"]));
    assert_eq!(v["count"], "30");
    let o = invring(&["secondaries", "--n", "3", "--cap", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("1 secondaries"));
}
