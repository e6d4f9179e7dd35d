use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypthick"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("hypthick-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn verify_k2_fixture_passes() {
    let out = run(&["verify", data("k2.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["format"], "hypthick-report");
    assert_eq!(r["version"], 1);
    assert_eq!(r["pass"], true);
    assert_eq!(r["result"]["thickness"]["min_vertex_vertex"], 3.0);
}

#[test]
fn verify_failure_exits_2() {
    let out = run(&["verify", data("k2_crowded.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn errors_exit_1() {
    let out = run(&["verify", "no/such/file.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such/file.txt"));
    let out = run(&["bounds", "--polynomial", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("monic"));
}

#[test]
fn bad_generator_names_its_index() {
    let d = scratch("badgroup");
    let g = d.join("g.json");
    let text = hypthick::constructions::shipped_group_json("triangle_2_3_7").unwrap();
    let mut v: Value = serde_json::from_str(text).unwrap();
    v["generators"][1] = serde_json::json!([1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
    std::fs::write(&g, v.to_string()).unwrap();
    let out = run(&["triangulate", "--group", g.to_str().unwrap(), "--epsilon", "0.05"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("generator 1"), "{err}");
}

#[test]
fn single_ball_slice_is_a_disk() {
    let out = run(&["slices", data("ball.txt").to_str().unwrap(), "--samples", "400000"]);
    assert_eq!(out.status.code(), Some(0));
    let s = report(&out)["result"]["best"]["max_slice"].as_f64().unwrap();
    assert!((s - std::f64::consts::PI).abs() < 0.05 * std::f64::consts::PI, "{s}");
}

#[test]
fn bounds_at_e100() {
    let out = run(&["bounds", "--log-vol", "100", "-n", "3", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let res = &r["result"];
    assert!((res["log_vol"].as_f64().unwrap() - 100.0).abs() < 1e-9);
    assert!(res["log_budget"].as_f64().unwrap().is_finite());
    assert!(res["epsilon"].as_f64().unwrap() > 0.0);
    // constants are echoed
    assert_eq!(r["config"]["constants"]["c1"], 0.25);
}

#[test]
fn lehmer_polynomial_bounds() {
    let out = run(&["bounds", "--polynomial", "1,1,0,-1,-1,-1,-1,-1,0,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let m = report(&out)["result"]["mahler"]["value"].as_f64().unwrap();
    assert!((m - 1.176280818).abs() < 1e-8);
}

#[test]
fn triangulate_auto_epsilon_flags_fallback() {
    let out = run(&["triangulate", "--group", "triangle_2_3_7", "--epsilon", "auto"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let e = &report(&out)["result"]["epsilon"];
    assert_eq!(e["source"], "injectivity-radius");
    assert!(e["note"].as_str().unwrap().contains("injectivity radius"));
}

#[test]
fn pipeline_files_and_determinism() {
    let d = scratch("pipeline");
    let p = |n: &str| d.join(n).to_str().unwrap().to_string();
    let tri = run(&["triangulate", "--group", "triangle_2_3_7", "--epsilon", "0.05", "--mesh", &p("m.txt")]);
    assert_eq!(tri.status.code(), Some(0));
    let r = report(&tri);
    assert_eq!(r["result"]["euler_characteristic"], 2);
    assert_eq!(r["result"]["cone_point_orders"], serde_json::json!([2, 3, 7]));

    let embed = ["embed", "--mesh", &p("m.txt"), "--out", &p("e.txt"), "--samples", "50000"];
    let a = run(&embed);
    assert_eq!(a.status.code(), Some(0));
    let first = std::fs::read(d.join("e.txt")).unwrap();
    let b = run(&embed);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first, std::fs::read(d.join("e.txt")).unwrap());

    let v = run(&["verify", &p("e.txt")]);
    assert_eq!(v.status.code(), Some(0));

    let csv = run(&["slices", &p("e.txt"), "--trials", "4", "--samples", "20000", "--csv", &p("s.csv")]);
    assert_eq!(csv.status.code(), Some(0));
    let table = std::fs::read_to_string(d.join("s.csv")).unwrap();
    assert!(table.starts_with("level,slab_edge_count,slice_area\n"));

    let t1 = run(&["report-theorem1", "--mesh", &p("m.txt"), "--embedding", &p("e.txt"), "--samples", "50000"]);
    assert_eq!(t1.status.code(), Some(0));
    assert!(report(&t1)["result"]["ratio"]["ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_and_seed_override() {
    let d = scratch("config");
    let c = d.join("run.toml");
    std::fs::write(&c, "seed = 5\n[constants]\nc1 = 0.5\n").unwrap();
    let out = run(&["--config", c.to_str().unwrap(), "--seed", "7", "cheeger", "--random-regular", "12:3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["config"]["constants"]["c1"], 0.5);

    std::fs::write(&c, "bogus = 1\n").unwrap();
    let out = run(&["--config", c.to_str().unwrap(), "cheeger", "--random-regular", "12:3"]);
    assert_eq!(out.status.code(), Some(1));
}
