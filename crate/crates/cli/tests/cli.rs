use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn suite(name: &str) -> PathBuf {
    fixtures().join("suite").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collab-tamp")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn plan_then_validate() {
    let dir = TempDir::new().unwrap();
    let scene = fixtures().join("test/pa_small.json");
    let plan = dir.path().join("plan.json");
    let trace = dir.path().join("trace.txt");
    let o = run(&["plan", s(&scene), "--seed", "3", "--out", s(&plan), "--trace", s(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("iter 1 "));
    let o = run(&["validate", s(&scene), s(&plan)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["valid"], Value::Bool(true));
}

#[test]
fn plan_writes_to_stdout_without_out() {
    let o = run(&["plan", s(&suite("unobstructed"))]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn unsatisfiable_scene_exits_two() {
    let o = run(&["plan", s(&suite("unsat_fixed_blocked")), "--seed", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("all branches pruned"), "{}", stderr(&o));
}

#[test]
fn missing_scene_exits_one() {
    let o = run(&["plan", "/nonexistent/scene.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn malformed_scene_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"regions\": 3}").unwrap();
    assert_eq!(run(&["plan", s(&p)]).status.code(), Some(1));
}

#[test]
fn moving_an_object_twice_is_invalid() {
    let dir = TempDir::new().unwrap();
    let scene = fixtures().join("test/pa_small.json");
    let plan = dir.path().join("plan.json");
    assert_eq!(run(&["plan", s(&scene), "--out", s(&plan)]).status.code(), Some(0));
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    let steps = doc["steps"].as_array_mut().unwrap();
    let last = steps.last().unwrap().clone();
    steps.push(last);
    std::fs::write(&plan, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let o = run(&["validate", s(&scene), s(&plan)]);
    assert_eq!(o.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let conditions: Vec<&str> =
        report["violations"].as_array().unwrap().iter().filter_map(|v| v["condition"].as_str()).collect();
    assert!(conditions.contains(&"monotonicity"), "{conditions:?}");
}

#[test]
fn empty_plan_validates_on_a_satisfied_scene() {
    let dir = TempDir::new().unwrap();
    let plan = dir.path().join("plan.json");
    let scene = suite("satisfied");
    assert_eq!(run(&["plan", s(&scene), "--out", s(&plan)]).status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    assert!(doc["steps"].as_array().unwrap().is_empty());
    assert_eq!(run(&["validate", s(&scene), s(&plan)]).status.code(), Some(0));
}

#[test]
fn dumps_are_written() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let (facts, cmtg, dot, lp) = (d.join("facts.json"), d.join("g.txt"), d.join("g.dot"), d.join("root.lp"));
    let scene = suite("pick_chain");
    let o = run(&[
        "plan",
        s(&scene),
        "--out",
        s(&d.join("p.json")),
        "--dump-facts",
        s(&facts),
        "--dump-cmtg",
        s(&cmtg),
        "--dump-mip",
        s(&lp),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(serde_json::from_str::<Value>(&std::fs::read_to_string(&facts).unwrap()).unwrap().is_array());
    let golden = std::fs::read_to_string(fixtures().join("../tests/golden/pick_chain.cmtg")).unwrap();
    assert_eq!(std::fs::read_to_string(&cmtg).unwrap(), golden);
    let lp = std::fs::read_to_string(&lp).unwrap();
    assert!(lp.contains("Minimize") && lp.contains("Binary") && lp.trim_end().ends_with("End"));
    run(&["plan", s(&scene), "--out", s(&d.join("p.json")), "--dump-cmtg", s(&dot)]);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

fn count(svg: &str, class: &str) -> usize {
    svg.matches(&format!("class=\"{class}")).count()
}

#[test]
fn render_draws_every_entity_and_step() {
    let dir = TempDir::new().unwrap();
    let scene = suite("pick_chain");
    let plan = dir.path().join("plan.json");
    assert_eq!(run(&["plan", s(&scene), "--out", s(&plan)]).status.code(), Some(0));
    let steps = serde_json::from_str::<Value>(&std::fs::read_to_string(&plan).unwrap()).unwrap()["steps"]
        .as_array()
        .unwrap()
        .len();
    let svg_path = dir.path().join("out.svg");
    assert_eq!(run(&["render", s(&scene), "--plan", s(&plan), "--svg", s(&svg_path)]).status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&scene).unwrap()).unwrap();
    let n = |k: &str| doc[k].as_array().map_or(0, |a| a.len());
    assert_eq!(count(&svg, "entity region"), n("regions"));
    assert_eq!(count(&svg, "entity fixed"), n("fixed"));
    assert_eq!(count(&svg, "entity movable"), n("movables"));
    assert_eq!(count(&svg, "entity robot"), n("robots"));
    assert_eq!(count(&svg, "step\""), steps);

    let again = dir.path().join("again.svg");
    run(&["render", s(&scene), "--plan", s(&plan), "--svg", s(&again)]);
    assert_eq!(std::fs::read(&svg_path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn bench_on_an_empty_directory() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.json");
    let empty = dir.path().join("scenes");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(run(&["bench", s(&empty), "--out", s(&out)]).status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["scenarios"].as_array().unwrap().is_empty());
}

#[test]
fn bench_reports_success_and_parallel_speedup() {
    let dir = TempDir::new().unwrap();
    let scenes = dir.path().join("scenes");
    std::fs::create_dir(&scenes).unwrap();
    let text = std::fs::read_to_string(suite("parallel")).unwrap();
    std::fs::write(scenes.join("parallel_two.json"), &text).unwrap();
    let mut one: Value = serde_json::from_str(&text).unwrap();
    one["robots"].as_array_mut().unwrap().truncate(1);
    std::fs::write(scenes.join("parallel_one.json"), one.to_string()).unwrap();
    std::fs::copy(suite("handover"), scenes.join("handover.json")).unwrap();

    let out = dir.path().join("bench.json");
    let o = run(&["bench", s(&scenes), "--trials", "5", "--seed-base", "10", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let by_name =
        |n: &str| report["scenarios"].as_array().unwrap().iter().find(|s| s["scenario"] == n).unwrap().clone();
    for n in ["handover", "parallel_one", "parallel_two"] {
        let r = by_name(n);
        assert_eq!(r["success_rate"], 1.0, "{n}");
        assert_eq!(r["trials"].as_array().unwrap().len(), 5);
        assert_eq!(r["trials"][0]["seed"], 10);
    }
    assert!(by_name("handover")["trials"][0]["handover_steps"].as_u64().unwrap() >= 1);
    let mean = |n: &str| by_name(n)["makespan"]["mean"].as_f64().unwrap();
    assert!(mean("parallel_two") <= mean("parallel_one"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("parallel_two"));
}
