use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pegame(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pegame")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn value_of(stdout: &str, key: &str) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(stdout).expect("json output");
    v.pointer(key).cloned().unwrap_or(serde_json::Value::Null)
}

#[test]
fn solve_zero_game() {
    let game = data("zero.json");
    let (code, out, _) = pegame(&["solve", "--game", game.to_str().unwrap(), "--horizon", "3"]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/value"), "0/1");
}

#[test]
fn counterexample_report() {
    let (code, out, _) = pegame(&["counterexample", "--p", "1/2", "--A", "3", "--sweep", "--max-horizon", "6"]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/bounds/upper"), "1/2");
    assert_eq!(value_of(&out, "/bounds/lower"), "1/3");
    assert_eq!(value_of(&out, "/witness/lower_certificate"), "1/3");
    assert_eq!(value_of(&out, "/witness/upper_certificate"), "1/2");
    assert_eq!(value_of(&out, "/sweep/values").as_array().unwrap().len(), 7);
}

#[test]
fn sweep_csv() {
    let game = data("capture2.json");
    let (code, out, _) = pegame(&["sweep", "--game", game.to_str().unwrap(), "--max-horizon", "4", "--csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,v_n,v_n_approx");
    assert!(lines[1].starts_with("0,0/1,"));
    assert!(lines[2].starts_with("1,1/2,"));
    assert!(lines[3].starts_with("2,1/1,"));
    assert_eq!(lines.len(), 6);
}

#[test]
fn pursuit_from_edge_list_matches_fixture() {
    let graph = data("path2.edges");
    let g = graph.to_str().unwrap();
    let (code, out, _) =
        pegame(&["pursuit", "--graph", g, "--variant", "kind", "--pursuer", "a", "--evader", "a", "--max-horizon", "0", "--emit-spec"]);
    assert_eq!(code, 0);
    let fixture = std::fs::read_to_string(data("capture2.json")).unwrap();
    assert_eq!(out.trim_end(), fixture.trim_end());
    let (code, out, _) = pegame(&["pursuit", "--graph", g, "--variant", "kind", "--max-horizon", "3", "--plateau-window", "0"]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/values/1"), "1/1");
}

#[test]
fn leavable_flags_agree() {
    let game = data("capture2.json");
    let g = game.to_str().unwrap();
    let (c1, a, _) = pegame(&["sweep", "--game", g, "--max-horizon", "3", "--leavable", "--plateau-window", "0"]);
    let (c2, b, _) = pegame(&["leavable-sweep", "--game", g, "--max-horizon", "3", "--plateau-window", "0"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(value_of(&a, "/truncation"), "leavable");
    let (code, out, _) = pegame(&["solve", "--game", g, "--horizon", "2", "--leavable", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/value"), value_of(&out, "/oracle_value"));
}

#[test]
fn strategies_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let game = data("capture2.json");
    let g = game.to_str().unwrap();
    let (code, out, _) = pegame(&["solve", "--game", g, "--horizon", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let sigma1 = dir.path().join("sigma1.json");
    std::fs::write(&sigma1, v["maximizer"].to_string()).unwrap();
    let profile = dir.path().join("profile.json");
    std::fs::write(&profile, serde_json::json!({ "sigma1": v["maximizer"], "sigma2": v["minimizer"] }).to_string()).unwrap();

    let (code, out, _) = pegame(&["best-response", "--game", g, "--horizon", "2", "--strategy", sigma1.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/value"), v["value"]);
    assert_eq!(value_of(&out, "/goal"), "minimize");

    let (code, out, _) = pegame(&["eval", "--game", g, "--horizon", "2", "--profile", profile.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/value"), v["value"]);

    let args = ["simulate", "--game", g, "--horizon", "2", "--profile", profile.to_str().unwrap(), "--seed", "7", "--reps", "500"];
    let (code, first, _) = pegame(&args);
    assert_eq!(code, 0);
    assert_eq!(value_of(&first, "/exact"), v["value"]);
    assert_eq!(pegame(&args).1, first);
}

#[test]
fn dumps_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.txt");
    let lp = dir.path().join("lp.txt");
    let game = data("capture2.json");
    let (code, _, _) = pegame(&[
        "solve",
        "--game",
        game.to_str().unwrap(),
        "--horizon",
        "1",
        "--dump-tree",
        tree.to_str().unwrap(),
        "--dump-lp",
        lp.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(&tree).unwrap().lines().count() > 1);
    assert!(!std::fs::read_to_string(&lp).unwrap().is_empty());
}

#[test]
fn exit_statuses() {
    let game = data("capture2.json");
    let g = game.to_str().unwrap();
    let (code, out, err) = pegame(&["solve", "--game", "/no/such/file.json", "--horizon", "1"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert!(err.contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"states": [], "initial": "s", "actions": {}, "transitions": []}"#).unwrap();
    assert_eq!(pegame(&["validate", "--game", bad.to_str().unwrap()]).0, 2);
    assert_eq!(pegame(&["validate", "--game", g]).0, 0);

    let (code, out, err) = pegame(&["--node-budget", "5", "solve", "--game", g, "--horizon", "6"]);
    assert_eq!((code, out.as_str()), (3, ""));
    assert!(err.contains("budget"));

    let out = Command::new(env!("CARGO_BIN_EXE_pegame"))
        .args(["solve", "--game", g, "--horizon", "6", "--oracle"])
        .env("PEGAME_ORACLE_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    assert_eq!(pegame(&["counterexample", "--p", "1/2", "--A", "2"]).0, 2);
}

#[test]
fn approx_signals_writes_finite_game() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("density.json");
    std::fs::write(
        &spec,
        r#"{
  "states": ["s", "l", "r"],
  "initial": "s",
  "actions": {
    "s": {"max": ["go"], "min": ["go"]},
    "l": {"max": ["x", "y"], "min": ["go"]},
    "r": {"max": ["x", "y"], "min": ["go"]}
  },
  "transitions": [
    {"state": "s", "a1": "go", "a2": "go", "outcomes": [
      {"prob": "1/2", "next": "l", "s1": {"model": "f"}, "s2": "-"},
      {"prob": "1/2", "next": "r", "s1": {"model": "g"}, "s2": "-"}]},
    {"state": "l", "a1": "x", "a2": "go", "outcomes": [{"prob": "1", "next": "l", "s1": "-", "s2": "-"}]},
    {"state": "l", "a1": "y", "a2": "go", "outcomes": [{"prob": "1", "next": "l", "s1": "-", "s2": "-"}]},
    {"state": "r", "a1": "x", "a2": "go", "outcomes": [{"prob": "1", "next": "r", "s1": "-", "s2": "-"}]},
    {"state": "r", "a1": "y", "a2": "go", "outcomes": [{"prob": "1", "next": "r", "s1": "-", "s2": "-"}]}
  ],
  "payoffs": [{"state": "l", "a1": "x", "a2": "go", "value": "1"}, {"state": "r", "a1": "y", "a2": "go", "value": "1"}],
  "flags": {"nonnegative": true},
  "signals": {
    "f": {"kind": "density", "pieces": [{"from": "0", "to": "1/3", "height": "2"}, {"from": "1/3", "to": "1", "height": "1/2"}]},
    "g": {"kind": "density", "pieces": [{"from": "0", "to": "1/3", "height": "1/2"}, {"from": "1/3", "to": "1", "height": "5/4"}]}
  }
}"#,
    )
    .unwrap();
    let out_spec = dir.path().join("finite.json");
    let (code, out, err) = pegame(&[
        "approx-signals",
        "--game",
        spec.to_str().unwrap(),
        "--epsilon",
        "1/4",
        "--horizon",
        "2",
        "--out",
        out_spec.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(value_of(&out, "/certificate/total_tv").is_string());
    let (code, out, _) = pegame(&["solve", "--game", out_spec.to_str().unwrap(), "--horizon", "2"]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "/value"), "3/4");
    assert_eq!(pegame(&["--alphabet-budget", "1", "approx-signals", "--game", spec.to_str().unwrap(), "--epsilon", "1/4", "--horizon", "2"]).0, 3);
}

#[test]
fn output_is_deterministic() {
    let game = data("capture2.json");
    let args = ["sweep", "--game", game.to_str().unwrap(), "--max-horizon", "5", "--extract", "1/100"];
    let (code, a, _) = pegame(&args);
    assert_eq!(code, 0);
    assert_eq!(value_of(&a, "/eps_optimal/N"), 2);
    assert_eq!(value_of(&a, "/eps_optimal/guarantee"), "1/1");
    assert_eq!(pegame(&args).1, a);
}
