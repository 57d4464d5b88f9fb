use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricomplex")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricomplex")).args(args).env("TORICOMPLEX_THREADS", threads).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_toricomplex"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON report")
}

#[test]
fn p2_boundary_has_complexity_zero() {
    let o = run(&["complexity", "--input", &data("p2.json"), "--mode", "projective"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("(c, c̄, ĉ) = (0, 0, 0)"), "{s}");
    assert!(s.contains("realizing Σ = 1·(1·D0) + 1·(1·D1) + 1·(1·D2)"), "{s}");
}

#[test]
fn atiyah_flop_reports_equality() {
    let o = run(&["check", "small", "--input", &data("atiyah.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["holds"], true);
    assert_eq!(v["result"]["checks"]["equality"], true);
    assert_eq!(v["result"]["surgery"]["before"], v["result"]["surgery"]["after"]);
    assert_eq!(v["result"]["surgery"]["after"]["c_fine"], "2");
}

#[test]
fn a1_blowup_is_cone_over_conic() {
    let o = run(&["cone", "--input", &data("a1-blowup.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("iso verified: X_x ≅ Cone(P1, O(2))"));
}

#[test]
fn contraction_with_half_weight_is_strict() {
    let o = run(&["check", "contract", "--input", &data("blowup-contract.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["result"]["surgery"]["before"]["c"], "1/2");
    assert_eq!(v["result"]["surgery"]["after"]["c"], "0");
    assert_eq!(v["result"]["surgery"]["exceptional_weight"], "1/2");
}

#[test]
fn extraction_of_lc_place() {
    let o = run(&["check", "extract", "--input", &data("p2-extract.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["result"]["surgery"]["discrepancies"][0]["a"], "0");
}

#[test]
fn adjunction_to_a_line() {
    let o = run(&["adjoin", "--input", &data("p2-line.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["result"]["boundary_e"], serde_json::json!(["1", "1"]));
    assert_eq!(v["result"]["c_orb_e"], "0");
    assert_eq!(v["result"]["checks"]["equality_diagnostics"], true);
}

#[test]
fn suite_passes() {
    let o = run(&["check", "suite"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(": ok").count(), 6);
}

#[test]
fn hilbert_basis_of_a1() {
    let o = run(&["hilbert", "--input", &data("square.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["hilbert_basis"], serde_json::json!([[0, 1], [1, 1], [2, 1]]));
}

#[test]
fn classgroup_of_p2() {
    let o = run(&["classgroup", "--input", &data("p2.json"), "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["result"]["free_rank"], 1);
    assert_eq!(v["result"]["torsion"], serde_json::json!([]));
}

#[test]
fn non_q_cartier_boundary_is_a_validation_error() {
    let o = run(&["validate", "--input", &data("conifold-bad.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not Q-Cartier on cone 0"), "{}", stderr(&o));
}

#[test]
fn boundary_above_one_names_the_ray() {
    let input = r#"{"rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]], "boundary": ["1", "3/2"]}"#;
    let o = run_stdin(&["validate", "--input", "-"], input);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ray 1"), "{}", stderr(&o));
}

#[test]
fn parse_and_io_errors_exit_3() {
    assert_eq!(run_stdin(&["validate", "--input", "-"], "{ not json").status.code(), Some(3));
    assert_eq!(run(&["validate", "--input", "/nonexistent/pair.json"]).status.code(), Some(3));
    assert_eq!(run(&["validate"]).status.code(), Some(3));
    assert_eq!(run_stdin(&["validate", "--input", "-"], r#"{"schema": 2, "rank": 1, "rays": [], "max_cones": []}"#).status.code(), Some(3));
    assert_eq!(run_stdin(&["validate", "--input", "-"], r#"{"rank": 1, "rays": [[1]], "max_cones": [[0]], "boundary": ["x"]}"#).status.code(), Some(3));
}

#[test]
fn flags_are_range_checked() {
    assert_eq!(run(&["minimize", "--input", &data("p2.json"), "--orbifold-cap", "65"]).status.code(), Some(3));
    assert_eq!(run(&["minimize", "--input", &data("p2.json"), "--orbifold-cap", "64"]).status.code(), Some(0));
    assert_eq!(run_env(&["minimize", "--input", &data("p2.json")], "zero").status.code(), Some(3));
}

#[test]
fn torsion_needs_the_cover() {
    let input = r#"{"rank": 2, "rays": [[1, 0], [1, 2]], "max_cones": [[0, 1]], "v": [3, 2]}"#;
    let o = run_stdin(&["cone", "--input", "-"], input);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("torsion"), "{}", stderr(&o));
    let o = run_stdin(&["cone", "--input", "-", "--torsion-cover", "--format", "json"], input);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["result"]["checks"]["isomorphic"], true);
    assert!(v["result"]["torsion_cover"]["torsion"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn local_mode_override() {
    let input = r#"{"rank": 2, "rays": [[0, 1], [2, 1]], "max_cones": [[0, 1]], "boundary": ["1", "1"]}"#;
    let o = run_stdin(&["complexity", "--input", "-", "--mode", "local:0", "--format", "json"], input);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["result"]["mode"]["kind"], "local");
    assert_eq!(v["result"]["c_loc"], "0");
}

#[test]
fn json_is_identical_across_thread_counts() {
    // The pair half of the flop input, over the conifold.
    let pair = serde_json::from_str::<Value>(&std::fs::read_to_string(data("atiyah.json")).unwrap()).unwrap()["pair"].to_string();
    let outs: Vec<Vec<u8>> = ["1", "2", "4"]
        .iter()
        .map(|t| {
            let mut child = Command::new(env!("CARGO_BIN_EXE_toricomplex"))
                .args(["minimize", "--input", "-", "--format", "json"])
                .env("TORICOMPLEX_THREADS", t)
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .spawn()
                .unwrap();
            child.stdin.take().unwrap().write_all(pair.as_bytes()).unwrap();
            let o = child.wait_with_output().unwrap();
            assert_eq!(o.status.code(), Some(0));
            o.stdout
        })
        .collect();
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn reported_decomposition_round_trips() {
    let pair = r#"{"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [2, 0]], "boundary": ["1", "1/2", "1/2"]}"#;
    let v = json(&run_stdin(&["minimize", "--input", "-", "--format", "json"], pair));
    let min = &v["result"]["minimum"];
    let mut input: Value = serde_json::from_str(pair).unwrap();
    input["orbifold"] = min["orbifold"]["orbifold"].clone();
    input["decomposition"] = min["orbifold"]["parts"].clone();
    let o = run_stdin(&["complexity", "--input", "-", "--format", "json"], &input.to_string());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let w = json(&o);
    assert_eq!(w["result"]["given"]["c_orb"], min["c_orb"]);
    assert_eq!(w["result"]["minimum"], *min);
}
