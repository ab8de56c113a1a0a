use std::process::{Command, Output};

use serde_json::Value;

fn coarse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse")).args(args).env_remove("COARSE_COVER_GUARD").output().unwrap()
}

fn coarse_guarded(args: &[&str], guard: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse")).args(args).env("COARSE_COVER_GUARD", guard).output().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn json_err(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn temp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("coarse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn space_enum_counts_deviating_points() {
    let o = coarse(&["space", "enum", "--kind", "xwk", "--i", "2", "--n", "2", "--k", "1", "--window", "0:4", "--delta", "1"]);
    assert!(o.status.success());
    let lines: Vec<Value> = String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // 5×5 grid minus the 3×3 points with both coordinates off 4ℤ
    assert_eq!(lines.len(), 25 - 9);
}

#[test]
fn space_info_on_empty_window() {
    let o = coarse(&["space", "info", "--kind", "lattice", "--dim", "2", "--lattice", "4", "--window", "1:3", "--delta", "1"]);
    assert!(o.status.success());
    assert_eq!(json_out(&o)["cardinality"], "0");
}

#[test]
fn malformed_window_is_an_input_error() {
    let o = coarse(&["space", "info", "--kind", "xwk", "--i", "2", "--n", "2", "--k", "1", "--window", "0-4"]);
    assert_eq!(o.status.code(), Some(2));
    let e = json_err(&o);
    assert_eq!(e["error"]["kind"], "input");
    assert!(e["error"]["message"].as_str().unwrap().contains("malformed window"));
}

#[test]
fn enumeration_guard_from_environment() {
    let o = coarse_guarded(&["space", "enum", "--kind", "lattice", "--dim", "2", "--lattice", "1", "--window", "0:10", "--delta", "1"], "50");
    assert_eq!(o.status.code(), Some(4));
    assert!(json_err(&o)["error"]["message"].as_str().unwrap().contains("121"));
}

#[test]
fn build_two_validates() {
    let o = coarse(&["cover", "build-two", "--r", "4", "--i", "4", "--validate"]);
    assert!(o.status.success());
    let v = json_out(&o);
    assert_eq!(v["schema"], 1);
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 3);
    assert!(certs.iter().all(|c| c["passed"] == true));
    assert_eq!(v["bundle"]["families"].as_array().unwrap().len(), 2);
}

#[test]
fn build_two_rejects_small_r() {
    let o = coarse(&["cover", "build-two", "--r", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(json_err(&o)["error"]["message"].as_str().unwrap().contains("r >= 4"));
}

#[test]
fn build_y2omega_respects_the_family_bound() {
    let o = coarse(&["cover", "build-y2omega", "--r", "4"]);
    assert!(o.status.success());
    let v = json_out(&o);
    assert!(v["family_count"].as_u64().unwrap() <= 124);
    assert_eq!(v["bundle"]["partial"], true);
}

#[test]
fn build_xg_validates_singletons() {
    let o = coarse(&["cover", "build-xg", "--r", "2", "--validate"]);
    assert!(o.status.success());
    assert_eq!(json_out(&o)["certificates"][0]["passed"], true);
}

#[test]
fn tail_reads_a_space_from_file() {
    let spec = r#"{"kind":{"type":"as_union","start":1,"blocks":[
        {"kind":{"type":"lattice_power","scale":"1","dim":1},"window":[{"lo":"0","hi":"2","lo_closed":true,"hi_closed":true}],"delta":"1"},
        {"kind":{"type":"lattice_power","scale":"1","dim":1},"window":[{"lo":"0","hi":"2","lo_closed":true,"hi_closed":true}],"delta":"1"}]},
        "delta":"1"}"#;
    let path = temp("tail.json");
    std::fs::write(&path, spec).unwrap();
    let o = coarse(&["cover", "tail", "--in", path.to_str().unwrap(), "--threshold", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let protos = &json_out(&o)["family"]["parts"][0]["prototypes"];
    assert_eq!(protos.as_array().unwrap().len(), 3);
}

#[test]
fn stats_and_plot_of_a_two_family_bundle() {
    let bundle = temp("bundle.json");
    let o = coarse(&["cover", "build-two", "--r", "4", "--i", "2", "--out", bundle.to_str().unwrap()]);
    assert!(o.status.success());

    let o = coarse(&["analyze", "stats", "--in", bundle.to_str().unwrap()]);
    assert!(o.status.success());
    let r = &json_out(&o)["certificates"][0]["result"];
    assert!(r["multiplicity"]["value"].as_u64().unwrap() <= 2);
    assert_eq!(r["covers"], true);

    let svg = temp("bundle.svg");
    let o = coarse(&["analyze", "plot", "--in", bundle.to_str().unwrap(), "--plot-out", svg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<g id=\"family-").count(), 2);
}

#[test]
fn stats_of_a_non_cover_reports_zero_lebesgue() {
    let bundle = temp("partial-cover.json");
    let o = coarse(&["cover", "build-two", "--r", "4", "--i", "2"]);
    let mut v = json_out(&o);
    v["bundle"]["families"].as_array_mut().unwrap().truncate(1);
    std::fs::write(&bundle, v.to_string()).unwrap();
    let o = coarse(&["analyze", "stats", "--in", bundle.to_str().unwrap()]);
    assert!(o.status.success());
    let r = &json_out(&o)["certificates"][0]["result"];
    assert_eq!(r["lebesgue"]["value"], "0");
    assert_eq!(r["covers"], false);
}

#[test]
fn adlower_certifies_the_line() {
    let o = coarse(&["refute", "adlower", "--k", "0", "--n", "1", "--B", "6"]);
    assert!(o.status.success());
    let c = &json_out(&o)["certificates"][0];
    assert_eq!(c["passed"], true);
    assert_eq!(c["result"]["outcome"]["result"], "certified");
}

#[test]
fn descent_positive_control_completes() {
    let o = coarse(&["refute", "descent", "--control", "positive", "--B", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json_out(&o)["certificates"][0]["result"];
    assert_eq!(r["outcome"]["outcome"], "descent_complete");
    assert_eq!(r["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn descent_guard_names_the_grid_size() {
    let o = coarse_guarded(&["refute", "descent", "--control", "positive", "--B", "8"], "1000");
    assert_eq!(o.status.code(), Some(4));
    assert!(json_err(&o)["error"]["message"].as_str().unwrap().contains("estimated"));
}

#[test]
fn descent_hypothesis_failure_exits_3() {
    // two positive blocks at distance 2, well under the required 16
    let input = serde_json::json!({
        "m": 1, "k": 1, "b": "4", "delta": "1/2", "neg_disjointness": "1/4",
        "pos": [{"label": "pos", "blocks": [
            {"factors": [{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true},{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}]},
            {"factors": [{"lo":"3","hi":"4","lo_closed":true,"hi_closed":true},{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}]}]}],
        "neg": [{"label": "neg", "blocks": []}]
    });
    let path = temp("descent.json");
    std::fs::write(&path, input.to_string()).unwrap();
    let o = coarse(&["refute", "descent", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json_out(&o)["certificates"][0]["result"]["outcome"];
    assert_eq!(r["outcome"], "hypothesis_failure");
    assert!(r["evidence"].as_str().unwrap().contains("blocks 0 and 1"));
}

#[test]
fn outputs_are_deterministic() {
    let run = || {
        let mut v = json_out(&coarse(&["cover", "build-two", "--r", "4", "--i", "4", "--validate"]));
        for c in v["certificates"].as_array_mut().unwrap() {
            c["timing_ms"] = Value::Null;
        }
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn zero_threads_is_rejected() {
    let o = coarse(&["--threads", "0", "space", "info", "--kind", "lattice", "--dim", "1", "--lattice", "1", "--window", "0:1"]);
    assert_eq!(o.status.code(), Some(2));
}
