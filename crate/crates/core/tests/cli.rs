use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qcurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcurve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn compute_figure_eight() {
    let out = qcurve(&["compute", &data("curves/k_0.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["j_plus"], 0);
    assert_eq!(v["rot"], 0);
    assert_eq!(v["iq_combinatorial"], serde_json::json!([[-0.5, -0.5], [0.5, 0.5]]));
    assert_eq!(v["checks"]["oracle_match"], true);
}

#[test]
fn compute_circle_at_one() {
    let out = qcurve(&["compute", &data("curves/k_1.json"), "--q", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["evaluations"], serde_json::json!([[1.0, 1.0]]));
    assert_eq!(v["rot"], 1);
    let text = qcurve(&["compute", &data("curves/k_1.json"), "--q", "1"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("I_1 = 1"));
}

#[test]
fn compute_several_files_gives_a_list() {
    let out = qcurve(&[
        "compute",
        &data("curves/k_2.json"),
        &data("curves/limacon.json"),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[0]["iq_combinatorial"], list[1]["iq_combinatorial"]);
}

#[test]
fn tangent_circles_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "tangent.json",
        r#"{"components":[{"kind":"fourier","ax":[0,1],"by":[0,1]},{"kind":"fourier","ax":[2,1],"by":[0,-1]}]}"#,
    );
    let out = qcurve(&["compute", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tangential_crossing"));
}

#[test]
fn parse_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(qcurve(&["compute", &bad]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(qcurve(&["compute", missing.to_str().unwrap()]).status.code(), Some(1));
    let empty = write(dir.path(), "empty.json", r#"{"components":[]}"#);
    assert_eq!(qcurve(&["compute", &empty]).status.code(), Some(1));
    assert_eq!(
        qcurve(&["compute", &data("curves/k_1.json"), "--q", "-1"]).status.code(),
        Some(1)
    );
    assert_eq!(qcurve(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let out = qcurve(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("compute"));
}

#[test]
fn verify_builtin_and_shipped_corpus() {
    let out = qcurve(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = qcurve(&["verify", &data(""), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["suites"].as_array().unwrap().iter().all(|s| s["passed"] == true));
}

#[test]
fn verify_catches_corrupted_standard_curve() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("curves/k_2.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    // scale the loop away: the curve becomes a realization of K_1
    doc["components"][0]["ax"][2] = serde_json::json!(0.0);
    doc["components"][0]["by"][2] = serde_json::json!(0.0);
    write(dir.path(), "k_2.json", &doc.to_string());
    let out = qcurve(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().any(|l| l.starts_with("standard") && l.contains("FAIL")), "{table}");
}

#[test]
fn scenario_run() {
    let out = qcurve(&[
        "scenario",
        "run",
        &data("scenarios/direct_tangency_index_1.json"),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["match"], true);
    assert_eq!(v[0]["measured"], serde_json::json!([[0.5, 1.0], [1.5, -1.0]]));
    let all = qcurve(&["scenario", "run", "--builtin"]);
    assert_eq!(all.status.code(), Some(0));
}

#[test]
fn scenario_with_wrong_index_fails() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("scenarios/opposite_tangency_index_0.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["event"]["index"] = serde_json::json!(1.0);
    let path = write(dir.path(), "wrong.json", &v.to_string());
    assert_eq!(qcurve(&["scenario", "run", &path]).status.code(), Some(3));
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("eight.svg");
    let out = qcurve(&[
        "render",
        &data("curves/k_0.json"),
        "--regions",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(out_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(">-1/2<") && svg.contains(">1/2<"));
}

#[test]
fn index_lists_crossings() {
    let out = qcurve(&["index", &data("curves/limacon.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["double_points"].as_array().unwrap().len(), 1);
    assert_eq!(v["double_points"][0]["index"], 1.0);
    for key in ["t1", "t2", "position", "theta"] {
        assert!(v["double_points"][0].get(key).is_some());
    }
}

#[test]
fn export_corpus_matches_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcurve(&["export-corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["curves", "scenarios"] {
        for e in fs::read_dir(dir.path().join(sub)).unwrap() {
            let p = e.unwrap().path();
            let shipped = data(&format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()));
            assert_eq!(fs::read_to_string(&p).unwrap(), fs::read_to_string(shipped).unwrap());
        }
    }
}
