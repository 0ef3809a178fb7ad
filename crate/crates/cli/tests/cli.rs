use std::path::Path;
use std::process::{Command, Output};

use rznk::certify::{real_bracket, BoundReport, CertBundle, RealCertBundle, Regime};
use rznk::chiribella::CoeffTable;
use rznk::definetti::DeFinettiReport;
use rznk::designs::{DesignReport, SphericalDesign, WickReport};
use rznk::io::CoeffTableJson;
use rznk::scalar::{q, ratio_from_f64};
use serde_json::Value;

fn rznk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rznk"))
        .args(args)
        .current_dir(dir)
        .env("RZNK_CACHE_DIR", dir.join("cache"))
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn result<T: serde::de::DeserializeOwned>(v: &Value) -> T {
    serde_json::from_value(v["result"].clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const DIAG: &str = r#"{"field":"complex","d":2,"k":1,"terms":[
    {"alpha":[1,0],"beta":[1,0],"re":1},{"alpha":[0,1],"beta":[0,1],"num":3,"den":1}]}"#;

#[test]
fn bounds_motzkin_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = rznk(&["bounds", "--d", "3", "--k", "3", "--m", "0.1", "--M", "0.2481481", "--real", "--out", "b.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("b.json"));
    assert_eq!(v["seed"], 20_190_415);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["input_hash"].as_str().unwrap().len(), 64);
    let b: BoundReport = result(&v);
    let n = b.numeric.unwrap();
    assert!(n <= b.improved.unwrap() && b.improved.unwrap() <= b.general && b.general < b.reznick.unwrap());
    let (m, big_m) = (ratio_from_f64(0.1).unwrap(), ratio_from_f64(0.2481481).unwrap());
    let at = |n: usize| real_bracket(3, 3, n, &m, &big_m).unwrap();
    assert!(at(n) >= q(0, 1) && at(n - 1) < q(0, 1));
}

#[test]
fn certify_diagonal_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "diag.json", DIAG);
    let out = rznk(&["certify", "--input", "diag.json", "--m", "1", "--M", "3", "--out", "cert.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("cert.json"));
    assert_eq!(v["result"]["field"], "complex");
    let cert: CertBundle = result(&v);
    assert_eq!(cert.n, 4);
    assert_eq!(cert.regime, Regime::Proven);
    assert!(cert.pass && cert.residual <= 1e-8 && cert.min_eval >= -1e-9);
    let again: CertBundle = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert_eq!(again, cert);
    assert!(dir.path().join("cache/design_d2_n5.json").exists());
}

#[test]
fn certify_float_mode_matches_exact() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "diag.json", DIAG);
    for mode in ["exact", "float"] {
        let out_name = format!("{mode}.json");
        let out = rznk(&["--mode", mode, "certify", "--input", "diag.json", "--m", "1", "--M", "3", "--out", &out_name], dir.path());
        assert!(out.status.success());
    }
    let a: CertBundle = result(&read_json(&dir.path().join("exact.json")));
    let b: CertBundle = result(&read_json(&dir.path().join("float.json")));
    assert_eq!(a.n, b.n);
    assert!((a.min_eval - b.min_eval).abs() < 1e-9);
}

#[test]
fn certify_real_motzkin() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "motzkin.json",
        r#"{"field":"real","d":3,"k":3,"terms":[
            {"alpha":[4,2,0],"re":1},{"alpha":[0,4,2],"re":1},{"alpha":[2,0,4],"re":1},{"alpha":[2,2,2],"re":-3},
            {"alpha":[6,0,0],"num":1,"den":2},{"alpha":[0,6,0],"num":1,"den":2},{"alpha":[0,0,6],"num":1,"den":2},
            {"alpha":[4,2,0],"num":3,"den":2},{"alpha":[4,0,2],"num":3,"den":2},{"alpha":[2,4,0],"num":3,"den":2},
            {"alpha":[0,4,2],"num":3,"den":2},{"alpha":[2,0,4],"num":3,"den":2},{"alpha":[0,2,4],"num":3,"den":2},
            {"alpha":[2,2,2],"num":3,"den":1}]}"#,
    );
    let out = rznk(&["certify", "--input", "motzkin.json", "--m", "0.5", "--M", "0.6481481481481481", "--out", "c.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("c.json"));
    assert_eq!(v["result"]["field"], "real");
    let cert: RealCertBundle = result(&v);
    assert_eq!(Some(cert.n), cert.bounds.numeric);
    assert!(cert.exact_identity && cert.pass);
    let float = rznk(&["--mode", "float", "certify", "--input", "motzkin.json"], dir.path());
    assert_eq!(float.status.code(), Some(1));
}

#[test]
fn certify_rejects_nonpositive() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "neg.json", r#"{"field":"complex","d":2,"k":1,"terms":[{"alpha":[1,0],"beta":[1,0],"re":1},{"alpha":[0,1],"beta":[0,1],"re":-1}]}"#);
    let out = rznk(&["certify", "--input", "neg.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly positive"));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", "{ not json");
    write(dir.path(), "herm.json", r#"{"field":"complex","d":2,"k":1,"terms":[{"alpha":[1,0],"beta":[0,1],"re":1}]}"#);
    write(dir.path(), "diag.json", DIAG);
    for args in [
        vec!["certify", "--input", "bad.json"],
        vec!["certify", "--input", "herm.json"],
        vec!["certify", "--input", "missing.json"],
        vec!["certify", "--input", "diag.json", "--unknown-flag"],
        vec!["certify", "--input", "diag.json", "--m", "1", "--M", "3", "--require-cached-design"],
        vec!["definetti", "--d", "2", "--k", "3", "--n", "3", "--r", "0"],
        vec!["bounds", "--d", "2", "--k", "1", "--m", "0", "--M", "1"],
        vec!["frobnicate"],
    ] {
        let out = rznk(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn design_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = rznk(&["design", "--d", "2", "--degree", "2", "--out", "design.json"], dir.path());
    assert!(out.status.success());
    let design = SphericalDesign::read(&dir.path().join("design.json")).unwrap();
    assert_eq!((design.d, design.degree, design.atoms.len()), (2, 2, 81));
    let out = rznk(&["verify-design", "--in", "design.json", "--out", "report.json"], dir.path());
    assert!(out.status.success());
    let report: DesignReport = result(&read_json(&dir.path().join("report.json")));
    assert!(report.pass && report.frobenius <= 1e-9);

    let mut broken = design.clone();
    broken.atoms[0].weight *= 2.0;
    broken.write(&dir.path().join("broken.json")).unwrap();
    let out = rznk(&["verify-design", "--in", "broken.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coeffs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = rznk(&["coeffs", "--d", "2", "--k", "2", "--n", "4", "--out", "t.json"], dir.path());
    assert!(out.status.success());
    let json: CoeffTableJson = result(&read_json(&dir.path().join("t.json")));
    let table = CoeffTable::try_from(&json).unwrap();
    assert_eq!(table, CoeffTable::new(2, 2, 4).unwrap());
    assert_eq!(json.c, vec!["1/15", "8/15", "2/5"]);

    let out = rznk(&["coeffs", "--d", "3", "--k", "1", "--n", "2", "--real", "--out", "r.json"], dir.path());
    assert!(out.status.success());
    let v = read_json(&dir.path().join("r.json"));
    assert_eq!(v["result"]["q_real"].as_array().unwrap().len(), 2);
}

#[test]
fn definetti_report_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = rznk(&["definetti", "--d", "2", "--k", "1", "--n", "10", "--r", "0", "--out", "r.json"], dir.path());
    assert!(out.status.success());
    let r: DeFinettiReport = result(&read_json(&dir.path().join("r.json")));
    assert_eq!(r.delta, q(1, 6));
    assert!(r.feasible);

    let out = rznk(&["definetti", "--d", "2", "--k", "1", "--n", "10", "--r", "0", "--real", "--out", "rr.json"], dir.path());
    assert!(out.status.success());
    let r: DeFinettiReport = result(&read_json(&dir.path().join("rr.json")));
    assert_eq!(r.delta, q(1, 11));

    write(dir.path(), "grid.json", r#"{"d":[2,3],"k":[1,2],"n":[5,10]}"#);
    let out = rznk(&["definetti-sweep", "--grid", "grid.json", "--out", "table.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,k,n,r,delta,eps_exact,eps_bound,feasible"));
    assert_eq!(lines.count(), 2 * (2 + 3) * 2);
    assert!(text.contains("2,1,10,0,1/6,"));
}

#[test]
fn motzkin_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = rznk(&["motzkin", "--eps-min", "0.01", "--eps-max", "0.5", "--eps-steps", "4", "--n-max", "40", "--out", "fig.csv"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("fig.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], "1.0000000000000000e-2");
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["result"]["rows"], 4);
}

#[test]
fn wick_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "11", "wick", "--d", "2", "--n", "2", "--samples", "20000"];
    let a = rznk(&args, dir.path());
    let b = rznk(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    let r: WickReport = result(&v);
    assert!(r.pass && r.pairings == 3);
}

#[test]
fn hilbert_routes() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["hilbert", "--d", "2", "--n", "3"],
        vec!["hilbert", "--d", "3", "--n", "2", "--real"],
        vec!["hilbert", "--d", "2", "--n", "2", "--samples", "50000"],
        vec!["hilbert", "--d", "3", "--n", "2", "--real", "--samples", "50000"],
    ] {
        let out = rznk(&args, dir.path());
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["result"]["pass"], true);
    }
}

#[test]
fn thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_rznk"))
            .args(["coeffs", "--d", "2", "--k", "1", "--n", "2"])
            .current_dir(dir.path())
            .env("RZNK_THREADS", threads)
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
}
