use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn privstate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privstate")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = privstate(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn value(args: &[&str]) -> f64 {
    json(args)["value"].as_f64().unwrap()
}

fn code(args: &[&str]) -> i32 {
    privstate(args).status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn flower_key_and_negativity() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "flower.json");
    ok(&["state", "build", "--kind", "flower", "--d", "2", "--out", &f]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(file["data"].as_array().unwrap().len(), 256);
    assert!((value(&["measure", "dwrate", &f]) - 1.0).abs() <= 1e-8);
    let ln = value(&["measure", "lognegativity", &f]);
    assert!((ln - (1.0 + 2f64.sqrt()).log2()).abs() <= 1e-8, "{ln}");
}

#[test]
fn omega_writes_state_and_twisting() {
    let dir = TempDir::new().unwrap();
    let o = path(&dir, "omega.json");
    let summary = json(&["state", "build", "--kind", "omega", "--theta", "0.7", "--out", &o]);
    let v = summary["twisting"].as_str().unwrap();
    assert!(Path::new(v).exists());
    assert_eq!(json(&["measure", "abssep2q", &o])["value"], Value::Bool(false));
    assert_eq!(json(&["measure", "ppt", &o])["value"], Value::Bool(true));
    // The unitary is not a state.
    assert_eq!(code(&["measure", "entropy", v]), 2);
}

#[test]
fn ghz_pdit_has_one_bit_per_pair() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "ghz.json");
    ok(&["state", "build", "--kind", "mpdit", "--parties", "3", "--out", &g]);
    let r = json(&["measure", "dwrate", &g]);
    assert_eq!(r["pairs"].as_array().unwrap().len(), 2);
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
}

#[test]
fn pdit_measures() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "p.json");
    ok(&["state", "build", "--kind", "pdit", "--d", "3", "--rank", "2", "--seed", "5", "--out", &p]);
    assert!((value(&["measure", "dwrate", &p]) - 3f64.log2()).abs() <= 1e-8);
    assert!((value(&["measure", "witness", &p]) - 3f64.log2()).abs() <= 1e-8);
    let trivial = value(&["measure", "thm2", &p, "--estimator", "trivial"]);
    assert!(trivial >= 3f64.log2());
    let k = path(&dir, "k.json");
    ok(&["state", "build", "--kind", "key-attack", "--d", "3", "--rank", "2", "--seed", "5", "--out", &k]);
    assert!(value(&["measure", "dwrate", &k]).abs() <= 1e-8);
    let td = value(&["measure", "tracedist", &p, "--other", &k]);
    assert!(td > 0.0 && td <= 2.0);
    assert!(value(&["measure", "relent", &p, "--other", &p]).abs() <= 1e-9);
}

#[test]
fn separable_estimates() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    ok(&["state", "build", "--kind", "abs-sep-sample", "--seed", "3", "--out", &a]);
    assert!(value(&["measure", "er-fw", &a]) <= 5e-3);
    assert!(value(&["measure", "er-trivial", &a]) >= 0.0);
    assert_eq!(value(&["measure", "negativity", &a]), 0.0);
}

#[test]
fn protocol_examples() {
    let r = json(&["protocol", "rate", "--d", "2", "--m", "1e8", "--kd-sigma", "2", "--eps", "0"]);
    let rate = r["per_copy_rate"].as_f64().unwrap();
    assert!(rate <= 2.0 && 2.0 - rate <= 0.05, "{rate}");
    assert_eq!(r["m"], 100_000_000);
    let o = json(&["protocol", "oracle", "--d", "2", "--m", "4"]);
    assert!(o["max_discrepancy"].as_f64().unwrap() <= 1e-9);
    let sweep = ok(&["protocol", "sweep", "--d", "2", "--m-grid", "2^10..2^27"]);
    let col = csv_column(&sweep, "per_copy_rate");
    assert_eq!(col.len(), 18);
    assert!(col.windows(2).all(|w| w[1] >= w[0]), "{col:?}");
}

#[test]
fn bound_examples() {
    let z = json(&["bounds", "zd", "--d", "2"])["z"].as_f64().unwrap();
    assert!((z - 0.041).abs() <= 1e-3);
    let e = json(&["bounds", "sec6", "--m", "2"])["epsilon"].as_f64().unwrap();
    assert!((e - 0.3667).abs() <= 1e-4);
    let dir = TempDir::new().unwrap();
    let svg = path(&dir, "zd.svg");
    let text = ok(&["bounds", "curve", "--name", "zd", "--grid", "2:2^20", "--svg", &svg]);
    let col = csv_column(&text, "zd");
    assert_eq!(col.len(), 20);
    assert!(col.windows(2).all(|w| w[1] > w[0]));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn csv_shape() {
    let text = ok(&["bounds", "curve", "--name", "sec6-f", "--grid", "0:0.1:3"]);
    assert!(!text.contains('\r'));
    assert!(text.starts_with("eps,sec6-f\n0,0\n0.05,"));
    for field in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let digits = field.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
        assert!(digits.trim_start_matches('0').len() <= 12, "{field}");
    }
    let row = ok(&["bounds", "zd", "--d", "2", "--format", "csv"]);
    assert_eq!(row.lines().next(), Some("d,z"));
}

#[test]
fn files_round_trip_exactly() {
    let dir = TempDir::new().unwrap();
    for (kind, extra) in [("pdit", vec!["--shield", "3"]), ("werner", vec!["--werner", "symmetric"]), ("rec-ppt", vec![])] {
        let f = path(&dir, &format!("{kind}.json"));
        let mut args = vec!["state", "build", "--kind", kind, "--seed", "11", "--out", &f];
        args.extend(extra);
        ok(&args);
        let text = std::fs::read_to_string(&f).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&parsed).unwrap() + "\n", text, "{kind}");
        for pair in parsed["data"].as_array().unwrap() {
            for x in pair.as_array().unwrap() {
                let v = x.as_f64().unwrap();
                assert_eq!(v.to_string().parse::<f64>().unwrap().to_bits(), v.to_bits());
            }
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (path(&dir, "a.json"), path(&dir, "b.json"), path(&dir, "c.json"));
    ok(&["state", "build", "--kind", "pdit", "--seed", "9", "--out", &a]);
    ok(&["state", "build", "--kind", "pdit", "--seed", "9", "--out", &b]);
    ok(&["state", "build", "--kind", "pdit", "--seed", "10", "--out", &c]);
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(ok(&["measure", "er-fw", &a, "--seed", "2"]), ok(&["measure", "er-fw", &a, "--seed", "2"]));

    let sweep = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_privstate"))
            .args(["protocol", "sweep", "--m-grid", "2^4..2^20"])
            .env("PRIVSTATE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(sweep("1"), sweep("4"));
    let oracle = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_privstate"))
            .args(["protocol", "oracle", "--m", "3", "--seed", "4"])
            .env("PRIVSTATE_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(oracle("1"), oracle("3"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["state", "build", "--kind", "nonsense"]), 4);
    assert_eq!(code(&["bounds", "curve", "--name", "nonsense", "--grid", "1:2"]), 4);
    assert_eq!(code(&["protocol", "rate", "--m", "2.5"]), 4);
    assert_eq!(code(&["state", "build", "--kind", "flower", "--theta", "1"]), 4);

    let dir = TempDir::new().unwrap();
    let f = path(&dir, "f.json");
    ok(&["state", "build", "--kind", "flower", "--out", &f]);
    assert_eq!(code(&["measure", "relent", &f]), 4);
    assert_eq!(code(&["measure", "abssep2q", &f]), 2);
    assert_eq!(code(&["measure", "entropy", &path(&dir, "missing.json")]), 2);

    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, r#"{"dims":[2],"cut":1,"data":[[1,0],[0,0],[0,0],[-0.5,0]]}"#).unwrap();
    assert_eq!(code(&["measure", "entropy", &bad]), 2);
    std::fs::write(&bad, r#"{"dims":[2],"cut":1,"data":[[1,0]]}"#).unwrap();
    assert_eq!(code(&["measure", "entropy", &bad]), 2);

    assert_eq!(code(&["state", "build", "--kind", "flower", "--d", "8", "--budget-dim", "100"]), 3);
    assert_eq!(code(&["protocol", "oracle", "--m", "12"]), 3);
    assert_eq!(code(&["protocol", "rate", "--m", "1"]), 2);
    assert_eq!(code(&["bounds", "zd", "--d", "1"]), 2);
}
