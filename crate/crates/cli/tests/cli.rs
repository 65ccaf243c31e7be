use std::path::PathBuf;
use std::process::{Command, Output};

fn gdn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdn")).args(args).output().expect("binary runs")
}

fn gdn_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdn"))
        .args(args)
        .env("GDN_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gdn-cli-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, body: &str) -> String {
    let path = scratch(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn estimate_smooth_row() {
    let out = gdn(&[
        "estimate", "--class", "smooth", "--p", "1", "--m", "1", "--eps", "0.1", "--delta", "0.5", "--lip", "1",
        "--kappa1", "1", "--kappa2", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["depth_order"].as_f64().unwrap() - 156.25).abs() < 1e-9);
}

#[test]
fn estimate_efficient_width() {
    let out = gdn(&["estimate", "--efficient-n", "1", "--p", "1", "--m", "2", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["width_lo"], 2);
    assert_eq!(v["width_hi"], 28);
}

#[test]
fn estimate_usage_errors() {
    let no_b = gdn(&["estimate", "--class", "continuous", "--p", "1", "--m", "1", "--eps", "0.1", "--delta", "0.5", "--lip", "1"]);
    assert_eq!(no_b.status.code(), Some(2));
    let with_b = gdn(&[
        "estimate", "--class", "continuous", "--p", "1", "--m", "1", "--eps", "0.1", "--delta", "0.5", "--lip", "1", "--B",
        "1",
    ]);
    assert_eq!(with_b.status.code(), Some(0));
    assert_eq!(gdn(&["estimate", "--p", "1"]).status.code(), Some(2));
    assert_eq!(gdn(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn compile_euclidean_product() {
    let net = scratch("xy.json");
    let out = gdn(&[
        "compile", "--target", "poly:x1*x2", "--domain", "euclidean:2", "--codomain", "euclidean:1", "--base-x", "0.5,0.5",
        "--radius", "0.5", "--eps", "0.1", "--activation", "exp", "--out", net.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["measured_error"].as_f64().unwrap() <= 0.1);
    let pts = write("xy_pts.csv", "0.5,0.5\n0.7,0.4\n");
    let eval = gdn(&["eval", "--model", net.to_str().unwrap(), "--points", &pts]);
    assert_eq!(eval.status.code(), Some(0));
    let rows: Vec<f64> = String::from_utf8(eval.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert!((rows[0] - 0.25).abs() <= 0.1 && (rows[1] - 0.28).abs() <= 0.1);
}

#[test]
fn compile_sphere_rotation_and_guard() {
    let out = gdn(&[
        "compile", "--target", "rotation", "--domain", "sphere:2", "--base-x", "0,0,1", "--radius", "1.5707963267948966",
        "--eps", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["measured_error"].as_f64().unwrap() <= 0.1);
    let far = gdn(&["compile", "--target", "rotation", "--domain", "sphere:2", "--base-x", "0,0,1", "--radius", "3.2", "--eps", "0.1"]);
    assert_eq!(far.status.code(), Some(2));
    let relu = gdn(&[
        "compile", "--target", "rotation", "--domain", "sphere:2", "--base-x", "0,0,1", "--radius", "1", "--eps", "0.1",
        "--activation", "relu",
    ]);
    assert_eq!(relu.status.code(), Some(1));
}

#[test]
fn eval_manifold_ops() {
    let out = gdn(&["eval", "--manifold", "sphere:2", "--op", "distance", "--x", "0,0,1", "--y", "1,0,0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1.5707963267948966e0");
    let bad = gdn(&["eval", "--manifold", "sphere:2", "--op", "distance", "--x", "0,0,2", "--y", "1,0,0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn certify_examples() {
    let d = write("d3.csv", "0\n0.5\n1\n");
    let v = write("v3.csv", "0\n0.25\n1\n");
    let base = ["--domain", "euclidean:1", "--codomain", "euclidean:1", "--base-x", "0", "--base-y", "0"];
    let out = gdn(&[&["certify", "--dataset", &d, "--values", &v][..], &base].concat());
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["n"], 2);
    assert!(c["M"].as_f64().unwrap() > 0.0);

    let far = write("far.csv", "1.2,0.3\n0.5,0.5\n");
    let fv = write("far_v.csv", "0\n1\n");
    let out = gdn(&[
        "certify", "--dataset", &far, "--values", &fv, "--domain", "euclidean:2", "--codomain", "euclidean:1", "--base-x",
        "0,0", "--base-y", "0",
    ]);
    let c = json(&out);
    assert_eq!(c["normalizable"], false);
    assert_eq!(c["witness_box"], serde_json::json!([[0.0, 1.2], [0.0, 0.5]]));

    let bad = write("bad.csv", "0\n0.5\nzz\n");
    let out = gdn(&[&["certify", "--dataset", &bad, "--values", &v][..], &base].concat());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let s = write("south.csv", "0,0,-1\n");
    let sv = write("south_v.csv", "0\n");
    let out = gdn(&[
        "certify", "--dataset", &s, "--values", &sv, "--domain", "sphere:2", "--codomain", "euclidean:1", "--base-x", "0,0,1",
        "--base-y", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_is_deterministic() {
    let cfg = write(
        "bench.json",
        r#"{"domain":"sphere:2","codomain":"sphere:2","base_x":[0,0,1],"target":"rotation","radius":1.2,
            "eps":[0.2,0.05],"activation":"exp","grid":300,"seed":7}"#,
    );
    let one = gdn_env(&["bench", "--config", &cfg], "1");
    let four = gdn_env(&["bench", "--config", &cfg], "4");
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let mut rdr = csv::Reader::from_reader(one.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let eps: f64 = r[1].parse().unwrap();
        let err: f64 = r[2].parse().unwrap();
        assert!(err <= eps);
        assert_eq!(&r[7], "");
    }
    assert_eq!(gdn_env(&["bench", "--config", &cfg], "zero").status.code(), Some(2));
}
