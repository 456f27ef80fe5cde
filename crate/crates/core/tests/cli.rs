use std::path::Path;
use std::process::{Command, Output};

use cstrain::dictlearn::{sparse_factorization, FactorOptions};
use cstrain::io::{read_matrix_file, read_vector_file, write_matrix_file, write_vector_file};
use cstrain::models::{gen_component_matrix, gen_training_matrix, ModelSpec};
use cstrain::rng::RngStream;
use cstrain::DenseMatrix;

fn cstrain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstrain")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn rip_prints_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    write_matrix_file(&m, &DenseMatrix::identity(3)).unwrap();
    let out = cstrain(&["rip", "--matrix", p(&m), "--t", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let eps: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(eps.abs() < 1e-12);
}

#[test]
fn recover_on_identity_returns_rhs() {
    let dir = tempfile::tempdir().unwrap();
    let (m, b, x) = (dir.path().join("i.txt"), dir.path().join("b.txt"), dir.path().join("x.txt"));
    write_matrix_file(&m, &DenseMatrix::identity(4)).unwrap();
    write_vector_file(&b, &[1.0, 0.0, -3.0, 0.5]).unwrap();
    let out = cstrain(&["recover", "--matrix", p(&m), "--rhs", p(&b), "--out", p(&x)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got = read_vector_file(&x).unwrap();
    for (u, v) in got.iter().zip([1.0, 0.0, -3.0, 0.5]) {
        assert!((u - v).abs() < 1e-12);
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("x.txt.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "Optimal");

    // without --out the vector goes to standard output
    let out = cstrain(&["recover", "--matrix", p(&m), "--rhs", p(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let parsed = cstrain::io::read_matrix(out.stdout.as_slice()).unwrap();
    assert_eq!(parsed.shape(), (4, 1));
}

#[test]
fn domain_errors_exit_with_one_and_name_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let (m, b) = (dir.path().join("m.txt"), dir.path().join("b.txt"));
    write_matrix_file(&m, &DenseMatrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
    write_vector_file(&b, &[1.0, 2.0]).unwrap();
    let out = cstrain(&["recover", "--matrix", p(&m), "--rhs", p(&b)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Infeasible"));

    let out = cstrain(&["recover", "--matrix", p(&dir.path().join("missing.txt")), "--rhs", p(&b)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("IoError"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(cstrain(&["recover", "--matrix"]).status.code(), Some(2));
    assert_eq!(cstrain(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cstrain(&["rip", "--matrix", "m.txt", "--t", "2", "--unknown", "1"]).status.code(), Some(2));
    assert_eq!(cstrain(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_writes_matrix_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    let o = cstrain(&[
        "gen",
        "--kind",
        "component",
        "--n",
        "20",
        "--p",
        "3",
        "--theta",
        "0.3",
        "--seed",
        "7",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let x = read_matrix_file(&out).unwrap();
    assert_eq!(x, gen_component_matrix(20, 3, &ModelSpec::gaussian(0.3), &RngStream::new(7, 0)).unwrap());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("x.txt.json")).unwrap()).unwrap();
    assert_eq!(meta["rows"], 20);
    assert_eq!(meta["kind"], "component");
}

#[test]
fn factorize_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen_component_matrix(40, 3, &ModelSpec::gaussian(0.25), &RngStream::new(3, 1)).unwrap();
    let z = gen_training_matrix(3, 6, 1, &RngStream::new(3, 2)).unwrap();
    let y = x.matmul(&z).unwrap();
    let input = dir.path().join("y.txt");
    write_matrix_file(&input, &y).unwrap();
    let o = cstrain(&["factorize", "--input", p(&input), "--seed", "11", "--stream", "4", "--out-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lib = sparse_factorization(&y, &RngStream::new(11, 4), &FactorOptions::default()).unwrap();
    let x_bar = read_matrix_file(&dir.path().join("x_bar.txt")).unwrap();
    let z_bar = read_matrix_file(&dir.path().join("z_bar.txt")).unwrap();
    // the text format carries 17 significant digits, so values round-trip exactly
    assert_eq!(x_bar, lib.x_bar);
    assert_eq!(z_bar, lib.z_bar);
    assert!(dir.path().join("factorize.json").exists());
}

#[test]
fn experiment_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"dims": {"m": 24, "n": 40, "p": 4, "q": 8, "s": 8, "t": 2, "t_bar": 2, "u": 16},
            "trials": 3, "master_seed": 1, "output_dir": "ignored", "record_timings": false}"#,
    )
    .unwrap();
    let outdir = dir.path().join("run");
    let o = cstrain(&["experiment", "--config", p(&cfg), "--output-dir", p(&outdir), "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(outdir.join("trials.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial_index,seed,factorization_matched,rip_epsilon,pipeline_exact,direct_l1_exact,supp_true,supp_pipeline,supp_direct,t_train_s,t_recover_s"
    );
    assert_eq!(lines.count(), 2);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["trials"], 2);
    let rate = summary["pipeline_rate"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&rate));
}
