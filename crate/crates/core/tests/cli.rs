use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_consensus-hpo"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const POINTS: &str = "0,0\n0,1\n1,0\n10,10\n10,11\n11,10\n";

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["cluster", "--bogus"])), 2);
}

#[test]
fn zero_k_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "p.csv", POINTS);
    let labels = dir.path().join("l.txt");
    let out = run(&[
        "cluster",
        "--data",
        &data,
        "--algo",
        "kmeans",
        "--k",
        "0",
        "--out",
        labels.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("k must be >= 1"));
    assert!(!labels.exists());
}

#[test]
fn missing_input_is_an_io_error() {
    let out = run(&[
        "cluster",
        "--data",
        "/nonexistent/p.csv",
        "--algo",
        "kmeans",
        "--k",
        "2",
        "--out",
        "/tmp/unused.txt",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cluster_writes_labels() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "p.csv", POINTS);
    let labels = dir.path().join("l.txt");
    let out = run(&[
        "cluster",
        "--data",
        &data,
        "--algo",
        "dbscan",
        "--eps",
        "1.5",
        "--min-pts",
        "2",
        "--out",
        labels.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        std::fs::read_to_string(labels)
            .unwrap()
            .split_whitespace()
            .collect::<Vec<_>>(),
        ["0", "0", "0", "1", "1", "1"]
    );
}

#[test]
fn select_validation() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "p.csv", POINTS);
    let grid = write(
        dir.path(),
        "g.json",
        r#"[{"algorithm": "kmeans", "k": [2, 3], "seed": 0}]"#,
    );
    let out_dir = dir.path().join("out");
    let od = out_dir.to_str().unwrap();

    let out = run(&[
        "select",
        "--data",
        &data,
        "--grid",
        &grid,
        "--strategy",
        "best-match",
        "--out-dir",
        od,
    ]);
    assert_eq!(code(&out), 2);

    let single = write(
        dir.path(),
        "one.json",
        r#"[{"algorithm": "kmeans", "k": 2, "seed": 0}]"#,
    );
    let out = run(&[
        "select",
        "--data",
        &data,
        "--grid",
        &single,
        "--strategy",
        "anmi",
        "--out-dir",
        od,
    ]);
    assert_eq!(code(&out), 2);

    let dup = write(
        dir.path(),
        "dup.json",
        r#"[{"algorithm": "kmeans", "k": [2, 3], "seed": 0}, {"algorithm": "kmeans", "k": 2, "seed": 0}]"#,
    );
    let out = run(&[
        "select",
        "--data",
        &data,
        "--grid",
        &dup,
        "--strategy",
        "anmi",
        "--out-dir",
        od,
    ]);
    assert_eq!(code(&out), 2);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("kmeans(k=2"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = run(&[
        "select",
        "--data",
        &data,
        "--grid",
        &grid,
        "--strategy",
        "best-match",
        "--k-star",
        "2",
        "--out-dir",
        od,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("chosen: kmeans(k=2"), "{stdout}");
    assert!(out_dir.join("selection_best_match.json").exists());
    assert!(out_dir.join("metrics.csv").exists());
}

#[test]
fn thread_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.txt");
    let o = run(&[
        "--threads",
        "0",
        "bench",
        "--n",
        "20",
        "--m",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_consensus-hpo"))
        .env("CONSENSUS_HPO_THREADS", "2")
        .args([
            "bench",
            "--n",
            "20",
            "--m",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
