//! End-to-end tests of the `permlab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn permlab(args: &[&str]) -> Output {
    permlab_env(args, None)
}

fn permlab_env(args: &[&str], workers_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_permlab"));
    cmd.args(args).env_remove("PERMLAB_WORKERS");
    if let Some(w) = workers_env {
        cmd.env("PERMLAB_WORKERS", w);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn ones(n: usize) -> String {
    (0..n).map(|_| vec!["1"; n].join(" ") + "\n").collect()
}

#[test]
fn per_hand_values() {
    let dir = tempfile::tempdir().unwrap();
    let small = write(dir.path(), "a.txt", "1 2\n3 4\n");
    let out = permlab(&["per", "--input", &small, "--algo", "ryser"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).starts_with("per = 10  log_per = "),
        "{}",
        stdout(&out)
    );
    let eight = write(dir.path(), "ones8.txt", &ones(8));
    for algo in ["naive", "ryser"] {
        let out = permlab(&["per", "--input", &eight, "--algo", algo]);
        assert!(
            stdout(&out).starts_with("per = 40320  log_per = 10.6046029027452"),
            "{}",
            stdout(&out)
        );
    }
}

#[test]
fn per_errors_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let twelve = write(dir.path(), "ones12.txt", &ones(12));
    let out = permlab(&["per", "--input", &twelve, "--algo", "naive"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("limit"));
    let ragged = write(dir.path(), "ragged.txt", "1 2\n3\n");
    assert_eq!(permlab(&["per", "--input", &ragged]).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        permlab(&["per", "--input", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(permlab(&["per", "--algo", "fast"]).status.code(), Some(2));
    assert_eq!(permlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn moments_report() {
    let out = permlab(&["moments", "--n", "3", "--r", "2", "--dist", "const:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("mu_n_exact   16/9"), "{text}");
    assert!(text.contains("theta        1.35914091422952"), "{text}");
    assert!(text.contains("r_low ≥ 6δ/ν² not met"), "{text}");
    let text = stdout(&permlab(&["moments", "--n", "3", "--r", "1,2,3"]));
    assert!(text.contains("mu_n_exact   4/3"), "{text}");
    assert!(text.contains("vdw          n/a"), "{text}");
    assert!(text.contains("theta        n/a"), "{text}");
    let text = stdout(&permlab(&[
        "moments", "--n", "16", "--r", "8", "--dist", "const:1",
    ]));
    assert!(
        text.contains("bound_low") && text.contains("bound_up"),
        "{text}"
    );
    assert_eq!(
        permlab(&["moments", "--n", "3", "--r", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(
        permlab(&["moments", "--n", "3", "--r", "2", "--dist", "exp:-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sample_prints_support_and_weights() {
    let out = permlab(&[
        "sample", "--n", "4", "--r", "1,2,3,4", "--dist", "exp:1", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let (x, y) = text.split_once("\n\n").unwrap();
    let x = permlab::domain::parse_matrix(x).unwrap();
    let y = permlab::domain::parse_matrix(y).unwrap();
    assert_eq!(x.row_support_sizes(), vec![1, 2, 3, 4]);
    assert_eq!(y.row_support_sizes(), vec![1, 2, 3, 4]);
    assert!(stderr(&out).contains("seed=9"));
}

#[test]
fn mc_matches_the_two_point_law() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("a.csv");
    let out = permlab(&[
        "mc",
        "--n",
        "3",
        "--r",
        "2",
        "--dist",
        "const:1",
        "--trials",
        "100000",
        "--seed",
        "7",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("seed=7"));
    assert!(stdout(&out).is_empty());
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.join(","), permlab::experiments::CSV_HEADER.join(","));
    let row = reader.records().next().unwrap().unwrap();
    let field = |name: &str| -> f64 {
        row[header.iter().position(|h| h == name).unwrap()]
            .parse()
            .unwrap()
    };
    assert!((field("var_ratio") - 0.125).abs() <= 3.0 * field("se_var"));
    assert!((field("mean_ratio") - 1.0).abs() <= 3.0 * field("se_mean"));
    assert_eq!(field("seed"), 7.0);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.cfg",
        "# mc defaults\nn = 4\nr = 2,2,3,4\ndist = exp:1\ntrials = 500\nseed = 21\nworkers = 2\n",
    );
    let from_file = permlab(&["--config", &cfg, "mc"]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    let from_flags = permlab(&[
        "mc", "--n", "4", "--r", "2,2,3,4", "--dist", "exp:1", "--trials", "500", "--seed", "21",
    ]);
    assert_eq!(from_file.stdout, from_flags.stdout);
    assert!(stderr(&from_file).contains("workers=2"));
    let overridden = permlab(&["mc", "--config", &cfg, "--seed", "22"]);
    assert!(stderr(&overridden).contains("seed=22"));
    assert_ne!(overridden.stdout, from_file.stdout);
    let bad = write(dir.path(), "bad.cfg", "trials = many\n");
    assert_eq!(
        permlab(&["--config", &bad, "mc", "--n", "3", "--r", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn workers_come_from_the_environment() {
    let args = [
        "mc", "--n", "3", "--r", "2", "--trials", "1000", "--seed", "3",
    ];
    let env = permlab_env(&args, Some("3"));
    assert!(stderr(&env).contains("workers=3"), "{}", stderr(&env));
    let flag = permlab_env(&[&args[..], &["--workers", "1"]].concat(), Some("3"));
    assert!(stderr(&flag).contains("workers=1"));
    assert_eq!(env.stdout, flag.stdout);
    assert_eq!(
        permlab(&[&args[..], &["--workers", "0"]].concat())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_writes_one_row_per_dimension() {
    let out = permlab(&[
        "sweep",
        "--n",
        "4,6,8",
        "--r-rule",
        "sqrt-log",
        "--dist",
        "uniform:0.5,1.5",
        "--trials",
        "200",
        "--seed",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,r_low,r_up,dist,trials,seed,mean_ratio,se_mean,var_ratio,se_var,p_dev,epsilon,a_n,c_n,exact_ratio,bound_low,bound_up");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("4,"));
    assert!(lines[3].starts_with("8,"));
    assert_eq!(
        permlab(&["sweep", "--n", "31", "--r-rule", "const:2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        permlab(&["sweep", "--n", "4", "--r-rule", "power:2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_passes_and_reports_the_anchor() {
    let out = permlab(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text
        .lines()
        .any(|l| l == "(3,(2,2,2),const:1): ET=16/9 ET²=32/9 ✓"));
    assert!(text.trim_end().ends_with(" 0 failed"));
}
