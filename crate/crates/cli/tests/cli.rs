use std::path::PathBuf;
use std::process::{Command, Output};

fn sr1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sr1"))
        .args(args)
        .env_remove("SR1_THREADS")
        .output()
        .expect("failed to spawn sr1")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn smallest_track_run() {
    let o = sr1(&["track", "--dim", "1", "--lambda", "0.5", "--steps", "1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("steps=1 applied=1"));
}

#[test]
fn help_documents_every_flag() {
    let cases: &[(&str, &[&str])] = &[
        (
            "track",
            &[
                "--dim",
                "--lambda",
                "--steps",
                "--seed",
                "--window",
                "--c-min",
                "--assert-bounds",
                "--output",
                "--out",
            ],
        ),
        (
            "invert",
            &[
                "--dim",
                "--lambda",
                "--steps",
                "--seed",
                "--random-directions",
                "--assert-bounds",
            ],
        ),
        ("uli-check", &["--file", "--window", "--dim", "--output"]),
        (
            "table1",
            &["--dim", "--lambdas", "--steps", "--trials", "--seed", "--out"],
        ),
        (
            "table2",
            &["--dim", "--lambda", "--steps", "--trials", "--seed", "--no-resample"],
        ),
        (
            "qn-demo",
            &["--dim", "--steps", "--window", "--c-min", "--assert-bounds"],
        ),
        ("geodesic", &["--config", "--output", "--out"]),
    ];
    for (cmd, flags) in cases {
        let o = sr1(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd} --help");
        let text = stdout(&o);
        for flag in *flags {
            assert!(text.contains(flag), "{cmd} --help lacks {flag}");
        }
    }
    assert_eq!(sr1(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_one() {
    for args in [
        &["track", "--bogus"][..],
        &["frobnicate"],
        &["track", "--lambda", "1.5"],
        &["track", "--dim", "0"],
        &["table1", "--trials", "0"],
        &["uli-check", "--file", "/nonexistent.csv", "--window", "3", "--dim", "3"],
        &["track", "--output", "xml"],
    ] {
        let o = sr1(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn uli_check_rejects_ragged_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    std::fs::write(&path, "1,0,0\n0,1\n").unwrap();
    let o = sr1(&[
        "uli-check",
        "--file",
        path.to_str().unwrap(),
        "--window",
        "1",
        "--dim",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn assert_bounds_passes_on_standard_runs() {
    for args in [
        &["track", "--steps", "60", "--seed", "7", "--assert-bounds"][..],
        &["invert", "--steps", "40", "--seed", "7", "--assert-bounds"],
        &[
            "invert",
            "--steps",
            "40",
            "--seed",
            "7",
            "--random-directions",
            "--assert-bounds",
        ],
        &["qn-demo", "--steps", "12", "--assert-bounds"],
    ] {
        assert_eq!(sr1(args).status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn uli_check_on_degenerating_fixture() {
    let o = sr1(&[
        "uli-check",
        "--file",
        &fixture("degenerating_d3.csv"),
        "--window",
        "4",
        "--dim",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("start,alpha,beta,gamma,subset"));
    let beta: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(beta.len(), 300 - 4);
    // block minima of β keep falling as k grows
    let minima: Vec<f64> = beta
        .chunks(37)
        .map(|c| c.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    for w in minima.windows(2) {
        assert!(w[1] < w[0], "{minima:?}");
    }
    assert!(minima.last().unwrap() * 2.5 < minima[0]);
}

#[test]
fn table2_layout() {
    let o = sr1(&[
        "table2", "--dim", "10", "--lambda", "0.5", "--trials", "20", "--seed", "42", "--output", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "param,steps,mean,max,trials");
    assert_eq!(lines.len(), 9);
    let params: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(&params[..4], &["canonical"; 4]);
    assert_eq!(&params[4..], &["random"; 4]);
    assert!(lines[1..].iter().all(|l| l.ends_with(",20")));
}

#[test]
fn table_written_into_directory_with_default_name() {
    let dir = tempfile::tempdir().unwrap();
    let o = sr1(&[
        "table1",
        "--dim",
        "3",
        "--trials",
        "2",
        "--steps",
        "3,6",
        "--seed",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("table1_9.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn json_outputs_parse() {
    for args in [
        &["track", "--steps", "15", "--output", "json"][..],
        &[
            "table1", "--dim", "3", "--trials", "2", "--steps", "3", "--output", "json",
        ],
        &[
            "uli-check",
            "--file",
            &fixture("degenerating_d3.csv"),
            "--window",
            "3",
            "--dim",
            "3",
            "--output",
            "json",
        ],
    ] {
        let o = sr1(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let _: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    }
}

#[test]
fn geodesic_reads_config_and_reports_bad_fields() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("g.json");
    std::fs::write(&good, r#"{"iterations": 3, "grid": 20, "seed": 1}"#).unwrap();
    let o = sr1(&["geodesic", "--config", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("iter,cost,grad_norm,max_binv_residual,step\n"));
    assert_eq!(out.lines().count(), 4);

    let bad = dir.path().join("b.json");
    std::fs::write(&bad, r#"{"iterations": 3, "sigmaa": 1}"#).unwrap();
    assert_eq!(
        sr1(&["geodesic", "--config", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["table1", "--dim", "4", "--trials", "6", "--steps", "4,8", "--seed", "3"];
    let seq = sr1(&args);
    let par = Command::new(env!("CARGO_BIN_EXE_sr1"))
        .args(args)
        .env("SR1_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(seq.stdout, par.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_sr1"))
        .args(args)
        .env("SR1_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn trailing_separator_creates_table_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = format!("{}/nested/", dir.path().display());
    let o = sr1(&[
        "table2", "--dim", "3", "--trials", "2", "--steps", "3", "--seed", "4", "--output", "json", "--out", &target,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("nested/table2_4.json")).unwrap();
    let _: serde_json::Value = serde_json::from_str(&text).unwrap();
}
