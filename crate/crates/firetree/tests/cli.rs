use std::fs;
use std::process::Command;

use firetree::textio::{read_tree, OutcomeRow};

fn firetree() -> Command {
    Command::new(env!("CARGO_BIN_EXE_firetree"))
}

#[test]
fn list_names_every_experiment() {
    let out = firetree().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in firetree::experiments::names() {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn experiment_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let status = firetree()
        .args(["phase_transition", "--n", "2000", "--p", "0.0005", "--trials", "30", "--seed", "3"])
        .args(["--workers", "2", "--K", "4", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("phase_transition.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, OutcomeRow::header(4));
    let rows: Vec<OutcomeRow> = reader
        .records()
        .map(|r| {
            let fields: Vec<String> = r.unwrap().iter().map(String::from).collect();
            OutcomeRow::parse(&fields, 4).unwrap()
        })
        .collect();
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r.n == 2000 && r.p == 0.0005));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("phase_transition.json")).unwrap())
            .unwrap();
    assert_eq!(json["p"], 0.0005);
    assert_eq!(json["config"]["trials"], 30);
    assert_eq!(json["regime_class"]["class"], "supercritical");
    assert_eq!(json["tests"][0]["name"], "mean_I_over_n_supercritical");
}

#[test]
fn exit_code_reflects_the_verdicts() {
    let status = firetree()
        .args(["largest_fireproof", "--n", "500", "--p", "0.0001", "--trials", "5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    // no finite tree puts mass exactly at I/n = 1, so the KS distance to
    // ε_c ∧ 1 stays near e^{-c}
    let status = firetree()
        .args(["phase_transition", "--n", "2000", "--c", "1", "--trials", "50"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_one() {
    let cases: [&[&str]; 5] = [
        &["no_such_experiment"],
        &["phase_transition", "--p", "1.5"],
        &["phase_transition", "--trials", "0"],
        &["phase_transition", "--p", "0.1", "--c", "1"],
        &["phase_transition", "--dump-tree", "x.txt"],
    ];
    for args in cases {
        let out = firetree().args(args).output().unwrap();
        assert_ne!(out.status.code(), Some(0), "{args:?}");
        assert_ne!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn simulate_dumps_a_readable_tree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.txt");
    let out = firetree()
        .args(["simulate", "--n", "300", "--c", "1", "--seed", "11", "--dump-tree"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["n"], 300);
    let tree = read_tree(fs::File::open(&path).map(std::io::BufReader::new).unwrap()).unwrap();
    assert_eq!(tree.n(), 300);
    assert!(tree.is_recursive());

    let again = firetree()
        .args(["simulate", "--p", "0.01", "--tree"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(again.status.success());
    let replay: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!(replay["n"], 300);
    assert_eq!(replay["p"], 0.01);
}

#[test]
fn runs_are_reproducible_from_the_command_line() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (dir, workers) in dirs.iter().zip(["1", "8"]) {
        let status = firetree()
            .args(["cut_tree_laws", "--n", "2000", "--trials", "40", "--seed", "5", "--workers", workers])
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.code() == Some(0) || status.code() == Some(2));
    }
    let a = fs::read(dirs[0].path().join("cut_tree_laws.csv")).unwrap();
    let b = fs::read(dirs[1].path().join("cut_tree_laws.csv")).unwrap();
    assert_eq!(a, b);
}
