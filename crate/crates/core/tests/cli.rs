use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpn_mirror::report::Report;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cpn-mirror")
}

fn cli(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn gw_csv_golden_rows() {
    let o = cli(&["gw", "--n", "2", "--dmax", "5", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "d,m_2,N\n1,2,1\n2,5,1\n3,8,12\n4,11,620\n5,14,87304\n"
    );

    let o = cli(&["gw", "--n", "3", "--dmax", "1", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for row in ["1,0,2,1", "1,4,0,2", "1,2,1,1"] {
        assert!(text.lines().any(|l| l == row), "{row} missing from {text}");
    }

    let o = cli(&["gw", "--n", "1", "--dmax", "3", "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "d,N\n1,1\n");
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for p in &paths {
        let o = cli(&["verify", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert_eq!(a, b);
    let report: Report = serde_json::from_slice(&a).unwrap();
    assert!(report.passed());
    assert!(report.checks.iter().any(|c| c.name == "window-stability"));
    assert_eq!(report.checks.iter().filter(|c| c.name.starts_with("frame-invariance")).count(), 3);
}

#[test]
fn compute_reports_exact_numbers() {
    let o = cli(&["compute", "--n", "2", "--degree", "8", "--compare-oracle", "--checks", "wdvv,sigma"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Report = serde_json::from_slice(&o.stdout).unwrap();
    let n: Vec<String> = report.gw.iter().map(|e| e.value.to_string()).collect();
    assert_eq!(n, ["1", "1", "12"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"0,1,5\": \"1/60\""), "d=2 branch of e^(2 y1) (y2)^5/5!");
    assert!(text.contains("\"timings_ms\": {}"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&cli(&["compute", "--n", "2", "--degree", "2"])), 2);
    assert_eq!(code(&cli(&["compute", "--n", "0", "--degree", "4"])), 2);
    assert_eq!(code(&cli(&["compute", "--checks", "bogus"])), 2);
    assert_eq!(code(&cli(&["compute", "--n", "2", "--degree", "6", "--window-top", "5"])), 3);

    let o = cli(&["verify", "--degree", "4", "--inject-fault", "perturb-potential"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("FAIL wdvv"), "{err}");
    let report: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.failures().any(|c| c.witness.is_some()));
}

#[test]
fn examples_run() {
    let dir = Path::new(bin()).parent().unwrap().join("examples");
    for name in ["periods", "cp1_potential", "oracle_table", "small_quantum"] {
        let path = dir.join(name);
        if !path.exists() {
            eprintln!("skipping {name}: not built");
            continue;
        }
        let o = Command::new(&path).output().unwrap();
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
}
