use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hk1lab")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn build_default_stage_two_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["build"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    for sys in ["A", "B"] {
        let stage2 = &r["details"][sys]["stages"][1];
        let sizes: Vec<&str> = stage2.as_array().unwrap().iter().map(|b| b["size"].as_str().unwrap()).collect();
        assert_eq!(sizes, ["4", "4"]);
    }
    // exact rational points in patterns
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(text.contains("\"1/2\""));
}

#[test]
fn build_single_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["build", "--stages", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["details"]["A"]["stages"].as_array().unwrap().len(), 1);
    assert_eq!(r["details"]["A"]["stages"][0].as_array().unwrap().len(), 1);
    assert!(r["details"]["A"]["steps"].as_array().unwrap().is_empty());
}

#[test]
fn non_increasing_k_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"k_seq": [2, 3, 3, 5, 6]}"#).unwrap();
    let o = run(&["build", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("strictly increasing"));

    std::fs::write(&cfg, r#"{"k_seq": [2, 3], "bogus": 1}"#).unwrap();
    assert_eq!(run(&["build", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["build", "--grid", "1"], dir.path()).status.code(), Some(2));
}

#[test]
fn coarse_grid_verify_fails_but_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--grid", "16"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let r = report(dir.path());
    assert_eq!(r["pass"], false);
    let text = serde_json::to_string(&r).unwrap();
    assert!(text.contains("grid too coarse"));
    assert!(dir.path().join("ramps.csv").exists());
}

#[test]
fn obstruct_default_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["obstruct", "--corner", "1", "--amplitude", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path());
    assert_eq!(r["details"]["m"], 3);
    assert_eq!(r["details"]["ratio"], "16/1");
    assert!(r["details"]["lower_bound"].as_f64().unwrap() >= 3.0);
    let csv = std::fs::read_to_string(dir.path().join("ramp.csv")).unwrap();
    assert!(csv.starts_with("t,ramp\n"));

    let big = tempfile::tempdir().unwrap();
    let o = run(&["obstruct", "--amplitude", "1000"], big.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(big.path())["pass"], false);
}

#[test]
fn reruns_are_byte_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for args in [&["obstruct", "--amplitude", "2"][..], &["uvd", "--stages", "4", "--grid", "256"][..]] {
        assert!(run(args, d1.path()).status.success());
        assert!(run(args, d2.path()).status.success());
        let a = std::fs::read(d1.path().join("report.json")).unwrap();
        let b = std::fs::read(d2.path().join("report.json")).unwrap();
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn seed_change_keeps_verdicts() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let small = ["verify", "--grid", "512"];
    let o1 = run(&[&small[..], &["--seed", "1"]].concat(), d1.path());
    let o2 = run(&[&small[..], &["--seed", "2"]].concat(), d2.path());
    assert_eq!(o1.status.code(), Some(0), "{}", String::from_utf8_lossy(&o1.stdout));
    assert_eq!(o1.status.code(), o2.status.code());
    let verdicts = |d: &Path| -> Vec<bool> {
        report(d)["sections"].as_array().unwrap().iter().map(|s| s["pass"].as_bool().unwrap()).collect()
    };
    assert_eq!(verdicts(d1.path()), verdicts(d2.path()));
}

#[test]
fn inv0_writes_step_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["inv0", "--stages", "4", "--grid", "256"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["details"]["steps"].as_array().unwrap().len(), 3);
}
