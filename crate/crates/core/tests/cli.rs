use std::path::Path;
use std::process::{Command, Output};

use modunfold::json;
use modunfold::recovery::TrialReport;
use modunfold::signal::{SampleStream, SignalSpec};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modunfold")).current_dir(dir).args(args).output().expect("spawn cli")
}

fn gen(dir: &Path, name: &str, seed: &str) {
    let out = cli(dir, &["gen", "--w", "1", "--energy", "1", "--terms", "8", "--seed", seed, "-o", name]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "a.json", "7");
    gen(dir.path(), "b.json", "7");
    gen(dir.path(), "c.json", "8");
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    assert_ne!(a, std::fs::read(dir.path().join("c.json")).unwrap());
    let spec: SignalSpec = json::read_file(&dir.path().join("a.json")).unwrap();
    assert!(spec.energy_e() <= 1.0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["gen", "--terms", "0", "-o", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("x.json").exists());
    let out = cli(dir.path(), &["pipeline", "--signal", "x.json", "--ts", "0.25", "--delta", "0.1", "--kind", "lpc", "-o", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_recovers_and_writes_stream() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "sig.json", "3");
    let out = cli(
        dir.path(),
        &["pipeline", "--signal", "sig.json", "--ts", "0.25", "--delta", "0.1", "--kind", "chebyshev", "-o", "r.json", "--recovered", "x.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: TrialReport = json::read_file(&dir.path().join("r.json")).unwrap();
    assert!(report.success);
    assert!(report.max_recovery_error.unwrap() <= 1e-7);
    let rec: SampleStream = json::read_file(&dir.path().join("x.json")).unwrap();
    assert_eq!(rec.start_index(), report.n_start);
    assert_eq!(rec.end_index(), report.n_end);
    assert_eq!(rec.folded_delta(), None);
}

#[test]
fn pipeline_baseline_and_degenerate_runs() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "sig.json", "3");
    let out = cli(
        dir.path(),
        &["pipeline", "--signal", "sig.json", "--ts", "0.45", "--delta", "0.1", "--kind", "difference", "--order", "6", "-o", "d.json"],
    );
    assert!(out.status.success());
    let report: TrialReport = json::read_file(&dir.path().join("d.json")).unwrap();
    assert!(!report.success);

    let out = cli(dir.path(), &["pipeline", "--signal", "sig.json", "--ts", "0.25", "--delta", "1e6", "-o", "k1.json"]);
    assert!(out.status.success());
    let report: TrialReport = json::read_file(&dir.path().join("k1.json")).unwrap();
    assert!(report.success && report.degenerate_order);
    assert_eq!(report.order, 1);
}

#[test]
fn infeasible_rate_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "sig.json", "1");
    let out = cli(dir.path(), &["pipeline", "--signal", "sig.json", "--ts", "0.5", "--delta", "0.1", "-o", "r.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
    let out = cli(dir.path(), &["pipeline", "--signal", "missing.json", "--ts", "0.25", "--delta", "0.1", "-o", "r.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["sweep", "--delta", "-o", "empty.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let empty = std::fs::read_to_string(dir.path().join("empty.csv")).unwrap();
    assert_eq!(empty, "wts,delta,kind,order,max_pred_err,max_rec_err,success\n");

    let args = ["sweep", "--wts", "0.25,0.45", "--delta", "0.1", "--kind", "chebyshev,difference", "--order", "2,6", "--trials", "3", "--seed", "5"];
    let run = |name: &str| {
        let mut a = args.to_vec();
        a.extend(["-o", name]);
        assert!(cli(dir.path(), &a).status.success());
        std::fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert!(!first.contains('\r'));
    let rows: Vec<Vec<&str>> = first.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 3 * 3);
    for r in &rows {
        let success = r[6] == "true";
        let rec: f64 = r[5].parse().unwrap();
        let delta: f64 = r[1].parse().unwrap();
        assert_eq!(success, rec <= 1e-6 * delta);
        if r[2] == "chebyshev" {
            assert!(success);
        }
        if r[2] == "difference" && r[0].starts_with("4.5") {
            assert!(!success);
        }
        // 17 significant digits
        assert_eq!(r[0].split('e').next().unwrap().len(), 18);
    }
}

#[test]
fn noise_demo_collapses() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "sig.json", "0");
    let out = cli(dir.path(), &["noise-demo", "--signal", "sig.json", "--ts", "0.4", "--delta", "0.1", "--noise", "0.001", "-o", "n.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: TrialReport = json::read_file(&dir.path().join("n.json")).unwrap();
    assert!(!report.success);
    assert!(report.max_recovery_error.unwrap() > 0.1);

    let out = cli(dir.path(), &["noise-demo", "--signal", "sig.json", "--ts", "0.4", "--delta", "0.1", "--noise", "0", "-o", "q.json"]);
    assert!(out.status.success());
    let quiet: TrialReport = json::read_file(&dir.path().join("q.json")).unwrap();
    let out = cli(dir.path(), &["pipeline", "--signal", "sig.json", "--ts", "0.4", "--delta", "0.1", "-o", "p.json"]);
    assert!(out.status.success());
    let clean: TrialReport = json::read_file(&dir.path().join("p.json")).unwrap();
    assert_eq!(quiet, clean);
    assert!(clean.success);
}
