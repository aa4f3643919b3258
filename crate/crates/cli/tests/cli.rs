use std::path::PathBuf;
use std::process::{Command, Output};

use qsd_cli::RunManifest;

fn qsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsd")).args(args).env_remove("QSD_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsd-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn invert_nig_at_zero() {
    let o = qsd(&["invert", "--family", "nig", "--a", "1", "--d", "1", "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("alpha=1 "), "{}", stdout(&o));
}

#[test]
fn invert_meixner_band_has_two_branches() {
    let o = qsd(&["invert", "--family", "meixner", "--b", "-1.5707963", "--d", "1", "--lambda", "-0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 2, "{s}");
    assert!(lines[0].contains("branch=principal") && lines[1].contains("branch=upper"), "{s}");
}

#[test]
fn forward_vg_at_zero() {
    let o = qsd(&["forward", "--family", "vg", "--C", "1", "--beta", "1.5", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let first = s.lines().next().unwrap();
    let v: f64 = first.strip_prefix("lambda=").unwrap().parse().unwrap();
    assert!((v - 0.5877866649).abs() < 1e-10, "{s}");
    assert!(s.contains("lambda_quadrature=") && s.contains("difference="));
}

#[test]
fn meixner_alpha0() {
    let o = qsd(&["meixner-alpha0", "--a", "1.5707963267948966", "--d", "1"]);
    assert_eq!(stdout(&o).trim(), "lambda=0.69314718056");
}

#[test]
fn validation_errors_exit_one() {
    let o = qsd(&["forward", "--family", "nig", "--a", "1", "--d", "1", "--alpha", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid input"));
    let o = qsd(&["check", "--family", "nig", "--a", "1", "--d", "1", "--alpha", "1.5", "--lambda", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(qsd(&["forward", "--alpha"]).status.code(), Some(1));
    assert_eq!(qsd(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn check_reports_small_residuals() {
    let o = qsd(&["check", "--family", "cgmy", "--C", "1", "--beta", "1.5", "--Y", "0.5", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_emits_csv() {
    let o = qsd(&["sweep", "--family", "nig", "--a", "1", "--d", "1", "--alpha-grid", "0.2:1.8:5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().next().unwrap().starts_with("alpha,"), "{s}");
    assert_eq!(s.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn out_file_has_manifest_and_seed_env_is_honoured() {
    let path = scratch("dual.csv");
    let p = path.to_str().unwrap();
    let args = [
        "mc-duality", "--family", "nig", "--a", "1", "--d", "1", "--alpha", "1.5", "--payoff", "put", "--strike", "1",
        "--paths", "20000", "--out", p,
    ];
    let o = Command::new(env!("CARGO_BIN_EXE_qsd")).args(args).env("QSD_SEED", "7").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("test_name,family,alpha,lambda,lhs,lhs_se,rhs,rhs_se,z,n_paths,seed\n"));
    assert!(csv.lines().nth(1).unwrap().ends_with(",20000,7"), "{csv}");
    let m = RunManifest::read(&RunManifest::sidecar_path(&path)).unwrap();
    assert_eq!(m.command, "mc-duality");
    assert_eq!(m.seed, Some(7));
    assert_eq!(m.tool_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(m.parameters.get("payoff.payoff").map(String::as_str), Some("put"));
    assert!(chrono::DateTime::parse_from_rfc3339(&m.timestamp).is_ok());
}

#[test]
fn hedge_csv_rows_per_grid() {
    let o = qsd(&[
        "hedge", "--family", "bs", "--sigma", "0.2", "--alpha", "0.5", "--barrier", "0.8", "--payoff", "call",
        "--strike", "1.1", "--steps", "4,16", "--paths", "5000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 3, "{s}");
    assert!(s.starts_with("family,alpha,lambda,H_over_S0,"));
}

#[test]
fn in_process_runner_matches_binary() {
    let argv = ["qsd", "invert", "--family", "nig", "--a", "1", "--d", "1", "--lambda", "0"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(qsd_cli::run_with(argv, &mut out, &mut err), 0);
    assert_eq!(String::from_utf8(out).unwrap(), stdout(&qsd(&argv[1..])));
}
