use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn xpdc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xpdc"))
        .args(["--out", dir.to_str().unwrap()])
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const QUIET: &str = "[source]\nbackground = none\npair_rate = 0 /s\n[run]\nduration = 1 s\n";

#[test]
fn plan_reports_placement() {
    let dir = tempfile::tempdir().unwrap();
    let o = xpdc(dir.path(), &["plan"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("R(0.50)            1.0677 deg"), "{s}");
    assert!(s.contains("2 theta_B          84.18"), "{s}");
    assert!(s.contains("acceptance 0.0447"), "{s}");
    assert!(s.contains("polarization       0.010"), "{s}");
}

#[test]
fn zero_detuning_plan_fails_as_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[crystal]\ndetuning = 0 mdeg\n");
    let o = xpdc(dir.path(), &["--config", &cfg, "plan"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xpdc(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        xpdc(dir.path(), &["--seed", "x", "plan"]).status.code(),
        Some(1)
    );
    let cfg = write_config(dir.path(), "[beam]\nenergy = 22\n");
    assert_eq!(
        xpdc(dir.path(), &["--config", &cfg, "plan"]).status.code(),
        Some(1)
    );
    let cfg = write_config(dir.path(), "[beam]\ncolour = blue\n");
    assert_eq!(
        xpdc(dir.path(), &["--config", &cfg, "simulate"])
            .status
            .code(),
        Some(1)
    );
    let missing = dir.path().join("absent.conf");
    let o = xpdc(dir.path(), &["--config", missing.to_str().unwrap(), "plan"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn environment_overrides_reach_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_xpdc"))
        .args(["plan"])
        .env("XPDC_CRYSTAL_DETUNING", "40 mdeg")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("R(0.50)            2.13"),
        "{}",
        stdout(&o)
    );
    let o = Command::new(env!("CARGO_BIN_EXE_xpdc"))
        .current_dir(dir.path())
        .args(["plan"])
        .env("XPDC_NO_SUCH_KEY", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn silent_run_writes_header_only_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUIET);
    let o = xpdc(dir.path(), &["--config", &cfg, "--csv", "simulate"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let bytes = fs::read(dir.path().join("events.xpdc")).unwrap();
    assert_eq!(bytes.len(), 19);
    assert_eq!(&bytes[..4], b"XPDC");
    let csv = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1);
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("pairs_generated = 0"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[run]\nduration = 20 s\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = xpdc(d, &["--config", &cfg, "--seed", "17", "simulate"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let fa = fs::read(a.join("events.xpdc")).unwrap();
    assert!(fa.len() > 19);
    assert_eq!(fa, fs::read(b.join("events.xpdc")).unwrap());
    assert_eq!(
        fs::read(a.join("manifest.txt")).unwrap(),
        fs::read(b.join("manifest.txt")).unwrap()
    );
    let c = dir.path().join("c");
    xpdc(&c, &["--config", &cfg, "--seed", "18", "simulate"]);
    assert_ne!(fa, fs::read(c.join("events.xpdc")).unwrap());
}

#[test]
fn simulate_analyze_report_chain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[run]\nduration = 10 min\nseed = 5\n");
    assert_eq!(
        xpdc(dir.path(), &["--config", &cfg, "simulate"])
            .status
            .code(),
        Some(0)
    );
    let events = dir.path().join("events.xpdc");
    let o = xpdc(
        dir.path(),
        &["--config", &cfg, "analyze", events.to_str().unwrap()],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("correlation_map.csv")).unwrap();
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(
        lines.next(),
        Some("e1_lo_ev,e1_hi_ev,dt_lo_ns,dt_hi_ns,counts")
    );
    assert!(lines.all(|l| l.split(',').count() == 5));
    let summary = fs::read_to_string(dir.path().join("analysis.txt")).unwrap();
    assert!(summary.contains("net_rate_per_hour = "));
    let o = xpdc(dir.path(), &["--config", &cfg, "report"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(dir.path().join("report.txt").exists());
}

#[test]
fn report_from_rate() {
    let dir = tempfile::tempdir().unwrap();
    let o = xpdc(dir.path(), &["report", "--rate", "130"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let get = |k: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{k} = ")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("efficiency") / 5.3e-13 - 1.0).abs() < 0.1);
    assert!((get("photons_per_observed_pair") / 2.7e14 - 1.0).abs() < 0.05);
}

#[test]
fn corrupt_event_file_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.xpdc");
    fs::write(&bad, b"XPDC\x01\x00garbage").unwrap();
    let o = xpdc(
        dir.path(),
        &["analyze", bad.to_str().unwrap(), "--duration", "10"],
    );
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("none.xpdc");
    let o = xpdc(dir.path(), &["analyze", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_point_scan_still_writes_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[run]\nduration = 30 s\n");
    let o = xpdc(
        dir.path(),
        &[
            "--config",
            &cfg,
            "scan",
            "--detunings",
            "10",
            "--seeds",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scan fit failed"));
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert!(csv.contains("# fit_error"));
    let rows: Vec<_> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("10.0,"));
}
