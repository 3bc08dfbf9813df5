use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vortex-wigner"));
    cmd.env_remove("VORTEX_WIGNER_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn eval_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let o = run(&["eval", "--grid", "rho=0:2:5,p_perp=0:2:5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("rho,phi_r,z,p_perp,phi_p,p_z,t,value\n"));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 1 + 25);
    let meta: serde_like::Meta = serde_like::parse(&std::fs::read_to_string(dir.path().join("grid.json")).unwrap());
    assert_eq!(meta.rows, 25);
    assert!(meta.has_version && meta.has_spec && meta.form == "momentum");
}

// Minimal field extraction so the test needs no JSON dependency.
mod serde_like {
    pub struct Meta {
        pub rows: usize,
        pub form: String,
        pub has_version: bool,
        pub has_spec: bool,
    }

    fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
        let start = text.find(&format!("\"{key}\":"))? + key.len() + 3;
        let rest = text[start..].trim_start();
        let end = rest.find([',', '\n']).unwrap_or(rest.len());
        Some(rest[..end].trim().trim_matches('"'))
    }

    pub fn parse(text: &str) -> Meta {
        Meta {
            rows: field(text, "rows").unwrap().parse().unwrap(),
            form: field(text, "form").unwrap().to_string(),
            has_version: field(text, "version").is_some(),
            has_spec: text.contains("\"spec\""),
        }
    }
}

#[test]
fn position_form_vanishes_on_axis_for_vortex() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pos.csv");
    let o = run(&["--ell", "1", "eval", "--form", "position", "--grid", "rho=0:2:4,p_perp=0:2:4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&out);
    let on_axis: Vec<_> = rows.iter().filter(|r| r[0] == 0.0).collect();
    assert_eq!(on_axis.len(), 4);
    assert!(on_axis.iter().all(|r| r[7] == 0.0));
    assert!(rows.iter().any(|r| r[7] > 0.0));
}

#[test]
fn gaussian_peak_is_eight() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("peak.csv");
    let o = run(&["--ell", "0", "eval", "--grid", "rho=0:1:2,p_perp=0:1:2,z=0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&out)[0][7], 8.0);
}

#[test]
fn eval_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "2", "3", "8"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let o = bin()
            .args(["--ell", "2", "--n-r", "1", "eval", "--form", "symmetric"])
            .args(["--grid", "rho=0:3:20,p_perp=0:3:20,z=-1:1:5", "--out", out.to_str().unwrap()])
            .env("VORTEX_WIGNER_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0].iter().filter(|&&b| b == b'\n').count(), 1 + 20 * 20 * 5);
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "ell = 3\nsigma_over_m = 0.02\n").unwrap();
    let out = dir.path().join("obs.csv");
    let o = run(&["--config", cfg.to_str().unwrap(), "--sigma-over-m", "0.04", "observables", "--ell-min", "3", "--ell-max", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let row = &csv_rows(&out)[0];
    // ⟨p⊥⟩ scales with σ, so the flag value 0.04 must have won
    let g3 = PI.sqrt() / 2.0 * 1.5 * 2.5 * 3.5 / 6.0;
    assert!((row[2] / (0.04 * g3) - 1.0).abs() < 1e-9, "{row:?}");
}

#[test]
fn observables_rows() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&run(&["observables", "--ell-min", "0", "--ell-max", "40", "--out", a.to_str().unwrap()])), 0);
    assert_eq!(
        code(&run(&["--sigma-over-m", "0.003", "observables", "--ell-min", "0", "--ell-max", "40", "--out", b.to_str().unwrap()])),
        0
    );
    let (ra, rb) = (csv_rows(&a), csv_rows(&b));
    assert_eq!(ra.len(), 41);
    assert!((ra[0][3] - PI / 4.0).abs() < 1e-10);
    assert!(ra[0][4].is_nan());
    assert!((ra[1][3] - 9.0 * PI / 16.0).abs() < 1e-10);
    for (x, y) in ra.iter().zip(&rb) {
        assert!((x[3] - y[3]).abs() <= 1e-12 * x[3], "σ-dependence at ℓ={}", x[0]);
    }
    assert!((0.95..=1.10).contains(&ra[40][4]), "{}", ra[40][4]);
}

#[test]
fn verify_suites_exit_zero_and_write_report() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["normalization", "boost"] {
        let report = dir.path().join(format!("{suite}.json"));
        let o = run(&["verify", "--suite", suite, "--report", report.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        let text = std::fs::read_to_string(&report).unwrap();
        assert!(text.contains("\"all_pass\": true"));
        assert!(String::from_utf8_lossy(&o.stdout).lines().all(|l| !l.starts_with("FAIL")));
    }
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["--set", "tolerances.observables=1e-30", "verify", "--suite", "observables", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(std::fs::read_to_string(&report).unwrap().contains("\"all_pass\": false"));
}

#[test]
fn usage_errors_exit_two_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "ell = 1\nnot_a_key = 3\n").unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "verify", "--suite", "normalization", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(!report.exists());

    let out = dir.path().join("x.csv");
    for args in [
        vec!["eval", "--grid", "rho=1:0:3", "--out", out.to_str().unwrap()],
        vec!["eval", "--grid", "rho=0:1:2,q=3", "--out", out.to_str().unwrap()],
        vec!["eval", "--form", "sideways", "--grid", "rho=0:1:2", "--out", out.to_str().unwrap()],
        vec!["--sigma-over-m", "0.5", "observables"],
        vec!["verify", "--suite", "everything"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
    assert!(!out.exists());
    let missing = dir.path().join("no/such/dir/x.csv");
    assert_eq!(code(&run(&["eval", "--grid", "rho=0:1:2", "--out", missing.to_str().unwrap()])), 2);
}

#[test]
fn oracle_and_marginal_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let o = run(&["--ell", "0", "--pbar-over-m", "0", "oracle", "--grid", "rho=0:1:2,p_perp=0:1:2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for r in csv_rows(&out) {
        // Gaussian mode at rest: closed form and oracle differ at O(σ²)
        assert!((r[7] / r[11] - 1.0).abs() < 1e-3, "{r:?}");
    }
    let m = dir.path().join("m.csv");
    let o = run(&["marginal", "--over", "x", "--grid", "p_perp=0:2:3,p_z=-1:1:3", "--out", m.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&m);
    assert_eq!(rows.len(), 9);
    for r in rows.iter().filter(|r| r[9] > 0.0) {
        assert!((r[7] / r[9] - 1.0).abs() < 1e-6, "{r:?}");
    }
}
