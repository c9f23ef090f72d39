//! End-to-end runs of the binary, one or more per exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_gabor-tauber");

const LATTICE: &str = r#""lattice": {"alpha": 0.5, "beta": 0.5, "k_range": [-20, 20], "n_range": [-8, 8]}"#;

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Run {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn cmd(&self, args: &[&str], config: &Path) -> Output {
        Command::new(BIN)
            .args(args)
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(self.out())
            .output()
            .unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out().join(name)).unwrap()).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("process exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn signal_config(signal: &str, window: &str, comparison_b: f64) -> String {
    format!(
        r#"{{"signal": {signal}, "window": {{"name": "{window}"}}, {LATTICE}, "comparison": {{"b": {comparison_b}, "L": "const:1"}}}}"#
    )
}

#[test]
fn stft_writes_all_nodes_deterministically() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "gaussian"}"#, "gaussian", 0.0));
    let o = r.cmd(&["stft"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(r.out().join("coefficients.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,n,re,im");
    assert_eq!(lines.len() - 1, 41 * 17);
    assert!(lines[1].starts_with("-20,-8,"));
    assert!(lines[2].starts_with("-20,-7,"));
    let meta = r.json("coefficients.json");
    assert_eq!(meta["k_range"], serde_json::json!([-20, 20]));
    assert_eq!(meta["window_id"], "gaussian");

    let sidecar = fs::read_to_string(r.out().join("coefficients.json")).unwrap();
    let o = r.cmd(&["stft"], &cfg);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(r.out().join("coefficients.csv")).unwrap(), csv);
    assert_eq!(fs::read_to_string(r.out().join("coefficients.json")).unwrap(), sidecar);
}

#[test]
fn zero_signal_gives_zero_csv() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "zero"}"#, "gaussian", 0.0));
    assert_eq!(code(&r.cmd(&["stft"], &cfg)), 0);
    let csv = fs::read_to_string(r.out().join("coefficients.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(f[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn schema_errors_exit_2() {
    let r = Run::new();
    let cfg = r.config(
        "c.json",
        &format!(r#"{{"signal": {{"kind": "catalog", "name": "gaussian"}}, "window": {{}}, {LATTICE}}}"#),
    );
    let o = r.cmd(&["stft"], &cfg);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`name`"), "{}", stderr(&o));

    let cfg = r.config("d.json", r#"{"window": {"name": "gaussian"}, "colour": "blue"}"#);
    let o = r.cmd(&["stft"], &cfg);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("colour"));

    let missing = r.dir.path().join("nope.json");
    assert_eq!(code(&r.cmd(&["stft"], &missing)), 2);
    assert_eq!(code(&Command::new(BIN).arg("frobnicate").output().unwrap()), 2);
    let cfg = r.config("e.json", &signal_config(r#"{"kind": "catalog", "name": "gaussian"}"#, "gaussian", 0.0));
    assert_eq!(code(&r.cmd(&["stft", "--threads", "0"], &cfg)), 2);
}

#[test]
fn dual_at_critical_density() {
    let r = Run::new();
    let cfg = r.config(
        "c.json",
        r#"{"window": {"name": "gaussian"}, "lattice": {"alpha": 1.0, "beta": 1.0, "k_range": [-20, 20], "n_range": [-8, 8]}}"#,
    );
    let o = r.cmd(&["dual"], &cfg);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("Balian-Low"), "{}", stderr(&o));

    let o = r.cmd(&["dual", "--force"], &cfg);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let fail = r.json("dual_failure.json");
    assert_eq!(fail["converged"], false);
    let history = fail["residual_history"].as_array().unwrap();
    // Initial residual plus one entry per step.
    assert_eq!(history.len(), fail["iterations"].as_u64().unwrap() as usize + 1);
    assert!(fail["last_residual"].as_f64().unwrap() > 1e-4);
    // Stagnation: the last hundred steps do not even halve the residual.
    let h: Vec<f64> = history.iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(h[h.len() - 1] > 0.5 * h[h.len() - 101]);
}

#[test]
fn dual_and_bounds_at_half_density() {
    let r = Run::new();
    let cfg = r.config("c.json", &format!(r#"{{"window": {{"name": "gaussian"}}, {LATTICE}}}"#));
    let o = r.cmd(&["dual"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = r.json("dual.json");
    assert!(meta["residual"].as_f64().unwrap() <= 1e-8);
    let csv = fs::read_to_string(r.out().join("dual.csv")).unwrap();
    assert!(csv.starts_with("t,gamma_re,gamma_im\n"));

    let o = r.cmd(&["frame-bounds", "--seed", "11"], &cfg);
    assert_eq!(code(&o), 0);
    let b = r.json("bounds.json");
    let (a, bb) = (b["bounds"]["A"].as_f64().unwrap(), b["bounds"]["B"].as_f64().unwrap());
    assert!(0.0 < a && a <= bb);
}

#[test]
fn reconstruct_smooth_signal() {
    let r = Run::new();
    let cfg = r.config(
        "c.json",
        &signal_config(r#"{"kind": "catalog", "name": "gaussian", "shift": 0.3, "modulate": 0.7}"#, "gaussian", 0.0),
    );
    let o = r.cmd(&["reconstruct"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = r.json("reconstruction.json");
    assert!(rep["relative_error"].as_f64().unwrap() <= 1e-4, "{rep}");
    assert!(rep["mixed_agreement"].as_f64().unwrap() <= 1e-3, "{rep}");
}

#[test]
fn analyze_translation_theorem_success() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "exp_step", "b": 1.0}"#, "gaussian", 1.0));
    let o = r.cmd(&["analyze", "--theorem", "t41"], &cfg);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let rep = r.json("report.json");
    assert_eq!(rep["verdict"], "s-asymptotic");
    assert_eq!(rep["theorem"], "t41");
    assert!((rep["C"]["re"].as_f64().unwrap() - 1.0).abs() < 0.02);
    assert!((rep["b"].as_f64().unwrap() - 1.0).abs() < 0.02);
    assert_eq!(rep["diagnostics"]["route_agreement"], true);
    let traj = fs::read_to_string(r.out().join("trajectories.csv")).unwrap();
    assert!(traj.starts_with("x,n,re,im\n"));
    assert!(traj.lines().count() > 17 * 8);
}

#[test]
fn analyze_auto_picks_wiener_route_for_gaussian() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "exp_step"}"#, "gaussian", 1.0));
    let o = r.cmd(&["analyze"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = r.json("report.json");
    assert_eq!(rep["theorem"], "t43");
    assert_eq!(rep["selected_by"], "auto");
}

#[test]
fn analyze_oscillatory_tail_is_inconclusive() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "sin_exp"}"#, "gaussian", 0.0));
    let o = r.cmd(&["analyze", "--theorem", "t41"], &cfg);
    assert_eq!(code(&o), 10, "{}{}", stdout(&o), stderr(&o));
    assert_eq!(r.json("report.json")["verdict"], "inconclusive");
}

#[test]
fn analyze_wiener_theorem_rejects_two_gaussian() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "heaviside"}"#, "two_gaussian", 0.0));
    let o = r.cmd(&["analyze", "--theorem", "t43"], &cfg);
    assert_eq!(code(&o), 11);
    assert!(stdout(&o).contains("witness xi"), "{}", stdout(&o));
    let w = &r.json("report.json")["diagnostics"]["wiener"];
    assert!((w["witness"].as_f64().unwrap().abs() - 0.81357654861601977).abs() < 1e-6);
}

#[test]
fn wiener_check_exit_codes() {
    let r = Run::new();
    let good = r.config("g.json", r#"{"window": {"name": "gaussian"}, "wiener_check": {"b": 2.0}}"#);
    assert_eq!(code(&r.cmd(&["wiener-check"], &good)), 0);
    let bad = r.config("b.json", r#"{"window": {"name": "two_gaussian"}}"#);
    let o = r.cmd(&["wiener-check"], &bad);
    assert_eq!(code(&o), 11);
    assert_eq!(r.json("wiener.json")["verdict"]["outcome"], "fails");
}

#[test]
fn net_converge_exit_codes() {
    let r = Run::new();
    let cfg = r.config("c.json", &signal_config(r#"{"kind": "catalog", "name": "exp_step"}"#, "gaussian", 1.0));
    let o = r.cmd(&["net-converge"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = r.json("convergence.json");
    assert_eq!(rep["converged"], true);
    assert!(r.out().join(rep["limit_grid_ref"].as_str().unwrap()).exists());

    let cfg = r.config(
        "m.json",
        &signal_config(r#"{"kind": "catalog", "name": "exp_step", "modulate": 0.3}"#, "gaussian", 1.0),
    );
    let o = r.cmd(&["net-converge"], &cfg);
    assert_eq!(code(&o), 10, "{}", stderr(&o));
    assert_eq!(r.json("convergence.json")["converged"], false);
}

fn write_grid_csv(path: &Path, k: i64, n: i64, value: impl Fn(i64, i64) -> f64) {
    let mut s = String::from("k,n,re,im\n");
    for a in -k..=k {
        for b in -n..=n {
            s.push_str(&format!("{a},{b},{:.16e},0\n", value(a, b)));
        }
    }
    fs::write(path, s).unwrap();
}

#[test]
fn classify_grids() {
    let r = Run::new();
    let poly = r.dir.path().join("poly.csv");
    write_grid_csv(&poly, 40, 16, |k, n| (1.0 + (k.abs() + n.abs()) as f64).powi(2));
    let cfg = r.config("p.json", r#"{"classify": {"grid": "poly.csv"}}"#);
    let o = r.cmd(&["classify"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let est = r.json("growth.json");
    assert_eq!(est["class"], "polynomial");
    assert!((est["tau"].as_f64().unwrap() - 2.0).abs() <= 0.3);

    // Gaussian analysed by a Gaussian: the pipeline stft → classify.
    let cfg = r.config("s.json", &signal_config(r#"{"kind": "catalog", "name": "gaussian"}"#, "gaussian", 0.0));
    assert_eq!(code(&r.cmd(&["stft"], &cfg)), 0);
    let cfg = r.config("q.json", r#"{"classify": {"grid": "out/coefficients.csv"}}"#);
    let o = r.cmd(&["classify"], &cfg);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(r.json("growth.json")["class"], "rapidly-decreasing-exp");
}

#[test]
fn classify_input_errors_exit_2() {
    let r = Run::new();
    let tiny = r.dir.path().join("tiny.csv");
    write_grid_csv(&tiny, 1, 1, |_, _| 1.0);
    let cfg = r.config("t.json", r#"{"classify": {"grid": "tiny.csv"}}"#);
    let o = r.cmd(&["classify"], &cfg);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("ranges too small for fitting"), "{}", stderr(&o));

    fs::write(r.dir.path().join("bad.csv"), "k,n,re,im\n0,0,1,0\n0,1,x,0\n").unwrap();
    let cfg = r.config("b.json", r#"{"classify": {"grid": "bad.csv"}}"#);
    let o = r.cmd(&["classify"], &cfg);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let cfg = r.config("n.json", r#"{}"#);
    assert_eq!(code(&r.cmd(&["classify"], &cfg)), 2);
}

#[test]
fn table_signal_and_capability_errors() {
    let r = Run::new();
    fs::write(r.dir.path().join("sig.csv"), "t,value\n-1,0\n0,1\n1,0\n").unwrap();
    let cfg = r.config(
        "c.json",
        &signal_config(r#"{"kind": "table", "path": "sig.csv"}"#, "gaussian", 0.0),
    );
    assert_eq!(code(&r.cmd(&["stft"], &cfg)), 0);

    fs::write(r.dir.path().join("bad.csv"), "t,value\n0,1\n1,oops\n").unwrap();
    let cfg = r.config("d.json", &signal_config(r#"{"kind": "table", "path": "bad.csv"}"#, "gaussian", 0.0));
    let o = r.cmd(&["stft"], &cfg);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"));

    // ψe^{bt} is not integrable for the Lorentzian window.
    let cfg = r.config("l.json", r#"{"window": {"name": "lorentzian"}, "wiener_check": {"b": 1.0}}"#);
    assert_eq!(code(&r.cmd(&["wiener-check"], &cfg)), 3);
}
