use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use gabor_tauber::asymptotics::{
    default_wiener_grid, monotone_tauberian, net_schedule, translation_net, verify_sasymptotics,
    wiener_condition_check, wiener_tauberian, AnalysisConfig, AsymptoticReport, Verdict, WienerVerdict,
};
use gabor_tauber::frame::{
    compute_dual_window, estimate_frame_bounds, reconstruct, reconstruct_mixed, validate_lattice, verify_dual_decay,
    BoundsOptions, DualWindow,
};
use gabor_tauber::growth::{classify_grid_growth, detect_net_convergence};
use gabor_tauber::io::{
    format_float, read_grid, trajectory_csv, write_atomic, write_dual, write_grid, write_json,
};
use gabor_tauber::model::{IndexRange, Lattice, Window};
use gabor_tauber::stft::gabor_coefficients;
use gabor_tauber::GaborError;

use crate::config::{ExperimentConfig, TheoremChoice};
use crate::{Cli, Command, Outcome};

struct Ctx {
    cfg: ExperimentConfig,
    out: PathBuf,
    force: bool,
    seed: Option<u64>,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn bounds_options(&self) -> BoundsOptions {
        let b = self.cfg.tolerances.bounds;
        BoundsOptions {
            seed: self.seed.unwrap_or(b.seed),
            force: b.force || self.force,
            ..b
        }
    }

    fn analysis(&self) -> AnalysisConfig {
        let mut a = self.cfg.analysis(self.force);
        a.bounds = self.bounds_options();
        a
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(GaborError::Config("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| GaborError::Config("no experiment config given (use --config <path>)".into()))?;
    let cfg = ExperimentConfig::load(path)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| GaborError::Config(format!("cannot create `{}`: {e}", out.display())))?;
    let ctx = Ctx {
        cfg,
        out,
        force: cli.force,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Stft => stft(&ctx),
        Command::Dual => dual(&ctx),
        Command::FrameBounds => frame_bounds(&ctx),
        Command::Reconstruct => reconstruction(&ctx),
        Command::Classify => classify(&ctx),
        Command::NetConverge => net_converge(&ctx),
        Command::Analyze { theorem } => analyze(&ctx, theorem.unwrap_or(ctx.cfg.analyze.theorem)),
        Command::WienerCheck => wiener_check(&ctx),
    }
}

fn stft(ctx: &Ctx) -> Result<Outcome> {
    let (f, psi, lat) = (ctx.cfg.signal()?, ctx.cfg.window()?, ctx.cfg.lattice()?);
    let grid = gabor_coefficients(&f, &psi, &lat, &ctx.cfg.tolerances.quadrature)?;
    let path = ctx.path("coefficients.csv");
    write_grid(&path, &grid)?;
    println!("wrote {} rows to {}", lat.node_count(), path.display());
    Ok(Outcome::Ok)
}

fn bounds_json(psi: &Window, lat: &Lattice, bounds: &gabor_tauber::frame::FrameBounds) -> Value {
    json!({
        "alpha": lat.alpha,
        "beta": lat.beta,
        "density_product": lat.density_product(),
        "window": psi.name(),
        "lattice_verdict": serde_json::to_value(validate_lattice(psi, lat)).expect("verdict serializes"),
        "bounds": serde_json::to_value(bounds).expect("bounds serialize"),
    })
}

fn frame_bounds(ctx: &Ctx) -> Result<Outcome> {
    let (psi, lat) = (ctx.cfg.window()?, ctx.cfg.lattice()?);
    let bounds = estimate_frame_bounds(&psi, &lat, &ctx.cfg.tolerances.quadrature, &ctx.bounds_options())?;
    write_json(&ctx.path("bounds.json"), &bounds_json(&psi, &lat, &bounds))?;
    println!("A = {}, B = {}", format_float(bounds.a), format_float(bounds.b));
    Ok(Outcome::Ok)
}

/// Bounds plus dual; a stalled iteration leaves `dual_failure.json` behind.
fn solve_dual(ctx: &Ctx, psi: &Window, lat: &Lattice) -> Result<DualWindow> {
    let bounds = estimate_frame_bounds(psi, lat, &ctx.cfg.tolerances.quadrature, &ctx.bounds_options())?;
    let mut cfg = ctx.cfg.tolerances.dual;
    cfg.force |= ctx.force;
    match compute_dual_window(psi, lat, &bounds, &cfg) {
        Ok(d) => Ok(d),
        Err(e) => {
            if let GaborError::NonConvergence {
                iterations,
                last_residual,
                residual_history,
            } = e.root()
            {
                let report = json!({
                    "alpha": lat.alpha,
                    "beta": lat.beta,
                    "converged": false,
                    "iterations": iterations,
                    "last_residual": last_residual,
                    "residual_history": residual_history,
                    "bounds": serde_json::to_value(bounds).expect("bounds serialize"),
                    "tol": cfg.tol,
                });
                write_json(&ctx.path("dual_failure.json"), &report)?;
            }
            Err(e.into())
        }
    }
}

fn dual(ctx: &Ctx) -> Result<Outcome> {
    let (psi, lat) = (ctx.cfg.window()?, ctx.cfg.lattice()?);
    let d = solve_dual(ctx, &psi, &lat)?;
    write_dual(&ctx.path("dual.csv"), &d)?;
    write_json(&ctx.path("bounds.json"), &bounds_json(&psi, &lat, &d.bounds))?;
    let decay = verify_dual_decay(&d);
    println!(
        "dual converged in {} iterations, residual {}, decay {:?}",
        d.iterations,
        format_float(d.residual),
        decay.flag
    );
    Ok(Outcome::Ok)
}

fn default_points() -> Vec<f64> {
    (-8..=8).map(|i| i as f64 * 0.25).collect()
}

fn reconstruction(ctx: &Ctx) -> Result<Outcome> {
    let (f, psi, lat) = (ctx.cfg.signal()?, ctx.cfg.window()?, ctx.cfg.lattice()?);
    let q = ctx.cfg.tolerances.quadrature;
    let opts = &ctx.cfg.reconstruct;
    let points = opts.points.clone().unwrap_or_else(default_points);
    let d = solve_dual(ctx, &psi, &lat)?;
    let r = reconstruct(&f, &psi, &d, &lat, &points, &q)?;
    let mut csv = String::from("t,re,im,ref_re,ref_im\n");
    for ((t, s), v) in points.iter().zip(&r.samples).zip(&r.reference) {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            format_float(*t),
            format_float(s.re),
            format_float(s.im),
            format_float(v.re),
            format_float(v.im)
        ));
    }
    write_atomic(&ctx.path("reconstruction.csv"), csv.as_bytes())?;
    let mut report = json!({
        "relative_error": r.relative_error,
        "tail": serde_json::to_value(r.tail).expect("tail serializes"),
        "dual_residual": d.residual,
        "points": points.len(),
    });
    if opts.mixed {
        let m = reconstruct_mixed(&f, &psi, &d, &lat, &points, &q)?;
        let scale = r.reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let gap = r
            .samples
            .iter()
            .zip(&m.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        report["mixed_relative_error"] = json!(m.relative_error);
        report["mixed_agreement"] = json!(if scale > 0.0 { gap / scale } else { gap });
    }
    write_json(&ctx.path("reconstruction.json"), &report)?;
    println!("relative reconstruction error {}", format_float(r.relative_error));
    Ok(Outcome::Ok)
}

fn classify(ctx: &Ctx) -> Result<Outcome> {
    let grid_path = ctx
        .cfg
        .classify
        .grid
        .as_ref()
        .ok_or_else(|| GaborError::Config("missing field `classify.grid` in the experiment config".into()))?;
    let grid = read_grid(&ctx.cfg.resolve(grid_path))?;
    let est = classify_grid_growth(&grid)?;
    write_json(&ctx.path("growth.json"), &serde_json::to_value(est).expect("estimate serializes"))?;
    println!("class {}, tau {}", est.class.as_str(), format_float(est.tau));
    Ok(Outcome::Ok)
}

fn net_converge(ctx: &Ctx) -> Result<Outcome> {
    let cfg = &ctx.cfg;
    let opts = &cfg.net_converge;
    let net = match &opts.members {
        Some(members) => members
            .iter()
            .map(|m| Ok((m.lambda, read_grid(&cfg.resolve(&m.grid))?)))
            .collect::<Result<Vec<_>>>()?,
        None => {
            let (f, psi, lat, c) = (cfg.signal()?, cfg.window()?, cfg.lattice()?, cfg.comparison()?);
            let hs = match &opts.h_schedule {
                Some(h) => h.clone(),
                None => net_schedule(&lat, &ctx.analysis()),
            };
            translation_net(&f, &c, &hs)?
                .iter()
                .map(|(h, fh)| Ok((*h, gabor_coefficients(fh, &psi, &lat, &cfg.tolerances.quadrature)?)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let report = detect_net_convergence(&net, opts.mode, &cfg.tolerances.net)?;
    let limit_name = "limit_grid.csv";
    write_grid(&ctx.path(limit_name), &report.limit_grid)?;
    let out = json!({
        "converged": report.converged,
        "status": serde_json::to_value(report.status).expect("status serializes"),
        "tau": report.uniform_tau,
        "lambda0": report.lambda0,
        "limit_grid_ref": limit_name,
        "worst_node": [report.worst_node.0, report.worst_node.1],
        "max_tail_delta": report.max_tail_delta,
        "bound": serde_json::to_value(&report.bound).expect("bound serializes"),
    });
    write_json(&ctx.path("convergence.json"), &out)?;
    println!("net status {}", out["status"].as_str().unwrap_or("?"));
    Ok(if report.converged {
        Outcome::Ok
    } else {
        Outcome::Inconclusive
    })
}

fn wiener_verdict(psi: &Window, b: f64, grid: Option<[f64; 3]>, ctx: &Ctx) -> Result<(WienerVerdict, Vec<f64>)> {
    let q = ctx.cfg.tolerances.quadrature;
    let xs = match grid {
        Some([start, stop, step]) => {
            if !(step > 0.0 && stop > start) {
                return Err(GaborError::Config("wiener_check.grid must be [start, stop, step] with stop > start and step > 0".into()).into());
            }
            let n = ((stop - start) / step).round() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
        None => default_wiener_grid(psi, b, &q)?,
    };
    Ok((wiener_condition_check(psi, b, &xs, &q)?, xs))
}

fn wiener_check(ctx: &Ctx) -> Result<Outcome> {
    let psi = ctx.cfg.window()?;
    let opts = &ctx.cfg.wiener_check;
    let b = match (opts.b, &ctx.cfg.comparison) {
        (Some(b), _) => b,
        (None, Some(_)) => ctx.cfg.comparison()?.b(),
        (None, None) => 0.0,
    };
    let (verdict, xs) = wiener_verdict(&psi, b, opts.grid, ctx)?;
    let out = json!({
        "window": psi.name(),
        "b": b,
        "grid": {"start": xs[0], "stop": xs[xs.len() - 1], "count": xs.len()},
        "verdict": serde_json::to_value(verdict).expect("verdict serializes"),
    });
    write_json(&ctx.path("wiener.json"), &out)?;
    match verdict {
        WienerVerdict::Holds { min_ratio } => {
            println!("wiener condition holds, min envelope ratio {}", format_float(min_ratio));
            Ok(Outcome::Ok)
        }
        WienerVerdict::Fails { witness, ratio } => {
            println!("wiener condition fails at xi = {} (ratio {})", format_float(witness), format_float(ratio));
            Ok(Outcome::Rejected)
        }
    }
}

fn write_report(out: &Path, report: &AsymptoticReport, selected: &str) -> Result<()> {
    let mut json = report.to_json();
    json["selected_by"] = json!(selected);
    write_json(&out.join("report.json"), &json)?;
    write_atomic(&out.join("trajectories.csv"), trajectory_csv(&report.trajectory_rows()).as_bytes())?;
    Ok(())
}

fn analyze(ctx: &Ctx, choice: TheoremChoice) -> Result<Outcome> {
    let cfg = &ctx.cfg;
    let (f, psi, c) = (cfg.signal()?, cfg.window()?, cfg.comparison()?);
    let analysis = ctx.analysis();
    let (theorem, selected) = match choice {
        TheoremChoice::Auto => {
            let (w, _) = wiener_verdict(&psi, c.b(), None, ctx)?;
            (if w.holds() { TheoremChoice::T43 } else { TheoremChoice::T41 }, "auto")
        }
        other => (other, "flag"),
    };
    let report = match theorem {
        TheoremChoice::T42 => {
            let n_range = match (cfg.analyze.n_range, cfg.lattice.as_ref()) {
                (Some(r), _) => r,
                (None, Some(_)) => cfg.lattice()?.n_range,
                (None, None) => IndexRange::symmetric(4),
            };
            monotone_tauberian(&f, &psi, &c, n_range, &analysis)?
        }
        TheoremChoice::T43 => wiener_tauberian(&f, &psi, &cfg.lattice()?, &c, cfg.analyze.tau, &analysis)?,
        _ => verify_sasymptotics(&f, &psi, &cfg.lattice()?, &c, &analysis)?,
    };
    write_report(&ctx.out, &report, selected)?;
    let c0: Complex64 = report.c;
    println!(
        "theorem {}: {} (C = {} + {}i, b = {})",
        report.theorem.as_str(),
        report.verdict.as_str(),
        format_float(c0.re),
        format_float(c0.im),
        format_float(report.b)
    );
    if let Some(WienerVerdict::Fails { witness, .. }) = report.diagnostics.wiener {
        println!("wiener witness xi = {}", format_float(witness));
    }
    for note in &report.diagnostics.notes {
        println!("note: {note}");
    }
    Ok(match report.verdict {
        Verdict::SAsymptotic => Outcome::Ok,
        Verdict::Inconclusive => Outcome::Inconclusive,
        Verdict::Rejected => Outcome::Rejected,
    })
}
