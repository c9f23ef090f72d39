//! Experiment configuration: one JSON document, validated against this
//! schema before anything is computed. Unknown keys are errors.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use gabor_tauber::asymptotics::{AnalysisConfig, ScheduleOptions, SolveOptions};
use gabor_tauber::frame::{BoundsOptions, DualConfig};
use gabor_tauber::growth::{FamilyMode, NetConfig};
use gabor_tauber::io::read_signal_table;
use gabor_tauber::model::{
    ComparisonFunction, Extension, GaussianAtom, IndexRange, Lattice, PointMass, Regime, SignalModel, SlowlyVarying,
    Window,
};
use gabor_tauber::stft::QuadratureSpec;
use gabor_tauber::{GaborError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal: Option<SignalSpec>,
    pub window: Option<WindowSpec>,
    pub lattice: Option<LatticeSpec>,
    pub comparison: Option<ComparisonSpec>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub reconstruct: ReconstructOptions,
    #[serde(default)]
    pub classify: ClassifyOptions,
    #[serde(default)]
    pub net_converge: NetConvergeOptions,
    #[serde(default)]
    pub analyze: AnalyzeOptions,
    #[serde(default)]
    pub wiener_check: WienerOptions,
    /// Directory relative paths are resolved against; the config file's own.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    Catalog {
        name: String,
        b: Option<f64>,
        nu: Option<f64>,
        value: Option<f64>,
        location: Option<f64>,
        /// `f(t − shift)`.
        shift: Option<f64>,
        /// `e^{2πiξt} f(t)`.
        modulate: Option<f64>,
        /// Real factor or `[re, im]`.
        scale: Option<Scalar>,
        /// `f(t/s)`.
        dilate: Option<f64>,
        /// `f·1_{[lower, ∞)}`.
        restrict: Option<f64>,
    },
    Table {
        path: PathBuf,
        #[serde(default)]
        extension: ExtensionSpec,
    },
    PointMasses {
        masses: Vec<MassSpec>,
    },
    Sum {
        terms: Vec<SignalSpec>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    fn value(self) -> Complex64 {
        match self {
            Scalar::Real(r) => Complex64::new(r, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionSpec {
    #[default]
    Zero,
    Hold,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassSpec {
    pub location: f64,
    pub weight: Scalar,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub name: String,
    /// Custom Gaussian sum `Σ amplitude·e^{−rate·t²}` registered under `name`.
    pub atoms: Option<Vec<AtomSpec>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub amplitude: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub k_range: IndexRange,
    pub n_range: IndexRange,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSpec {
    #[serde(default)]
    pub b: f64,
    #[serde(rename = "L", default = "default_slowly")]
    pub slowly: String,
    #[serde(default)]
    pub regime: RegimeSpec,
    /// Exponent of the polynomial regime.
    pub nu: Option<f64>,
}

fn default_slowly() -> String {
    "const:1".into()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeSpec {
    #[default]
    Exponential,
    Polynomial,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quadrature: QuadratureSpec,
    pub bounds: BoundsOptions,
    pub dual: DualConfig,
    pub net: NetConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructOptions {
    /// Evaluation points; a uniform grid over `[-2, 2]` by default.
    pub points: Option<Vec<f64>>,
    /// Also run the `ψ ↔ γ` swapped expansion.
    pub mixed: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            points: None,
            mixed: true,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyOptions {
    /// Grid CSV to classify.
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetMember {
    pub lambda: f64,
    pub grid: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetConvergeOptions {
    /// Precomputed member grids; without them the translation net of the
    /// configured signal is built.
    pub members: Option<Vec<NetMember>>,
    /// Translation parameters of the built net.
    pub h_schedule: Option<Vec<f64>>,
    pub mode: FamilyMode,
}

impl Default for NetConvergeOptions {
    fn default() -> Self {
        NetConvergeOptions {
            members: None,
            h_schedule: None,
            mode: FamilyMode::ExpPol,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TheoremChoice {
    #[default]
    Auto,
    T41,
    T42,
    T43,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeOptions {
    pub theorem: TheoremChoice,
    /// Rate of the `e^{−τx}` extension of `c` to `x ≤ 0` used by t43.
    pub tau: f64,
    /// Frequencies checked by t42; the lattice's `n`-range otherwise.
    pub n_range: Option<IndexRange>,
    pub schedule: ScheduleOptions,
    pub solve: SolveOptions,
    pub solve_tol: f64,
    pub cross_validate: bool,
    pub net_members: usize,
    pub synthesis_points: Vec<f64>,
    pub synthesis_tol: f64,
    pub monotone_tol: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        let d = AnalysisConfig::default();
        AnalyzeOptions {
            theorem: TheoremChoice::Auto,
            tau: 0.0,
            n_range: None,
            schedule: d.schedule,
            solve: d.solve,
            solve_tol: d.solve_tol,
            cross_validate: d.cross_validate,
            net_members: d.net_members,
            synthesis_points: d.synthesis_points,
            synthesis_tol: d.synthesis_tol,
            monotone_tol: d.monotone_tol,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WienerOptions {
    /// Shift `b`; the comparison's rate otherwise.
    pub b: Option<f64>,
    /// `[start, stop, step]`; the envelope-sized default grid otherwise.
    pub grid: Option<[f64; 3]>,
}

fn missing(what: &str) -> GaborError {
    GaborError::Config(format!("missing field `{what}` in the experiment config"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GaborError::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GaborError::Config(format!("config schema: {e}")))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn signal(&self) -> Result<SignalModel> {
        build_signal(self.signal.as_ref().ok_or_else(|| missing("signal"))?, self)
    }

    pub fn window(&self) -> Result<Window> {
        let spec = self.window.as_ref().ok_or_else(|| missing("window"))?;
        match &spec.atoms {
            Some(atoms) => Window::gaussian_sum(
                spec.name.clone(),
                atoms
                    .iter()
                    .map(|a| GaussianAtom {
                        amplitude: a.amplitude,
                        rate: a.rate,
                    })
                    .collect(),
            ),
            None => Window::by_name(&spec.name),
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        let l = self.lattice.ok_or_else(|| missing("lattice"))?;
        Lattice::new(l.alpha, l.beta, l.k_range, l.n_range)
    }

    pub fn comparison(&self) -> Result<ComparisonFunction> {
        let spec = self.comparison.as_ref().ok_or_else(|| missing("comparison"))?;
        let slowly = SlowlyVarying::parse(&spec.slowly)?;
        match spec.regime {
            RegimeSpec::Exponential => {
                if spec.nu.is_some() {
                    return Err(GaborError::Config("`nu` applies only to the polynomial regime".into()));
                }
                ComparisonFunction::exponential(spec.b, slowly)
            }
            RegimeSpec::Polynomial => {
                let nu = spec.nu.ok_or_else(|| missing("comparison.nu"))?;
                ComparisonFunction::build(spec.b, slowly, Regime::Polynomial { nu }, None)
            }
        }
    }

    /// The library configuration of `analyze`, with `--force` applied.
    pub fn analysis(&self, force: bool) -> AnalysisConfig {
        let a = &self.analyze;
        let t = &self.tolerances;
        AnalysisConfig {
            schedule: a.schedule,
            solve: a.solve,
            quadrature: t.quadrature,
            solve_tol: a.solve_tol,
            cross_validate: a.cross_validate,
            net_members: a.net_members,
            net: t.net,
            synthesis_points: a.synthesis_points.clone(),
            synthesis_tol: a.synthesis_tol,
            bounds: BoundsOptions {
                force: t.bounds.force || force,
                ..t.bounds
            },
            dual: DualConfig {
                force: t.dual.force || force,
                ..t.dual
            },
            force,
            monotone_tol: a.monotone_tol,
        }
    }
}

fn catalog(
    name: &str,
    b: Option<f64>,
    nu: Option<f64>,
    value: Option<f64>,
    location: Option<f64>,
) -> Result<SignalModel> {
    let given = [("b", b.is_some()), ("nu", nu.is_some()), ("value", value.is_some()), ("location", location.is_some())];
    let allowed: &[&str] = match name {
        "exp_step" => &["b"],
        "poly_log" => &["nu"],
        "constant" => &["value"],
        "dirac" => &["location"],
        _ => &[],
    };
    if let Some((p, _)) = given.iter().find(|(p, set)| *set && !allowed.contains(p)) {
        return Err(GaborError::Config(format!("parameter `{p}` does not apply to catalog signal `{name}`")));
    }
    Ok(match name {
        "zero" => SignalModel::zero(),
        "constant" => SignalModel::constant(value.unwrap_or(1.0)),
        "gaussian" => SignalModel::gaussian(),
        "heaviside" => SignalModel::heaviside(),
        "exp_step" => SignalModel::exp_step(b.unwrap_or(1.0)),
        "staircase" => SignalModel::staircase(),
        "poly_log" => SignalModel::poly_log(nu.unwrap_or(1.0)),
        "sin_exp" => SignalModel::sin_exp(),
        "dirac" => SignalModel::dirac(location.unwrap_or(0.0)),
        other => return Err(GaborError::Config(format!("unknown catalog signal `{other}`"))),
    })
}

fn build_signal(spec: &SignalSpec, cfg: &ExperimentConfig) -> Result<SignalModel> {
    match spec {
        SignalSpec::Catalog {
            name,
            b,
            nu,
            value,
            location,
            shift,
            modulate,
            scale,
            dilate,
            restrict,
        } => {
            let mut f = catalog(name, *b, *nu, *value, *location)?;
            if let Some(s) = dilate {
                f = f.dilate(*s)?;
            }
            if let Some(x) = shift {
                f = f.translate(*x);
            }
            if let Some(lower) = restrict {
                f = f.restrict(*lower);
            }
            if let Some(xi) = modulate {
                f = f.modulate(*xi);
            }
            if let Some(c) = scale {
                f = f.scale(c.value());
            }
            Ok(f)
        }
        SignalSpec::Table { path, extension } => {
            let ext = match extension {
                ExtensionSpec::Zero => Extension::Zero,
                ExtensionSpec::Hold => Extension::Hold,
            };
            let full = cfg.resolve(path);
            let table = read_signal_table(&full, ext)?;
            Ok(SignalModel::table(table, format!("table({})", path.display())))
        }
        SignalSpec::PointMasses { masses } => SignalModel::point_masses(
            masses
                .iter()
                .map(|m| PointMass {
                    location: m.location,
                    weight: m.weight.value(),
                })
                .collect(),
        ),
        SignalSpec::Sum { terms } => {
            let mut it = terms.iter();
            let first = it.next().ok_or_else(|| GaborError::Config("`sum` needs at least one term".into()))?;
            let mut acc = build_signal(first, cfg)?;
            for t in it {
                acc = acc.add(&build_signal(t, cfg)?)?;
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_layout() {
        let cfg = ExperimentConfig::parse(
            r#"{"signal": {"kind": "catalog", "name": "exp_step", "b": 1.0}, "window": {"name": "gaussian"},
                "lattice": {"alpha": 0.5, "beta": 1.0, "k_range": [-40,40], "n_range": [-16,16]},
                "comparison": {"b": 1.0, "L": "const:1"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.signal().unwrap().id(), "exp_step(1)");
        assert_eq!(cfg.lattice().unwrap().node_count(), 81 * 33);
        assert_eq!(cfg.comparison().unwrap().b(), 1.0);
    }

    #[test]
    fn unknown_keys_and_missing_fields_are_named() {
        let e = ExperimentConfig::parse(r#"{"signal": {"kind": "catalog", "name": "zero", "bogus": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = ExperimentConfig::parse(r#"{"window": {}}"#).unwrap_err();
        assert!(e.to_string().contains("`name`"), "{e}");
        let e = ExperimentConfig::parse(r#"{"colour": 1}"#).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
    }

    #[test]
    fn catalog_parameters_are_checked() {
        let cfg = ExperimentConfig::parse(r#"{"signal": {"kind": "catalog", "name": "heaviside", "b": 2}}"#).unwrap();
        assert!(cfg.signal().unwrap_err().to_string().contains("`b`"));
    }
}
