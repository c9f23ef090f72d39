use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GaborError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    CatalogExpression,
    SampledTable,
    PointMasses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthHint {
    ExpType,
    PolynomialType,
    CompactSupport,
    Unknown,
}

/// Out-of-range rule for sampled tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    #[default]
    Zero,
    Hold,
}

/// Piecewise-linear table over strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTable {
    abscissae: Vec<f64>,
    values: Vec<Complex64>,
    extension: Extension,
}

impl SampledTable {
    pub fn new(abscissae: Vec<f64>, values: Vec<Complex64>, extension: Extension) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(GaborError::Config("table abscissae and values differ in length".into()));
        }
        if abscissae.len() < 2 {
            return Err(GaborError::Config("sampled table needs at least two rows".into()));
        }
        if abscissae.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(GaborError::Config("sampled table contains non-finite entries".into()));
        }
        if abscissae.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GaborError::Config("table abscissae must be strictly increasing".into()));
        }
        Ok(SampledTable {
            abscissae,
            values,
            extension,
        })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let xs = &self.abscissae;
        let last = xs.len() - 1;
        if t < xs[0] || t > xs[last] {
            return match self.extension {
                Extension::Zero => Complex64::new(0.0, 0.0),
                Extension::Hold if t < xs[0] => self.values[0],
                Extension::Hold => self.values[last],
            };
        }
        let i = xs.partition_point(|&x| x <= t).clamp(1, last);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let w = (t - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - w) + self.values[i] * w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub location: f64,
    pub weight: Complex64,
}

/// Closed catalog of signal expressions plus scale/shift combinators.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalExpr {
    Zero,
    Constant(Complex64),
    /// `e^{-πt²}`.
    Gaussian,
    /// `1_{t ≥ 0}`.
    Heaviside,
    /// `e^{bt} 1_{t ≥ 0}`.
    ExpStep { rate: f64 },
    /// `⌊t⌋ 1_{t ≥ 0}`.
    Staircase,
    /// `t^ν log t · 1_{t ≥ 1}`.
    PolyLog { nu: f64 },
    /// `sin(e^t)`.
    SinExp,
    Table(Arc<SampledTable>),
    /// `f(t - by)`.
    Shift { inner: Box<SignalExpr>, by: f64 },
    /// `e^{2πiξt} f(t)`.
    Modulate { inner: Box<SignalExpr>, freq: f64 },
    /// `f(t / s)`.
    Dilate { inner: Box<SignalExpr>, factor: f64 },
    Scale { inner: Box<SignalExpr>, by: Complex64 },
    Sum(Vec<SignalExpr>),
    /// `f(t) 1_{t ≥ lower}`.
    Restrict { inner: Box<SignalExpr>, lower: f64 },
}

/// Closed interval hull, possibly empty (`lo > hi`) or unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub const EMPTY: Support = Support {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    pub const LINE: Support = Support {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn hull(self, other: Support) -> Support {
        Support {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(self, other: Support) -> Support {
        Support {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Support {
        if self.is_empty() {
            return self;
        }
        let (a, b) = (f(self.lo), f(self.hi));
        Support {
            lo: a.min(b),
            hi: a.max(b),
        }
    }
}

impl SignalExpr {
    pub fn eval(&self, t: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            SignalExpr::Zero => re(0.0),
            SignalExpr::Constant(c) => *c,
            SignalExpr::Gaussian => re((-PI * t * t).exp()),
            SignalExpr::Heaviside => re(if t >= 0.0 { 1.0 } else { 0.0 }),
            SignalExpr::ExpStep { rate } => re(if t >= 0.0 { (rate * t).exp() } else { 0.0 }),
            SignalExpr::Staircase => re(if t >= 0.0 { t.floor() } else { 0.0 }),
            SignalExpr::PolyLog { nu } => re(if t >= 1.0 { t.powf(*nu) * t.ln() } else { 0.0 }),
            SignalExpr::SinExp => re(t.exp().sin()),
            SignalExpr::Table(table) => table.eval(t),
            SignalExpr::Shift { inner, by } => inner.eval(t - by),
            SignalExpr::Modulate { inner, freq } => {
                Complex64::from_polar(1.0, 2.0 * PI * freq * t) * inner.eval(t)
            }
            SignalExpr::Dilate { inner, factor } => inner.eval(t / factor),
            SignalExpr::Scale { inner, by } => by * inner.eval(t),
            SignalExpr::Sum(terms) => terms.iter().map(|e| e.eval(t)).sum(),
            SignalExpr::Restrict { inner, lower } => {
                if t >= *lower {
                    inner.eval(t)
                } else {
                    re(0.0)
                }
            }
        }
    }

    pub fn support(&self) -> Support {
        match self {
            SignalExpr::Zero => Support::EMPTY,
            SignalExpr::Scale { by, .. } if *by == Complex64::new(0.0, 0.0) => Support::EMPTY,
            SignalExpr::Constant(c) if *c == Complex64::new(0.0, 0.0) => Support::EMPTY,
            SignalExpr::Constant(_) | SignalExpr::Gaussian | SignalExpr::SinExp => Support::LINE,
            SignalExpr::Heaviside | SignalExpr::ExpStep { .. } | SignalExpr::Staircase => Support {
                lo: 0.0,
                hi: f64::INFINITY,
            },
            SignalExpr::PolyLog { .. } => Support {
                lo: 1.0,
                hi: f64::INFINITY,
            },
            SignalExpr::Table(table) => match table.extension() {
                Extension::Zero => Support {
                    lo: table.abscissae()[0],
                    hi: *table.abscissae().last().expect("table is non-empty"),
                },
                Extension::Hold => Support::LINE,
            },
            SignalExpr::Shift { inner, by } => inner.support().map(|t| t + by),
            SignalExpr::Modulate { inner, .. } | SignalExpr::Scale { inner, .. } => inner.support(),
            SignalExpr::Dilate { inner, factor } => inner.support().map(|t| t * factor),
            SignalExpr::Sum(terms) => terms
                .iter()
                .fold(Support::EMPTY, |acc, e| acc.hull(e.support())),
            SignalExpr::Restrict { inner, lower } => inner.support().intersect(Support {
                lo: *lower,
                hi: f64::INFINITY,
            }),
        }
    }

    /// Points in `[a, b]` where the expression or a low derivative jumps.
    pub fn breakpoints(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        let mut push = |t: f64| {
            if t > a && t < b {
                out.push(t)
            }
        };
        match self {
            SignalExpr::Heaviside | SignalExpr::ExpStep { .. } => push(0.0),
            SignalExpr::PolyLog { .. } => push(1.0),
            SignalExpr::Staircase => {
                let first = a.max(0.0).floor() as i64;
                let last = b.floor().min(1e7) as i64;
                for j in first.max(0)..=last {
                    push(j as f64);
                }
            }
            SignalExpr::Table(table) => {
                let xs = table.abscissae();
                let start = xs.partition_point(|&x| x <= a);
                for &x in xs[start..].iter().take_while(|&&x| x < b) {
                    push(x);
                }
            }
            SignalExpr::Shift { inner, by } => {
                let mut local = Vec::new();
                inner.breakpoints(a - by, b - by, &mut local);
                local.into_iter().for_each(|t| push(t + by));
            }
            SignalExpr::Dilate { inner, factor } => {
                let (lo, hi) = if *factor > 0.0 {
                    (a / factor, b / factor)
                } else {
                    (b / factor, a / factor)
                };
                let mut local = Vec::new();
                inner.breakpoints(lo, hi, &mut local);
                local.into_iter().for_each(|t| push(t * factor));
            }
            SignalExpr::Modulate { inner, .. } | SignalExpr::Scale { inner, .. } => {
                inner.breakpoints(a, b, out)
            }
            SignalExpr::Sum(terms) => terms.iter().for_each(|e| e.breakpoints(a, b, out)),
            SignalExpr::Restrict { inner, lower } => {
                push(*lower);
                inner.breakpoints(a, b, out);
            }
            _ => {}
        }
    }

    /// Exponential rate `g` with `|f(t)| = O(e^{g|t|})`, polynomial growth
    /// counted as rate 1.
    pub fn growth_rate(&self) -> f64 {
        match self {
            SignalExpr::ExpStep { rate } => rate.max(0.0),
            SignalExpr::Staircase | SignalExpr::PolyLog { .. } => 1.0,
            SignalExpr::Table(t) if t.extension() == Extension::Hold => 0.0,
            SignalExpr::Shift { inner, .. }
            | SignalExpr::Modulate { inner, .. }
            | SignalExpr::Scale { inner, .. }
            | SignalExpr::Restrict { inner, .. } => inner.growth_rate(),
            SignalExpr::Dilate { inner, factor } => inner.growth_rate() / factor.abs(),
            SignalExpr::Sum(terms) => terms.iter().map(|e| e.growth_rate()).fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    fn default_hint(&self) -> GrowthHint {
        match self {
            SignalExpr::Zero => GrowthHint::CompactSupport,
            SignalExpr::ExpStep { .. } => GrowthHint::ExpType,
            SignalExpr::Staircase | SignalExpr::PolyLog { .. } => GrowthHint::PolynomialType,
            _ if !self.support().lo.is_infinite() && !self.support().hi.is_infinite() => {
                GrowthHint::CompactSupport
            }
            SignalExpr::Constant(_)
            | SignalExpr::Gaussian
            | SignalExpr::Heaviside
            | SignalExpr::SinExp => GrowthHint::PolynomialType,
            SignalExpr::Shift { inner, .. }
            | SignalExpr::Modulate { inner, .. }
            | SignalExpr::Dilate { inner, .. }
            | SignalExpr::Scale { inner, .. }
            | SignalExpr::Restrict { inner, .. } => inner.default_hint(),
            SignalExpr::Sum(terms) => {
                if terms.iter().any(|e| e.default_hint() == GrowthHint::ExpType) {
                    GrowthHint::ExpType
                } else if terms.iter().any(|e| e.default_hint() == GrowthHint::Unknown) {
                    GrowthHint::Unknown
                } else {
                    GrowthHint::PolynomialType
                }
            }
            SignalExpr::Table(_) => GrowthHint::Unknown,
        }
    }

    fn contains_table(&self) -> bool {
        match self {
            SignalExpr::Table(_) => true,
            SignalExpr::Shift { inner, .. }
            | SignalExpr::Modulate { inner, .. }
            | SignalExpr::Dilate { inner, .. }
            | SignalExpr::Scale { inner, .. }
            | SignalExpr::Restrict { inner, .. } => inner.contains_table(),
            SignalExpr::Sum(terms) => terms.iter().any(|e| e.contains_table()),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Expr(SignalExpr),
    Masses(Vec<PointMass>),
}

/// A signal: an evaluable expression or a finite point-mass combination.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalModel {
    body: Body,
    growth: GrowthHint,
    id: String,
}

impl SignalModel {
    pub fn from_expr(expr: SignalExpr, id: impl Into<String>) -> Self {
        let growth = expr.default_hint();
        SignalModel {
            body: Body::Expr(expr),
            growth,
            id: id.into(),
        }
    }

    pub fn zero() -> Self {
        Self::from_expr(SignalExpr::Zero, "zero")
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(SignalExpr::Constant(Complex64::new(c, 0.0)), format!("constant({c})"))
    }

    pub fn gaussian() -> Self {
        Self::from_expr(SignalExpr::Gaussian, "gaussian")
    }

    pub fn heaviside() -> Self {
        Self::from_expr(SignalExpr::Heaviside, "heaviside")
    }

    pub fn exp_step(rate: f64) -> Self {
        Self::from_expr(SignalExpr::ExpStep { rate }, format!("exp_step({rate})"))
    }

    pub fn staircase() -> Self {
        Self::from_expr(SignalExpr::Staircase, "staircase")
    }

    pub fn poly_log(nu: f64) -> Self {
        Self::from_expr(SignalExpr::PolyLog { nu }, format!("poly_log({nu})"))
    }

    pub fn sin_exp() -> Self {
        Self::from_expr(SignalExpr::SinExp, "sin_exp")
    }

    /// `Σ w_j e^{-π((t-c_j)/s_j)²}`, entries `(c_j, s_j, w_j)`.
    pub fn gaussian_mixture(components: &[(f64, f64, f64)]) -> Self {
        let terms = components
            .iter()
            .map(|&(center, width, weight)| SignalExpr::Scale {
                inner: Box::new(SignalExpr::Shift {
                    inner: Box::new(SignalExpr::Dilate {
                        inner: Box::new(SignalExpr::Gaussian),
                        factor: width,
                    }),
                    by: center,
                }),
                by: Complex64::new(weight, 0.0),
            })
            .collect();
        Self::from_expr(SignalExpr::Sum(terms), "gaussian_mixture")
    }

    pub fn table(table: SampledTable, id: impl Into<String>) -> Self {
        let mut s = Self::from_expr(SignalExpr::Table(Arc::new(table)), id);
        s.growth = GrowthHint::Unknown;
        s
    }

    pub fn point_masses(masses: Vec<PointMass>) -> Result<Self> {
        if masses.is_empty() {
            return Err(GaborError::Config("point-mass combination needs at least one mass".into()));
        }
        if masses.iter().any(|m| !m.location.is_finite() || !m.weight.is_finite()) {
            return Err(GaborError::Config("point masses must be finite".into()));
        }
        Ok(SignalModel {
            body: Body::Masses(masses),
            growth: GrowthHint::CompactSupport,
            id: "point_masses".into(),
        })
    }

    pub fn dirac(location: f64) -> Self {
        let mut s = Self::point_masses(vec![PointMass {
            location,
            weight: Complex64::new(1.0, 0.0),
        }])
        .expect("single finite mass");
        s.id = format!("dirac({location})");
        s
    }

    pub fn with_growth_hint(mut self, hint: GrowthHint) -> Self {
        self.growth = hint;
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn growth_hint(&self) -> GrowthHint {
        self.growth
    }

    pub fn kind(&self) -> SignalKind {
        match &self.body {
            Body::Masses(_) => SignalKind::PointMasses,
            Body::Expr(e) if e.contains_table() => SignalKind::SampledTable,
            Body::Expr(_) => SignalKind::CatalogExpression,
        }
    }

    pub fn expr(&self) -> Option<&SignalExpr> {
        match &self.body {
            Body::Expr(e) => Some(e),
            Body::Masses(_) => None,
        }
    }

    pub fn masses(&self) -> Option<&[PointMass]> {
        match &self.body {
            Body::Masses(m) => Some(m),
            Body::Expr(_) => None,
        }
    }

    /// Pointwise value; `None` for point masses.
    pub fn eval(&self, t: f64) -> Option<Complex64> {
        self.expr().map(|e| e.eval(t))
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.body {
            Body::Expr(e) => e.support().is_empty(),
            Body::Masses(m) => m.iter().all(|p| p.weight == Complex64::new(0.0, 0.0)),
        }
    }

    pub fn support(&self) -> Support {
        match &self.body {
            Body::Expr(e) => e.support(),
            Body::Masses(m) => m.iter().fold(Support::EMPTY, |acc, p| {
                acc.hull(Support {
                    lo: p.location,
                    hi: p.location,
                })
            }),
        }
    }

    pub fn growth_rate(&self) -> f64 {
        match &self.body {
            Body::Expr(e) => e.growth_rate(),
            Body::Masses(_) => 0.0,
        }
    }

    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if let Body::Expr(e) = &self.body {
            e.breakpoints(a, b, &mut out);
        }
        out
    }

    fn map_expr(&self, id: String, f: impl FnOnce(SignalExpr) -> SignalExpr) -> SignalModel {
        match &self.body {
            Body::Expr(e) => SignalModel {
                body: Body::Expr(f(e.clone())),
                growth: self.growth,
                id,
            },
            Body::Masses(_) => unreachable!("mass combinators are handled by callers"),
        }
    }

    /// `(T_x f)(t) = f(t - x)`.
    pub fn translate(&self, x: f64) -> SignalModel {
        let id = format!("shift({},{x})", self.id);
        match &self.body {
            Body::Masses(m) => SignalModel {
                body: Body::Masses(
                    m.iter()
                        .map(|p| PointMass {
                            location: p.location + x,
                            weight: p.weight,
                        })
                        .collect(),
                ),
                growth: self.growth,
                id,
            },
            Body::Expr(_) if x == 0.0 => self.clone(),
            Body::Expr(_) => self.map_expr(id, |e| SignalExpr::Shift {
                inner: Box::new(e),
                by: x,
            }),
        }
    }

    /// `(M_ξ f)(t) = e^{2πiξt} f(t)`.
    pub fn modulate(&self, xi: f64) -> SignalModel {
        let id = format!("modulate({},{xi})", self.id);
        match &self.body {
            Body::Masses(m) => SignalModel {
                body: Body::Masses(
                    m.iter()
                        .map(|p| PointMass {
                            location: p.location,
                            weight: p.weight * Complex64::from_polar(1.0, 2.0 * PI * xi * p.location),
                        })
                        .collect(),
                ),
                growth: self.growth,
                id,
            },
            Body::Expr(_) if xi == 0.0 => self.clone(),
            Body::Expr(_) => self.map_expr(id, |e| SignalExpr::Modulate {
                inner: Box::new(e),
                freq: xi,
            }),
        }
    }

    pub fn scale(&self, c: Complex64) -> SignalModel {
        let id = format!("scale({},{c})", self.id);
        match &self.body {
            Body::Masses(m) => SignalModel {
                body: Body::Masses(
                    m.iter()
                        .map(|p| PointMass {
                            location: p.location,
                            weight: p.weight * c,
                        })
                        .collect(),
                ),
                growth: self.growth,
                id,
            },
            Body::Expr(_) => self.map_expr(id, |e| SignalExpr::Scale {
                inner: Box::new(e),
                by: c,
            }),
        }
    }

    /// `f(t / s)`; requires `s ≠ 0`.
    pub fn dilate(&self, s: f64) -> Result<SignalModel> {
        if s == 0.0 || !s.is_finite() {
            return Err(GaborError::Config("dilation factor must be finite and non-zero".into()));
        }
        let id = format!("dilate({},{s})", self.id);
        Ok(match &self.body {
            Body::Masses(m) => SignalModel {
                body: Body::Masses(
                    m.iter()
                        .map(|p| PointMass {
                            location: p.location * s,
                            weight: p.weight * s.abs(),
                        })
                        .collect(),
                ),
                growth: self.growth,
                id,
            },
            Body::Expr(_) => self.map_expr(id, |e| SignalExpr::Dilate {
                inner: Box::new(e),
                factor: s,
            }),
        })
    }

    /// `f · 1_{t ≥ lower}`; point masses below `lower` are dropped.
    pub fn restrict(&self, lower: f64) -> SignalModel {
        let id = format!("restrict({},{lower})", self.id);
        match &self.body {
            Body::Masses(m) => SignalModel {
                body: Body::Masses(
                    m.iter()
                        .filter(|p| p.location >= lower)
                        .copied()
                        .chain(std::iter::once(PointMass {
                            location: lower,
                            weight: Complex64::new(0.0, 0.0),
                        }))
                        .collect(),
                ),
                growth: self.growth,
                id,
            },
            Body::Expr(_) => self.map_expr(id, |e| SignalExpr::Restrict {
                inner: Box::new(e),
                lower,
            }),
        }
    }

    /// Sum of two function-like signals; point masses combine by concatenation.
    pub fn add(&self, other: &SignalModel) -> Result<SignalModel> {
        let id = format!("sum({},{})", self.id, other.id);
        match (&self.body, &other.body) {
            (Body::Expr(a), Body::Expr(b)) => {
                let mut s = SignalModel::from_expr(SignalExpr::Sum(vec![a.clone(), b.clone()]), id);
                if self.growth == GrowthHint::ExpType || other.growth == GrowthHint::ExpType {
                    s.growth = GrowthHint::ExpType;
                }
                Ok(s)
            }
            (Body::Masses(a), Body::Masses(b)) => {
                let mut m = a.clone();
                m.extend_from_slice(b);
                Ok(SignalModel::point_masses(m)?.with_id(id))
            }
            _ => Err(GaborError::Capability(
                "cannot add a point-mass combination to a function signal".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn translate_and_modulate_identities() {
        let g = SignalModel::gaussian();
        assert_eq!(g.translate(0.0).eval(0.3), g.eval(0.3));
        assert!((g.translate(1.0).eval(1.0).unwrap().re - 1.0).abs() < 1e-15);
        let one = SignalModel::constant(1.0).modulate(0.5).eval(1.0).unwrap();
        assert!(close(one, Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn commutation_with_unit_product() {
        let f = SignalModel::gaussian();
        let lhs = f.translate(1.0).modulate(1.0);
        let rhs = f.modulate(1.0).translate(1.0);
        let phase = Complex64::from_polar(1.0, 2.0 * PI);
        for i in -20..=20 {
            let t = i as f64 * 0.1;
            assert!(close(lhs.eval(t).unwrap(), phase * rhs.eval(t).unwrap(), 1e-12));
        }
    }

    #[test]
    fn dirac_translates_location() {
        let d = SignalModel::dirac(0.0).translate(2.0);
        assert_eq!(d.masses().unwrap()[0].location, 2.0);
        assert_eq!(d.kind(), SignalKind::PointMasses);
        assert!(d.eval(2.0).is_none());
    }

    #[test]
    fn table_rules() {
        let t = SampledTable::new(
            vec![0.0, 1.0, 2.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0)],
            Extension::Zero,
        )
        .unwrap();
        assert_eq!(t.eval(0.5).re, 2.0);
        assert_eq!(t.eval(2.5).re, 0.0);
        let held = SampledTable::new(t.abscissae().to_vec(), t.values().to_vec(), Extension::Hold).unwrap();
        assert_eq!(held.eval(7.0).re, 5.0);
        assert!(SampledTable::new(vec![0.0, 0.0], vec![Complex64::default(); 2], Extension::Zero).is_err());
        let s = SignalModel::table(t, "t");
        assert_eq!(s.kind(), SignalKind::SampledTable);
        assert_eq!(s.breakpoints(-1.0, 3.0), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn supports_and_breakpoints() {
        let f = SignalModel::exp_step(1.0).translate(1.0);
        let s = f.support();
        assert_eq!((s.lo, s.hi), (1.0, f64::INFINITY));
        assert_eq!(f.breakpoints(-5.0, 5.0), vec![1.0]);
        assert_eq!(SignalModel::staircase().breakpoints(0.5, 3.5), vec![1.0, 2.0, 3.0]);
        assert!(SignalModel::zero().is_identically_zero());
        assert_eq!(SignalModel::exp_step(2.0).growth_hint(), GrowthHint::ExpType);
    }

    #[test]
    fn empty_mass_list_rejected() {
        assert!(SignalModel::point_masses(vec![]).is_err());
    }
}
