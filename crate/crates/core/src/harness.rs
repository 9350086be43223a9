//! Deviation sweeps of approximations against the oracle.
//!
//! The relative deviation `ε = g_model/g - 1` is computed in scaled form,
//! `ε = h_model/h - 1`, which is the same quantity without the prefactor
//! underflowing at large `x`. SSE is the unnormalized `Σ ε²` over the grid.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::grid::GridSpec;
use crate::models::{self, MDomain, ModelError, ModelId};
use crate::oracle::{self, OracleConfig, OracleError};
use crate::point::{EvalPoint, X_MAX, X_MIN};
use crate::rational::{RationalApproximant, RationalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{label}: {source}")]
    Approximant { label: String, source: RationalError },
    #[error("model {model} has no admissible points on grid {grid}")]
    EmptyDomain { model: String, grid: String },
    #[error("no models to compare")]
    NoModels,
    #[error("{0}")]
    Invalid(String),
    #[error("x = {x} is outside the approximation range [{lo}, {hi}]; use the oracle instead")]
    Range { x: f64, lo: f64, hi: f64 },
}

/// Something that approximates `g(m, x)`: a literature model or an
/// approximant loaded from a coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub enum Subject {
    Model(ModelId),
    Approximant { label: String, approximant: RationalApproximant },
}

impl Subject {
    pub fn label(&self) -> String {
        match self {
            Subject::Model(id) => id.tag().to_owned(),
            Subject::Approximant { label, .. } => label.clone(),
        }
    }

    pub fn domain(&self) -> MDomain {
        match self {
            Subject::Model(id) => id.domain(),
            Subject::Approximant { .. } => MDomain::Any,
        }
    }

    /// `e^x x^(m+2) g_subject(m, x)`.
    pub fn eval_h(&self, point: EvalPoint) -> Result<f64, HarnessError> {
        match self {
            Subject::Model(id) => Ok(models::eval_model_h(*id, point)?),
            Subject::Approximant { label, approximant } => {
                approximant.eval_h(point).map_err(|source| HarnessError::Approximant { label: label.clone(), source })
            }
        }
    }

    pub fn eval_g(&self, point: EvalPoint) -> Result<f64, HarnessError> {
        match self {
            Subject::Model(id) => Ok(models::eval_model(*id, point)?),
            Subject::Approximant { .. } => Ok(point.prefactor() * self.eval_h(point)?),
        }
    }
}

impl From<ModelId> for Subject {
    fn from(id: ModelId) -> Self {
        Subject::Model(id)
    }
}

/// `ε = g_subject/g - 1` at one point.
pub fn deviation(subject: &Subject, point: EvalPoint, cfg: &OracleConfig) -> Result<f64, HarnessError> {
    Ok(subject.eval_h(point)? / oracle::h(point, cfg)? - 1.0)
}

/// Oracle values of `h` over a grid, shared by all subjects of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    grid: GridSpec,
    points: Vec<EvalPoint>,
    h: Vec<f64>,
}

impl OracleTable {
    pub fn new(grid: &GridSpec, cfg: &OracleConfig) -> Result<Self, OracleError> {
        let points = grid.points();
        let h = crate::fit::oracle_targets(&points, cfg)?;
        Ok(Self { grid: grid.clone(), points, h })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.points
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }
}

/// Per-point deviations of one subject on a grid, with aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub model: String,
    pub grid: GridSpec,
    /// Set when only part of the grid lies in the model's domain (the X
    /// model's tabulated `m` lines).
    pub restricted: Option<String>,
    pub points: Vec<EvalPoint>,
    pub h_oracle: Vec<f64>,
    pub h_model: Vec<f64>,
    pub eps: Vec<f64>,
    pub eps_max_abs: f64,
    pub sse: f64,
    pub argmax: EvalPoint,
}

/// `(max |ε|, Σ ε², index of the first maximum)`, accumulated in grid order.
pub fn aggregate(eps: &[f64]) -> (f64, f64, usize) {
    let mut max = 0.0f64;
    let mut sse = 0.0;
    let mut arg = 0;
    for (k, &e) in eps.iter().enumerate() {
        sse += e * e;
        if e.abs() > max {
            max = e.abs();
            arg = k;
        }
    }
    (max, sse, arg)
}

impl DeviationReport {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn g_oracle(&self, k: usize) -> f64 {
        self.points[k].prefactor() * self.h_oracle[k]
    }

    pub fn g_model(&self, k: usize) -> f64 {
        self.points[k].prefactor() * self.h_model[k]
    }

    /// CSV with header `model,m,x,g_oracle,g_model,eps`.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("model,m,x,g_oracle,g_model,eps\n");
        for (k, p) in self.points.iter().enumerate() {
            writeln!(
                out,
                "{},{:?},{:?},{:e},{:e},{:e}",
                self.model,
                p.m(),
                p.x(),
                self.g_oracle(k),
                self.g_model(k),
                self.eps[k]
            )
            .unwrap();
        }
        out
    }
}

/// Whether a domain should take part in an `all`-models comparison on a
/// grid with these `m` values.
pub fn domain_fits_grid(domain: MDomain, ms: &[f64]) -> bool {
    match domain {
        MDomain::Any => true,
        MDomain::Arrhenius => ms.iter().all(|&m| m == 0.0),
        MDomain::Tabulated(_) => ms.iter().any(|&m| domain.admits(m)),
    }
}

/// The listed models that can be evaluated on `grid`.
pub fn models_for_grid(grid: &GridSpec) -> Vec<ModelId> {
    let ms: Vec<f64> = grid.m_axis().values().collect();
    ModelId::ALL.iter().copied().filter(|id| domain_fits_grid(id.domain(), &ms)).collect()
}

pub fn report(subject: &Subject, grid: &GridSpec, cfg: &OracleConfig) -> Result<DeviationReport, HarnessError> {
    report_with(subject, &OracleTable::new(grid, cfg)?)
}

/// As [`report`], reusing precomputed oracle values.
///
/// Points outside the subject's domain are an error, except for tabulated
/// domains, which are evaluated on their own `m` lines only.
pub fn report_with(subject: &Subject, table: &OracleTable) -> Result<DeviationReport, HarnessError> {
    let domain = subject.domain();
    let keep: Vec<usize> = match domain {
        MDomain::Tabulated(_) => (0..table.points.len()).filter(|&k| domain.admits(table.points[k].m())).collect(),
        _ => (0..table.points.len()).collect(),
    };
    if keep.is_empty() {
        return Err(HarnessError::EmptyDomain { model: subject.label(), grid: table.grid.label() });
    }
    let restricted = (keep.len() < table.points.len()).then(|| format!("evaluated on m = {domain} only"));
    let points: Vec<EvalPoint> = keep.iter().map(|&k| table.points[k]).collect();
    let h_oracle: Vec<f64> = keep.iter().map(|&k| table.h[k]).collect();
    let h_model: Vec<f64> = points.par_iter().map(|&p| subject.eval_h(p)).collect::<Result<_, _>>()?;
    let eps: Vec<f64> = h_model.iter().zip(&h_oracle).map(|(hm, ho)| hm / ho - 1.0).collect();
    let (eps_max_abs, sse, arg) = aggregate(&eps);
    Ok(DeviationReport {
        model: subject.label(),
        grid: table.grid.clone(),
        restricted,
        argmax: points[arg],
        points,
        h_oracle,
        h_model,
        eps,
        eps_max_abs,
        sse,
    })
}

/// Reports for several subjects on one grid, sorted by `|ε|max` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub grid: GridSpec,
    pub rows: Vec<DeviationReport>,
}

pub fn compare(subjects: &[Subject], grid: &GridSpec, cfg: &OracleConfig) -> Result<Comparison, HarnessError> {
    if subjects.is_empty() {
        return Err(HarnessError::NoModels);
    }
    let table = OracleTable::new(grid, cfg)?;
    let mut rows = subjects.iter().map(|s| report_with(s, &table)).collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.eps_max_abs.total_cmp(&b.eps_max_abs));
    Ok(Comparison { grid: grid.clone(), rows })
}

/// Scientific notation with three significant digits, e.g. `1.12e-02`.
pub fn sci3(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.2e}");
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

impl Comparison {
    /// Aligned text table; restricted rows are starred and footnoted.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "grid: {} ({} points)", self.grid.label(), self.grid.len()).unwrap();
        let header = ["model", "points", "SSE", "|eps|max", "arg m", "arg x"];
        let cells: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                let name = if r.restricted.is_some() { format!("{}*", r.model) } else { r.model.clone() };
                [
                    name,
                    r.len().to_string(),
                    sci3(r.sse),
                    sci3(r.eps_max_abs),
                    format!("{}", r.argmax.m()),
                    format!("{}", r.argmax.x()),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |out: &mut String, row: &[&str]| {
            let mut s = format!("{:<w$}", row[0], w = widths[0]);
            for (c, w) in row[1..].iter().zip(&widths[1..]) {
                s.push_str(&format!("  {c:>w$}", w = *w));
            }
            writeln!(out, "{}", s.trim_end()).unwrap();
        };
        line(&mut out, &header);
        for row in &cells {
            line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        for r in self.rows.iter().filter(|r| r.restricted.is_some()) {
            writeln!(out, "* {}: {}", r.model, r.restricted.as_deref().unwrap()).unwrap();
        }
        out
    }

    /// CSV with header `model,grid,points,sse,eps_max,arg_m,arg_x`.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("model,grid,points,sse,eps_max,arg_m,arg_x\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:?},{:?}",
                r.model,
                self.grid.label(),
                r.len(),
                r.sse,
                r.eps_max_abs,
                r.argmax.m(),
                r.argmax.x()
            )
            .unwrap();
        }
        out
    }
}

/// Where `g(0, x)` comes from in [`vyazovkin_segment`].
#[derive(Debug, Clone, Copy)]
pub enum GSource<'a> {
    Oracle(&'a OracleConfig),
    Model(&'a Subject),
}

/// `∫_{T_lo}^{T_hi} exp(-E/RT) dT = (E/R)[g(0, E/RT_hi) - g(0, E/RT_lo)]`.
///
/// Models are restricted to `x ∈ [4, 100]`; the oracle accepts its own
/// wider domain.
pub fn vyazovkin_segment(e_over_r: f64, t_lo: f64, t_hi: f64, source: GSource<'_>) -> Result<f64, HarnessError> {
    if !(e_over_r > 0.0 && e_over_r.is_finite()) {
        return Err(HarnessError::Invalid(format!("E/R must be positive, got {e_over_r}")));
    }
    if !(t_lo > 0.0 && t_lo <= t_hi && t_hi.is_finite()) {
        return Err(HarnessError::Invalid(format!("need 0 < T_lo <= T_hi, got T_lo = {t_lo}, T_hi = {t_hi}")));
    }
    let near = e_over_r / t_hi;
    let far = e_over_r / t_lo;
    let g = |x: f64| -> Result<f64, HarnessError> {
        let p = EvalPoint::new(0.0, x).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        match source {
            GSource::Oracle(cfg) => Ok(oracle::g(p, cfg)?),
            GSource::Model(subject) => {
                if !(X_MIN..=X_MAX).contains(&x) {
                    return Err(HarnessError::Range { x, lo: X_MIN, hi: X_MAX });
                }
                subject.eval_g(p)
            }
        }
    };
    let (g_near, g_far) = (g(near)?, g(far)?);
    if t_lo == t_hi {
        return Ok(0.0);
    }
    Ok(e_over_r * (g_near - g_far))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn g_model_is_exact_at_minus_two() {
        let p = EvalPoint::new(-2.0, 10.0).unwrap();
        assert!(deviation(&ModelId::G.into(), p, &cfg()).unwrap().abs() < 1e-15);
        let grid: GridSpec = "m=-2:-2:1,x=10:10:1".parse().unwrap();
        let c = compare(&[ModelId::G.into()], &grid, &cfg()).unwrap();
        assert_eq!(c.rows[0].eps, vec![0.0]);
    }

    #[test]
    fn aggregates_are_consistent() {
        let r = report(&ModelId::C1.into(), &GridSpec::coarse(), &cfg()).unwrap();
        let (max, sse, arg) = aggregate(&r.eps);
        assert_eq!((max, sse), (r.eps_max_abs, r.sse));
        assert_eq!(r.points[arg], r.argmax);
        assert!(r.sse >= r.eps_max_abs.powi(2));
        assert!(r.sse <= r.len() as f64 * r.eps_max_abs.powi(2));
    }

    #[test]
    fn univariate_models_reject_bivariate_grids() {
        let err = report(&ModelId::J.into(), &GridSpec::coarse(), &cfg()).unwrap_err();
        assert!(matches!(err, HarnessError::Model(ModelError::Domain { .. })));
        assert!(report(&ModelId::J.into(), &GridSpec::arrhenius(), &cfg()).is_ok());
    }

    #[test]
    fn x_model_is_restricted_to_its_lines() {
        let r = report(&ModelId::X.into(), &GridSpec::paper_eval(), &cfg()).unwrap();
        assert_eq!(r.len(), 6 * 97);
        assert!(r.restricted.is_some());
        let none: GridSpec = "m=0.3:0.3:1,x=4:10:1".parse().unwrap();
        assert!(matches!(report(&ModelId::X.into(), &none, &cfg()), Err(HarnessError::EmptyDomain { .. })));
    }

    #[test]
    fn all_models_per_grid() {
        assert_eq!(models_for_grid(&GridSpec::arrhenius()).len(), 21);
        let eval = models_for_grid(&GridSpec::paper_eval());
        assert_eq!(eval.len(), 18);
        assert!(eval.contains(&ModelId::X) && !eval.contains(&ModelId::J));
    }

    #[test]
    fn comparison_is_sorted_and_rendered() {
        let subjects: Vec<Subject> = [ModelId::G, ModelId::G2, ModelId::C3, ModelId::X].map(Subject::from).to_vec();
        let c = compare(&subjects, &GridSpec::coarse(), &cfg()).unwrap();
        let order: Vec<&str> = c.rows.iter().map(|r| r.model.as_str()).collect();
        assert_eq!(order, ["G2", "X", "C3", "G"]);
        let text = c.render_text();
        assert!(text.contains("X*"));
        assert!(text.lines().last().unwrap().starts_with("* X"));
        let csv = c.render_csv();
        assert!(csv.starts_with("model,grid,points,sse,eps_max,arg_m,arg_x\n"));
        assert_eq!(csv.lines().count(), 5);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[4].parse::<f64>().unwrap(), c.rows[0].eps_max_abs);
    }

    #[test]
    fn per_point_csv() {
        let grid: GridSpec = "m=0:0:1,x=4:6:1".parse().unwrap();
        let r = report(&ModelId::SY.into(), &grid, &cfg()).unwrap();
        let csv = r.points_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "model,m,x,g_oracle,g_model,eps");
        assert_eq!(lines.len(), 4);
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(f[0], "SY");
        assert_eq!(f[5].parse::<f64>().unwrap(), r.eps[0]);
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(sci3(0.011213), "1.12e-02");
        assert_eq!(sci3(6.18e-7), "6.18e-07");
        assert_eq!(sci3(1.8153), "1.82e+00");
        assert_eq!(sci3(0.0), "0.00e0");
    }

    #[test]
    fn vyazovkin_basics() {
        let c = cfg();
        assert_eq!(vyazovkin_segment(10000.0, 500.0, 500.0, GSource::Oracle(&c)).unwrap(), 0.0);
        let a = vyazovkin_segment(10000.0, 500.0, 520.0, GSource::Oracle(&c)).unwrap();
        assert!((a / 6.237235317752145440679119e-8 - 1.0).abs() < 1e-12, "{a:e}");
        let b = vyazovkin_segment(20000.0, 1000.0, 1040.0, GSource::Oracle(&c)).unwrap();
        assert!((b / (2.0 * a) - 1.0).abs() < 1e-13);
        let j = Subject::Model(ModelId::J);
        let err = vyazovkin_segment(1000.0, 500.0, 520.0, GSource::Model(&j)).unwrap_err();
        assert!(matches!(err, HarnessError::Range { .. }));
        assert!(vyazovkin_segment(1000.0, 500.0, 400.0, GSource::Oracle(&c)).is_err());
        let approx = vyazovkin_segment(10000.0, 500.0, 520.0, GSource::Model(&j)).unwrap();
        assert!((approx / a - 1.0).abs() < 1e-5);
    }
}
