//! Minimax rational fitting of `h(m, x)` by bisection on the deviation level.
//!
//! The maximal deviation of `p/q` from `h` is a quasiconvex function of the
//! coefficients: for a fixed level `u` the set of coefficient vectors with
//! `|h - p/q| <= u` (and `q > 0`) on a finite grid is a polyhedron. The
//! smallest feasible `u` is therefore found by bisection, deciding each level
//! with a linear feasibility problem:
//!
//! 1. `u₋ = 0`, `u₊ = ‖h‖∞` (absolute) or `1` (relative).
//! 2. Test `u = (u₋ + u₊)/2`; if feasible set `u₊ = u`, else `u₋ = u`.
//! 3. Repeat until `u₊ - u₋` is small enough.
//!
//! The returned coefficients are those found at the final `u₊`.

pub mod feasibility;
pub mod simplex;

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::grid::GridSpec;
use crate::oracle::{self, OracleConfig, OracleError};
use crate::point::EvalPoint;
use crate::poly::{term_count, BivariatePoly};
use crate::rational::RationalApproximant;

pub use feasibility::{build_feasibility, check_feasible, AffineBasis, Feasibility, FeasibilitySystem};
pub use simplex::{LpError, LpOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("invalid fit problem: {0}")]
    Invalid(&'static str),
}

/// How the deviation bound scales at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// `|h - p/q| <= u`.
    Absolute,
    /// `|h - p/q| <= u·h`, i.e. `|g_n/g - 1| <= u`.
    Relative,
}

impl Weighting {
    pub fn as_str(&self) -> &'static str {
        match self {
            Weighting::Absolute => "absolute",
            Weighting::Relative => "relative",
        }
    }
}

impl std::str::FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(Weighting::Absolute),
            "relative" => Ok(Weighting::Relative),
            other => Err(format!("unknown weighting `{other}` (expected relative or absolute)")),
        }
    }
}

/// Grid points together with their oracle targets `h(m, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitGrid {
    spec: GridSpec,
    points: Vec<EvalPoint>,
    targets: Vec<f64>,
    oracle: OracleConfig,
}

/// Oracle `h` at every point, evaluated in parallel, in input order.
pub fn oracle_targets(points: &[EvalPoint], cfg: &OracleConfig) -> Result<Vec<f64>, OracleError> {
    points.par_iter().map(|&p| oracle::h(p, cfg)).collect()
}

impl FitGrid {
    pub fn new(spec: GridSpec, oracle: OracleConfig) -> Result<Self, FitError> {
        let points = spec.points();
        let targets = oracle_targets(&points, &oracle)?;
        if targets.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(FitError::Invalid("oracle targets must be finite and positive"));
        }
        Ok(Self { spec, points, targets, oracle })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn oracle(&self) -> &OracleConfig {
        &self.oracle
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Stop once `u₊ - u₋ < max(abs, rel · u₊)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for BisectionTol {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-4 }
    }
}

impl BisectionTol {
    pub fn width(&self, u_plus: f64) -> f64 {
        self.abs.max(self.rel * u_plus)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    degree: usize,
    grid: FitGrid,
    weighting: Weighting,
    denom_floor: f64,
    bisection_tol: BisectionTol,
    max_bisections: usize,
    feas_tol: f64,
    lp: LpOptions,
}

impl FitProblem {
    /// Relative weighting, `δ = 1`, default tolerances, at most 60 halvings.
    pub fn new(degree: usize, grid: FitGrid) -> Result<Self, FitError> {
        if grid.is_empty() {
            return Err(FitError::Invalid("grid has no points"));
        }
        Ok(Self {
            degree,
            grid,
            weighting: Weighting::Relative,
            denom_floor: 1.0,
            bisection_tol: BisectionTol::default(),
            max_bisections: 60,
            feas_tol: 1e-9,
            lp: LpOptions::default(),
        })
    }

    pub fn with_weighting(mut self, w: Weighting) -> Self {
        self.weighting = w;
        self
    }

    pub fn with_denom_floor(mut self, delta: f64) -> Result<Self, FitError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(FitError::Invalid("denominator floor must be positive"));
        }
        self.denom_floor = delta;
        Ok(self)
    }

    pub fn with_bisection_tol(mut self, tol: BisectionTol) -> Result<Self, FitError> {
        if !(tol.abs > 0.0 && tol.rel >= 0.0) {
            return Err(FitError::Invalid("bisection tolerance must be positive"));
        }
        self.bisection_tol = tol;
        Ok(self)
    }

    pub fn with_max_bisections(mut self, n: usize) -> Self {
        self.max_bisections = n;
        self
    }

    pub fn with_lp_options(mut self, lp: LpOptions) -> Self {
        self.lp = lp;
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> &FitGrid {
        &self.grid
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn denom_floor(&self) -> f64 {
        self.denom_floor
    }

    pub fn bisection_tol(&self) -> BisectionTol {
        self.bisection_tol
    }

    pub fn max_bisections(&self) -> usize {
        self.max_bisections
    }

    pub fn feas_tol(&self) -> f64 {
        self.feas_tol
    }

    pub fn lp_options(&self) -> &LpOptions {
        &self.lp
    }

    /// Starting upper bound: `max h` (absolute) or 1 (relative). Both admit
    /// the witness `p = 0`, `q = δ`.
    pub fn initial_upper(&self) -> f64 {
        match self.weighting {
            Weighting::Absolute => self.grid.targets.iter().copied().fold(0.0, f64::max),
            Weighting::Relative => 1.0,
        }
    }

    /// Builds and decides the system at level `u`.
    pub fn test_level(&self, u: f64) -> Result<Feasibility, FitError> {
        self.test_level_from(u, None)
    }

    /// As [`test_level`](Self::test_level), starting the LP from a previous
    /// level's point.
    pub fn test_level_from(&self, u: f64, warm: Option<&[f64]>) -> Result<Feasibility, FitError> {
        Ok(check_feasible(&build_feasibility(self, u), self.feas_tol, &self.lp, warm)?)
    }

    fn witness(&self) -> Vec<f64> {
        let nc = term_count(self.degree);
        let mut z = vec![0.0; 2 * nc];
        z[nc] = self.denom_floor;
        z
    }
}

/// One bisection step: the level tested and whether it was feasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionStep {
    pub u: f64,
    pub feasible: bool,
    pub lp_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub approximant: RationalApproximant,
    pub u_minus: f64,
    pub u_plus: f64,
    pub iterations: usize,
    pub converged: bool,
    pub weighting: Weighting,
    pub grid: GridSpec,
    pub oracle: OracleConfig,
    /// Maximal deviation (in the weighting's units) on the fit grid.
    pub achieved_dev: f64,
    /// Maximal deviation on the 4×-refined verification grid.
    pub achieved_dev_fine: f64,
    /// Maximal `|g_n/g - 1|` on the fit grid.
    pub achieved_rel_dev: f64,
    /// Smallest denominator value on the verification grid.
    pub denom_min: f64,
    pub pole_warning: Option<String>,
    pub history: Vec<BisectionStep>,
}

fn normalize(z: &[f64], degree: usize) -> RationalApproximant {
    let nc = term_count(degree);
    let b00 = z[nc];
    let scale = if b00.abs() >= 1e-3 { b00.abs() } else { z[nc..].iter().fold(0.0f64, |s, v| s.max(v.abs())) };
    let numer = BivariatePoly::from_dense(degree, z[..nc].iter().map(|v| v / scale).collect());
    let denom = BivariatePoly::from_dense(degree, z[nc..].iter().map(|v| v / scale).collect());
    RationalApproximant::new(numer.unwrap(), denom.unwrap()).expect("feasible denominators are positive on the grid")
}

/// Runs the bisection and verifies the result on the fit grid and a grid
/// refined four times in each direction.
pub fn bisect_fit(problem: &FitProblem) -> Result<FitResult, FitError> {
    let mut u_minus = 0.0;
    let mut u_plus = problem.initial_upper();
    let mut best = problem.witness();
    let mut history = Vec::new();
    let mut warm: Option<Vec<f64>> = None;

    while u_plus - u_minus >= problem.bisection_tol.width(u_plus) {
        if history.len() >= problem.max_bisections {
            break;
        }
        let u = 0.5 * (u_minus + u_plus);
        let verdict = problem.test_level_from(u, warm.as_deref())?;
        warm = Some(verdict.conditioned().to_vec());
        history.push(BisectionStep { u, feasible: verdict.is_feasible(), lp_iterations: verdict.iterations() });
        match verdict {
            Feasibility::Feasible { coeffs, .. } => {
                u_plus = u;
                best = coeffs;
            }
            Feasibility::Infeasible { .. } => u_minus = u,
        }
    }
    let converged = u_plus - u_minus < problem.bisection_tol.width(u_plus);
    let approximant = normalize(&best, problem.degree);

    let on_grid = deviation_sweep(&approximant, problem.grid.points(), problem.grid.targets(), problem.weighting);
    let mut result = FitResult {
        approximant,
        u_minus,
        u_plus,
        iterations: history.len(),
        converged,
        weighting: problem.weighting,
        grid: problem.grid.spec.clone(),
        oracle: problem.grid.oracle,
        achieved_dev: on_grid.max_dev,
        achieved_dev_fine: f64::NAN,
        achieved_rel_dev: on_grid.max_rel_dev,
        denom_min: f64::NAN,
        pole_warning: on_grid.pole.clone(),
        history,
    };
    let fine = verify_fit(&result, 4)?;
    result.achieved_dev_fine = fine.max_dev;
    result.denom_min = fine.min_denom;
    if result.pole_warning.is_none() {
        result.pole_warning = fine.pole;
    }
    Ok(result)
}

/// Deviation diagnostics of a fitted approximant on some grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub grid: GridSpec,
    pub points: usize,
    /// Maximal deviation in the fit's weighting.
    pub max_dev: f64,
    /// Maximal `|p/(q h) - 1|`.
    pub max_rel_dev: f64,
    pub argmax: Option<EvalPoint>,
    pub min_denom: f64,
    /// Points whose deviation is within 1% of the maximum, by sign.
    pub near_extremal_pos: usize,
    pub near_extremal_neg: usize,
    pub pole: Option<String>,
}

impl VerificationReport {
    pub fn near_extremal(&self) -> usize {
        self.near_extremal_pos + self.near_extremal_neg
    }
}

struct Sweep {
    max_dev: f64,
    max_rel_dev: f64,
    argmax: Option<EvalPoint>,
    min_denom: f64,
    near_pos: usize,
    near_neg: usize,
    pole: Option<String>,
}

fn deviation_sweep(r: &RationalApproximant, points: &[EvalPoint], targets: &[f64], weighting: Weighting) -> Sweep {
    let mut devs = Vec::with_capacity(points.len());
    let mut max_rel_dev = 0.0f64;
    let mut min_denom = f64::INFINITY;
    let mut pole = None;
    for (&p, &h) in points.iter().zip(targets) {
        let q = r.denom().eval_at(p);
        min_denom = min_denom.min(q);
        if q <= 0.0 && pole.is_none() {
            pole = Some(format!("denominator {q:e} <= 0 at {p}"));
        }
        let ratio = r.numer().eval_at(p) / q;
        let signed = match weighting {
            Weighting::Absolute => ratio - h,
            Weighting::Relative => ratio / h - 1.0,
        };
        max_rel_dev = max_rel_dev.max((ratio / h - 1.0).abs());
        devs.push(signed);
    }
    let (mut max_dev, mut argmax) = (0.0f64, None);
    for (&d, &p) in devs.iter().zip(points) {
        if d.abs() > max_dev || argmax.is_none() {
            max_dev = d.abs();
            argmax = Some(p);
        }
    }
    let near = 0.99 * max_dev;
    let near_pos = devs.iter().filter(|&&d| d >= near && max_dev > 0.0).count();
    let near_neg = devs.iter().filter(|&&d| -d >= near && max_dev > 0.0).count();
    Sweep { max_dev, max_rel_dev, argmax, min_denom, near_pos, near_neg, pole }
}

/// Re-evaluates a fit on its grid refined `fine_factor` times per axis.
pub fn verify_fit(result: &FitResult, fine_factor: usize) -> Result<VerificationReport, OracleError> {
    let grid = result.grid.refined(fine_factor.max(1));
    let points = grid.points();
    let targets = oracle_targets(&points, &result.oracle)?;
    let s = deviation_sweep(&result.approximant, &points, &targets, result.weighting);
    Ok(VerificationReport {
        points: points.len(),
        grid,
        max_dev: s.max_dev,
        max_rel_dev: s.max_rel_dev,
        argmax: s.argmax,
        min_denom: s.min_denom,
        near_extremal_pos: s.near_pos,
        near_extremal_neg: s.near_neg,
        pole: s.pole,
    })
}

impl FitResult {
    /// Sidecar report, one `key value` pair per line.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} {v}").unwrap();
        kv("u_minus", format!("{:e}", self.u_minus));
        kv("u_plus", format!("{:e}", self.u_plus));
        kv("iterations", self.iterations.to_string());
        kv("achieved_dev", format!("{:e}", self.achieved_dev));
        kv("achieved_dev_fine", format!("{:e}", self.achieved_dev_fine));
        kv("achieved_rel_dev", format!("{:e}", self.achieved_rel_dev));
        kv("denom_min", format!("{:e}", self.denom_min));
        kv("mode", self.weighting.as_str().to_owned());
        kv("grid", self.grid.axis_form());
        kv("degree", self.approximant.degree().to_string());
        kv("converged", self.converged.to_string());
        kv("pole_warning", self.pole_warning.clone().unwrap_or_else(|| "none".to_owned()));
        out
    }
}

/// Parses a sidecar report back into `key → value` pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines().filter_map(|l| l.split_once(' ')).map(|(k, v)| (k.to_owned(), v.to_owned())).collect()
}
