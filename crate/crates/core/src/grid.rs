//! Rectangular `(m, x)` grids with inclusive endpoints.
//!
//! Grids are written either as a preset name or as
//! `m=<lo>:<hi>:<step>,x=<lo>:<hi>:<step>`.
//!
//! | preset         | m                  | x                 | points |
//! |----------------|--------------------|-------------------|--------|
//! | `paper-eval`   | −4 … 4, step 0.1   | 4 … 100, step 1   | 7857   |
//! | `paper-narrow` | −1.5 … 2.5, step 0.1 | 4 … 100, step 1 | 3977   |
//! | `arrhenius`    | 0                  | 4 … 100, step 1   | 97     |
//! | `coarse`       | −4 … 4, step 0.5   | 4 … 100, step 4   | 425    |

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::point::EvalPoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid spec `{spec}`: {reason}")]
    Syntax { spec: String, reason: String },
    #[error("invalid {axis} axis: {reason}")]
    Axis { axis: char, reason: &'static str },
}

/// Equally spaced values `lo, lo + step, …, hi` (both ends inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
}

// Snap accumulated sums like -3.9000000000000004 to the nearest short decimal.
fn snap(v: f64) -> f64 {
    let s = (v * 1e12).round() / 1e12;
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

impl Axis {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self, &'static str> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err("bounds and step must be finite");
        }
        if lo > hi {
            return Err("lower bound exceeds upper bound");
        }
        if step <= 0.0 {
            return Err("step must be positive");
        }
        Ok(Self { lo, hi, step })
    }

    pub fn single(v: f64) -> Self {
        Self { lo: v, hi: v, step: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| snap(self.lo + k as f64 * self.step))
    }

    /// Same range with the step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { step: self.step / factor.max(1) as f64, ..*self }
    }
}

/// A named or ad hoc rectangular grid; points run over `m` in the outer loop
/// and `x` in the inner loop.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    name: Option<String>,
    m: Axis,
    x: Axis,
}

impl GridSpec {
    pub fn new(m: Axis, x: Axis) -> Result<Self, GridError> {
        if x.lo() <= 0.0 {
            return Err(GridError::Axis { axis: 'x', reason: "x must be strictly positive" });
        }
        Ok(Self { name: None, m, x })
    }

    fn preset(name: &str, m: Axis, x: Axis) -> Self {
        Self { name: Some(name.to_owned()), m, x }
    }

    /// `m ∈ [-4, 4]` step 0.1, `x ∈ [4, 100]` step 1.
    pub fn paper_eval() -> Self {
        Self::preset("paper-eval", Axis { lo: -4.0, hi: 4.0, step: 0.1 }, Self::paper_x())
    }

    /// `m ∈ [-1.5, 2.5]` step 0.1, `x ∈ [4, 100]` step 1.
    pub fn paper_narrow() -> Self {
        Self::preset("paper-narrow", Axis { lo: -1.5, hi: 2.5, step: 0.1 }, Self::paper_x())
    }

    /// `m = 0`, `x ∈ [4, 100]` step 1.
    pub fn arrhenius() -> Self {
        Self::preset("arrhenius", Axis::single(0.0), Self::paper_x())
    }

    /// `m ∈ [-4, 4]` step 0.5, `x ∈ [4, 100]` step 4, for quick runs.
    pub fn coarse() -> Self {
        Self::preset("coarse", Axis { lo: -4.0, hi: 4.0, step: 0.5 }, Axis { lo: 4.0, hi: 100.0, step: 4.0 })
    }

    fn paper_x() -> Axis {
        Axis { lo: 4.0, hi: 100.0, step: 1.0 }
    }

    pub const PRESETS: [&'static str; 4] = ["paper-eval", "paper-narrow", "arrhenius", "coarse"];

    pub fn from_preset(name: &str) -> Option<Self> {
        match name {
            "paper-eval" => Some(Self::paper_eval()),
            "paper-narrow" => Some(Self::paper_narrow()),
            "arrhenius" => Some(Self::arrhenius()),
            "coarse" => Some(Self::coarse()),
            _ => None,
        }
    }

    pub fn m_axis(&self) -> &Axis {
        &self.m
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.m.len() * self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Preset name if any, else the axis form.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.axis_form())
    }

    /// `m=lo:hi:step,x=lo:hi:step`.
    pub fn axis_form(&self) -> String {
        format!("m={}:{}:{},x={}:{}:{}", self.m.lo, self.m.hi, self.m.step, self.x.lo, self.x.hi, self.x.step)
    }

    pub fn points(&self) -> Vec<EvalPoint> {
        let xs: Vec<f64> = self.x.values().collect();
        self.m.values().flat_map(|m| xs.iter().map(move |&x| EvalPoint::new(m, x).expect("grid x > 0"))).collect()
    }

    /// The same rectangle with both steps divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        if factor <= 1 {
            return self.clone();
        }
        Self { name: None, m: self.m.refined(factor), x: self.x.refined(factor) }
    }

    /// Keeps only the `m` lines listed in `ms`, preserving point order.
    pub fn points_on_lines(&self, ms: &[f64]) -> Vec<EvalPoint> {
        self.points().into_iter().filter(|p| ms.iter().any(|&m| (p.m() - m).abs() < 1e-9)).collect()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for GridSpec {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(g) = Self::from_preset(s) {
            return Ok(g);
        }
        let syntax = |reason: &str| GridError::Syntax { spec: s.to_owned(), reason: reason.to_owned() };
        let mut m_axis = None;
        let mut x_axis = None;
        for part in s.split(',') {
            let (key, range) =
                part.split_once('=').ok_or_else(|| syntax("expected a preset name or `m=lo:hi:step,x=lo:hi:step`"))?;
            let nums: Vec<f64> = range
                .split(':')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| syntax("range values must be numbers"))?;
            let [lo, hi, step] = nums[..] else {
                return Err(syntax("each axis needs lo:hi:step"));
            };
            let key = key.trim();
            let axis = Axis::new(lo, hi, step)
                .map_err(|reason| GridError::Axis { axis: key.chars().next().unwrap_or('?'), reason })?;
            let slot = match key {
                "m" => &mut m_axis,
                "x" => &mut x_axis,
                other => return Err(syntax(&format!("unknown axis `{other}`"))),
            };
            if slot.replace(axis).is_some() {
                return Err(syntax(&format!("axis `{key}` given twice")));
            }
        }
        match (m_axis, x_axis) {
            (Some(m), Some(x)) => GridSpec::new(m, x),
            _ => Err(syntax("both m and x axes are required")),
        }
    }
}
