//! Dense phase-1 linear programming for tall, narrow inequality systems.
//!
//! Given `A z <= b` with `R` rows and `N` free variables (`R >> N`), the
//! phase-1 problem
//!
//! ```text
//! minimize Σ s_k   subject to   A z - s <= b,  s >= 0
//! ```
//!
//! has the dual
//!
//! ```text
//! maximize -bᵀy    subject to   Aᵀy = 0,  0 <= y <= 1
//! ```
//!
//! with only `N` equality rows. The dual is solved by a bounded-variable
//! dual simplex whose basis is an `N × N` matrix kept as an explicit inverse.
//! The reduced cost of `y_k` is the residual `a_k·z - b_k` of row `k` at the
//! current point `z = -π`, so every basis is dual feasible once each
//! nonbasic `y_k` sits at 1 for violated rows and at 0 otherwise; the method
//! then walks `z` until the basic `y` fall inside `[0, 1]`.
//!
//! The starting basis consists of `N` artificial columns fixed at `[0, 0]`
//! whose costs are chosen so that the first point is a caller-supplied `z₀`.
//! A generic `z₀` keeps residuals distinct and avoids stalling on ties.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex iteration limit {0} exceeded")]
    IterationLimit(usize),
    #[error("basis matrix became singular")]
    SingularBasis,
    #[error("no admissible pivot (numerical breakdown)")]
    Breakdown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub max_iterations: usize,
    /// Tolerance on residual signs (reduced costs).
    pub dual_tol: f64,
    /// Tolerance on the `[0, 1]` bounds of basic variables.
    pub primal_tol: f64,
    /// Smallest pivot element accepted in the ratio test.
    pub pivot_tol: f64,
    pub refactor_every: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self { max_iterations: 50_000, dual_tol: 1e-11, primal_tol: 1e-9, pivot_tol: 1e-9, refactor_every: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Solution {
    /// Minimal total violation `Σ max(0, a_k·z - b_k)`.
    pub total_violation: f64,
    /// The primal point.
    pub z: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Row(usize),
    Artificial(usize),
}

struct State<'a> {
    a: &'a [f64],
    b: &'a [f64],
    n: usize,
    art_cost: Vec<f64>,
    basis: Vec<Var>,
    /// Row-major inverse of the basis matrix.
    binv: Vec<f64>,
    at_upper: Vec<bool>,
    in_basis: Vec<bool>,
    /// Σ a_k over nonbasic rows at their upper bound.
    upper_sum: Vec<f64>,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl<'a> State<'a> {
    fn row(&self, k: usize) -> &'a [f64] {
        &self.a[k * self.n..(k + 1) * self.n]
    }

    fn column(&self, v: Var) -> Vec<f64> {
        match v {
            Var::Row(k) => self.row(k).to_vec(),
            Var::Artificial(i) => {
                let mut e = vec![0.0; self.n];
                e[i] = 1.0;
                e
            }
        }
    }

    fn cost(&self, v: Var) -> f64 {
        match v {
            Var::Row(k) => -self.b[k],
            Var::Artificial(i) => self.art_cost[i],
        }
    }

    /// π = B⁻ᵀ c_B.
    fn multipliers(&self) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n];
        for (i, &v) in self.basis.iter().enumerate() {
            let cb = self.cost(v);
            if cb != 0.0 {
                for (p, &b) in pi.iter_mut().zip(&self.binv[i * n..(i + 1) * n]) {
                    *p += cb * b;
                }
            }
        }
        pi
    }

    /// B⁻¹ v.
    fn ftran(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| dot(&self.binv[i * n..(i + 1) * n], v)).collect()
    }

    /// Values of the basic variables, `-B⁻¹ Σ_{upper} a_k`.
    fn basic_values(&self) -> Vec<f64> {
        self.ftran(&self.upper_sum).into_iter().map(|v| -v).collect()
    }

    fn set_upper(&mut self, k: usize, up: bool) {
        if self.at_upper[k] != up {
            let sign = if up { 1.0 } else { -1.0 };
            let n = self.n;
            for (s, &v) in self.upper_sum.iter_mut().zip(&self.a[k * n..(k + 1) * n]) {
                *s += sign * v;
            }
            self.at_upper[k] = up;
        }
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let n = self.n;
        let mut bmat = vec![0.0; n * n];
        for (col, &v) in self.basis.iter().enumerate() {
            for (r, val) in self.column(v).into_iter().enumerate() {
                bmat[r * n + col] = val;
            }
        }
        self.binv = invert(&bmat, n).ok_or(LpError::SingularBasis)?;
        let mut sum = vec![0.0; n];
        for k in (0..self.at_upper.len()).filter(|&k| self.at_upper[k]) {
            for (s, &v) in sum.iter_mut().zip(self.row(k)) {
                *s += v;
            }
        }
        self.upper_sum = sum;
        Ok(())
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let n = self.n;
        let piv = alpha[r];
        let row_r: Vec<f64> = self.binv[r * n..(r + 1) * n].iter().map(|v| v / piv).collect();
        for (i, &f) in alpha.iter().enumerate() {
            if i != r && f != 0.0 {
                for (b, &rv) in self.binv[i * n..(i + 1) * n].iter_mut().zip(&row_r) {
                    *b -= f * rv;
                }
            }
        }
        self.binv[r * n..(r + 1) * n].copy_from_slice(&row_r);
    }
}

/// Gauss–Jordan inverse with partial pivoting of a row-major `n × n` matrix.
fn invert(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let w = 2 * n;
    let mut aug = vec![0.0; n * w];
    for r in 0..n {
        aug[r * w..r * w + n].copy_from_slice(&m[r * n..(r + 1) * n]);
        aug[r * w + n + r] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| aug[p * w + col].abs().total_cmp(&aug[q * w + col].abs())).unwrap();
        let pv = aug[piv * w + col];
        if pv.abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..w {
                aug.swap(piv * w + k, col * w + k);
            }
        }
        let inv = 1.0 / pv;
        for k in 0..w {
            aug[col * w + k] *= inv;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r * w + col];
                if f != 0.0 {
                    for k in 0..w {
                        aug[r * w + k] -= f * aug[col * w + k];
                    }
                }
            }
        }
    }
    Some((0..n).flat_map(|r| aug[r * w + n..(r + 1) * w].iter().copied()).collect())
}

/// Minimizes the total violation of `A z <= b`, starting the search at `z0`
/// (the origin if `None`).
///
/// `a` is row-major with `ncols` columns; `b` has one entry per row. Rows
/// should be scaled to comparable magnitude by the caller.
pub fn min_total_violation(
    a: &[f64],
    b: &[f64],
    ncols: usize,
    z0: Option<&[f64]>,
    opts: &LpOptions,
) -> Result<Phase1Solution, LpError> {
    let nrows = b.len();
    assert_eq!(a.len(), nrows * ncols, "matrix shape does not match rhs length");
    let n = ncols;
    let art_cost = match z0 {
        Some(z) => {
            assert_eq!(z.len(), n, "starting point has the wrong length");
            z.iter().map(|v| -v).collect()
        }
        None => vec![0.0; n],
    };

    let mut identity = vec![0.0; n * n];
    for i in 0..n {
        identity[i * n + i] = 1.0;
    }
    let mut st = State {
        a,
        b,
        n,
        art_cost,
        basis: (0..n).map(Var::Artificial).collect(),
        binv: identity,
        at_upper: vec![false; nrows],
        in_basis: vec![false; nrows],
        upper_sum: vec![0.0; n],
    };

    let mut since_refactor = 0usize;
    let mut d = vec![0.0; nrows];
    for iteration in 0..=opts.max_iterations {
        let pi = st.multipliers();
        for k in 0..nrows {
            if st.in_basis[k] {
                continue;
            }
            d[k] = -b[k] - dot(st.row(k), &pi);
            if d[k] > opts.dual_tol {
                st.set_upper(k, true);
            } else if d[k] < -opts.dual_tol {
                st.set_upper(k, false);
            }
        }
        let x = st.basic_values();

        // Leaving variable: dual steepest edge, i.e. the largest bound
        // violation relative to the norm of its row of B⁻¹.
        let mut leave: Option<(usize, bool, f64)> = None;
        let mut best = 0.0;
        for (i, (&v, &xi)) in st.basis.iter().zip(&x).enumerate() {
            let hi = match v {
                Var::Row(_) => 1.0,
                Var::Artificial(_) => 0.0,
            };
            let (excess, to_upper) = if xi > hi { (xi - hi, true) } else { (-xi, false) };
            if excess > opts.primal_tol {
                let norm2: f64 = st.binv[i * n..(i + 1) * n].iter().map(|v| v * v).sum();
                let score = excess * excess / norm2;
                if score > best {
                    best = score;
                    leave = Some((i, to_upper, excess));
                }
            }
        }
        let Some((r, to_upper, excess)) = leave else {
            let total_violation = (0..nrows).filter(|&k| st.at_upper[k] && !st.in_basis[k]).map(|k| -b[k]).sum::<f64>()
                + st.basis.iter().zip(&x).map(|(&v, &xi)| st.cost(v) * xi).sum::<f64>();
            return Ok(Phase1Solution {
                total_violation,
                z: pi.into_iter().map(|p| -p).collect(),
                iterations: iteration,
            });
        };
        if iteration == opts.max_iterations {
            break;
        }

        // Long-step dual ratio test. Moving π along the leaving row passes
        // breakpoints where a residual changes sign; each one lowers the
        // slope of the dual objective by |α_k|. Breakpoints passed while the
        // slope stays positive just flip bounds (handled by the sign update
        // above on the next iteration); the one where it turns enters.
        let rho = st.binv[r * n..(r + 1) * n].to_vec();
        let mut breaks: Vec<(f64, f64, usize)> = Vec::new();
        for k in (0..nrows).filter(|&k| !st.in_basis[k]) {
            let alpha = dot(st.row(k), &rho);
            if alpha.abs() <= opts.pivot_tol {
                continue;
            }
            let up = st.at_upper[k];
            let eligible = if to_upper { up == (alpha < 0.0) } else { up == (alpha > 0.0) };
            if eligible {
                breaks.push((d[k].abs() / alpha.abs(), alpha.abs(), k));
            }
        }
        breaks.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut slope = excess;
        let mut stop = None;
        for (idx, &(_, mag, _)) in breaks.iter().enumerate() {
            slope -= mag;
            if slope <= 0.0 {
                stop = Some(idx);
                break;
            }
        }
        let Some(stop) = stop else {
            // Usually drift in the updated inverse; retry once from a fresh
            // factorization before giving up.
            if since_refactor > 0 {
                st.refactor()?;
                since_refactor = 0;
                continue;
            }
            return Err(LpError::Breakdown);
        };
        // Among breakpoints tied with the stopping one, take the largest pivot.
        let theta = breaks[stop].0;
        let window = theta + opts.dual_tol / breaks[stop].1.max(1.0);
        let q = breaks[..]
            .iter()
            .skip(stop)
            .take_while(|b| b.0 <= window)
            .chain(breaks[..stop].iter().rev().take_while(|b| b.0 >= theta - opts.dual_tol))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .map(|b| b.2)
            .unwrap();

        let alpha_col = st.ftran(st.row(q));
        if let Var::Row(k) = st.basis[r] {
            st.in_basis[k] = false;
            st.at_upper[k] = false;
            st.set_upper(k, to_upper);
        }
        st.set_upper(q, false);
        st.in_basis[q] = true;
        st.basis[r] = Var::Row(q);
        st.pivot(r, &alpha_col);

        since_refactor += 1;
        if since_refactor >= opts.refactor_every {
            st.refactor()?;
            since_refactor = 0;
        }
    }
    Err(LpError::IterationLimit(opts.max_iterations))
}
