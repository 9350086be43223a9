//! Linear feasibility systems for one level `u` of the bisection.
//!
//! For a target `h_k` at grid point `k`, weight `w_k` and level `u`, the
//! sublevel set `{(p, q) : |h_k - p/q| <= u·w_k, q > 0}` becomes, after
//! multiplying through by `q`, three rows linear in the coefficients:
//!
//! ```text
//!  p_k - h_k q_k - u w_k q_k <= 0
//! -p_k + h_k q_k - u w_k q_k <= 0
//!                      -q_k  <= -δ
//! ```

use crate::poly::{monomials, term_count};

use super::simplex::{self, LpError, LpOptions};
use super::{FitProblem, Weighting};

/// Affine normalization `ξ = (x - cx)/rx`, `μ = (m - cm)/rm` used to
/// condition the linear program. It does not change the polynomial space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBasis {
    pub cx: f64,
    pub rx: f64,
    pub cm: f64,
    pub rm: f64,
}

impl AffineBasis {
    pub const IDENTITY: Self = Self { cx: 0.0, rx: 1.0, cm: 0.0, rm: 1.0 };

    pub fn spanning(x: (f64, f64), m: (f64, f64)) -> Self {
        let half = |(lo, hi): (f64, f64)| {
            let r = 0.5 * (hi - lo);
            if r > 0.0 {
                r
            } else {
                1.0
            }
        };
        Self { cx: 0.5 * (x.0 + x.1), rx: half(x), cm: 0.5 * (m.0 + m.1), rm: half(m) }
    }

    /// `T` with `raw = T · shifted` for one polynomial of total degree
    /// `degree`, row-major over the graded monomial order.
    fn raw_from_shifted(&self, degree: usize) -> Vec<f64> {
        let nc = term_count(degree);
        let mono: Vec<(usize, usize)> = monomials(degree).collect();
        let mut t = vec![0.0; nc * nc];
        for (row, &(i, j)) in mono.iter().enumerate() {
            for (col, &(k, l)) in mono.iter().enumerate() {
                if i > k || j > l {
                    continue;
                }
                let xs = binom(k, i) * (-self.cx).powi((k - i) as i32) / self.rx.powi(k as i32);
                let ms = binom(l, j) * (-self.cm).powi((l - j) as i32) / self.rm.powi(l as i32);
                t[row * nc + col] = xs * ms;
            }
        }
        t
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Rows `A z <= b` over the coefficient vector `z = (a_ij…, b_ij…)`, three
/// rows per grid point in the order (upper deviation, lower deviation,
/// denominator floor).
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySystem {
    degree: usize,
    nvars: usize,
    rows: Vec<f64>,
    rhs: Vec<f64>,
    basis: AffineBasis,
    delta: f64,
}

impl FeasibilitySystem {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nrows(&self) -> usize {
        self.rhs.len()
    }

    pub fn row(&self, k: usize) -> (&[f64], f64) {
        (&self.rows[k * self.nvars..(k + 1) * self.nvars], self.rhs[k])
    }

    pub fn conditioning(&self) -> AffineBasis {
        self.basis
    }

    /// Largest `a_k·z - b_k`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        (0..self.nrows())
            .map(|k| {
                let (a, b) = self.row(k);
                a.iter().zip(z).map(|(x, y)| x * y).sum::<f64>() - b
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn build_feasibility(problem: &FitProblem, u: f64) -> FeasibilitySystem {
    assert!(u >= 0.0, "deviation level must be non-negative");
    let degree = problem.degree();
    let nc = term_count(degree);
    let nvars = 2 * nc;
    let grid = problem.grid();
    let delta = problem.denom_floor();

    let npts = grid.len();
    let mut rows = Vec::with_capacity(3 * npts * nvars);
    let mut rhs = Vec::with_capacity(3 * npts);
    let mono: Vec<(usize, usize)> = monomials(degree).collect();
    let mut v = vec![0.0; nc];

    for (p, &h) in grid.points().iter().zip(grid.targets()) {
        for (slot, &(i, j)) in v.iter_mut().zip(&mono) {
            *slot = p.x().powi(i as i32) * p.m().powi(j as i32);
        }
        let w = match problem.weighting() {
            Weighting::Absolute => 1.0,
            Weighting::Relative => h,
        };
        let hi = h + u * w;
        let lo = h - u * w;
        rows.extend(v.iter().copied());
        rows.extend(v.iter().map(|c| -hi * c));
        rhs.push(0.0);
        rows.extend(v.iter().map(|c| -c));
        rows.extend(v.iter().map(|c| lo * c));
        rhs.push(0.0);
        rows.extend(std::iter::repeat_n(0.0, nc));
        rows.extend(v.iter().map(|c| -c));
        rhs.push(-delta);
    }

    let x = grid.spec().x_axis();
    let m = grid.spec().m_axis();
    FeasibilitySystem {
        degree,
        nvars,
        rows,
        rhs,
        basis: AffineBasis::spanning((x.lo(), x.hi()), (m.lo(), m.hi())),
        delta,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A coefficient vector satisfying every row to within the tolerance.
    Feasible { coeffs: Vec<f64>, max_violation: f64, iterations: usize, conditioned: Vec<f64> },
    /// No such vector; `total_violation` is the phase-1 optimum.
    Infeasible { total_violation: f64, iterations: usize, conditioned: Vec<f64> },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    /// The LP point in the affine-normalized basis, usable as a warm start
    /// for a nearby level.
    pub fn conditioned(&self) -> &[f64] {
        match self {
            Feasibility::Feasible { conditioned, .. } | Feasibility::Infeasible { conditioned, .. } => conditioned,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Feasibility::Feasible { iterations, .. } | Feasibility::Infeasible { iterations, .. } => *iterations,
        }
    }
}

/// Decides whether `system` has a solution.
///
/// The system is rewritten in the affine-normalized monomial basis, rows and
/// columns are equilibrated, and the phase-1 program is solved. The verdict
/// is `max_k (a_k·z - b_k) <= feas_tol` in the equilibrated rows; the
/// returned coefficients are mapped back to the raw `x^i m^j` basis.
///
/// `warm` is a starting point in the normalized basis, typically
/// [`Feasibility::conditioned`] from a previous level; without it the search
/// starts from `p = 0`, `q = 2δ`.
pub fn check_feasible(
    system: &FeasibilitySystem,
    feas_tol: f64,
    opts: &LpOptions,
    warm: Option<&[f64]>,
) -> Result<Feasibility, LpError> {
    let nv = system.nvars;
    let nc = nv / 2;
    let nrows = system.nrows();
    let t = system.basis.raw_from_shifted(system.degree);

    let mut a = vec![0.0; nrows * nv];
    let mut b = vec![0.0; nrows];
    for k in 0..nrows {
        let (row, rhs) = system.row(k);
        let out = &mut a[k * nv..(k + 1) * nv];
        for block in 0..2 {
            let src = &row[block * nc..(block + 1) * nc];
            for col in 0..nc {
                out[block * nc + col] = (0..nc).map(|r| src[r] * t[r * nc + col]).sum();
            }
        }
        let scale = out.iter().fold(rhs.abs(), |s, v| s.max(v.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        out.iter_mut().for_each(|v| *v /= scale);
        b[k] = rhs / scale;
    }
    let mut col_scale = vec![0.0f64; nv];
    for k in 0..nrows {
        for (c, v) in col_scale.iter_mut().zip(&a[k * nv..(k + 1) * nv]) {
            *c = c.max(v.abs());
        }
    }
    col_scale.iter_mut().for_each(|c| {
        if *c == 0.0 {
            *c = 1.0
        }
    });
    for k in 0..nrows {
        for (v, c) in a[k * nv..(k + 1) * nv].iter_mut().zip(&col_scale) {
            *v /= c;
        }
    }

    let z0: Vec<f64> = match warm {
        Some(w) if w.len() == nv => w.iter().zip(&col_scale).map(|(v, c)| v * c).collect(),
        _ => {
            let mut z0 = vec![0.0; nv];
            z0[nc] = 2.0 * system.delta * col_scale[nc];
            z0
        }
    };
    let sol = simplex::min_total_violation(&a, &b, nv, Some(&z0), opts)?;
    let shifted: Vec<f64> = sol.z.iter().zip(&col_scale).map(|(z, c)| z / c).collect();
    let max_violation = (0..nrows)
        .map(|k| a[k * nv..(k + 1) * nv].iter().zip(&sol.z).map(|(x, y)| x * y).sum::<f64>() - b[k])
        .fold(f64::NEG_INFINITY, f64::max);

    if max_violation > feas_tol {
        return Ok(Feasibility::Infeasible {
            total_violation: sol.total_violation.max(max_violation),
            iterations: sol.iterations,
            conditioned: shifted,
        });
    }

    let mut coeffs = vec![0.0; nv];
    for block in 0..2 {
        for r in 0..nc {
            coeffs[block * nc + r] = (0..nc).map(|col| t[r * nc + col] * shifted[block * nc + col]).sum();
        }
    }
    Ok(Feasibility::Feasible { coeffs, max_violation, iterations: sol.iterations, conditioned: shifted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::BivariatePoly;

    #[test]
    fn basis_change_reproduces_polynomial() {
        let basis = AffineBasis::spanning((4.0, 100.0), (-4.0, 4.0));
        let n = 3;
        let nc = term_count(n);
        let t = basis.raw_from_shifted(n);
        let shifted: Vec<f64> = (0..nc).map(|k| 0.3 * k as f64 - 1.0).collect();
        let raw: Vec<f64> = (0..nc).map(|r| (0..nc).map(|c| t[r * nc + c] * shifted[c]).sum()).collect();
        let raw_poly = BivariatePoly::from_dense(n, raw).unwrap();
        let shifted_poly = BivariatePoly::from_dense(n, shifted).unwrap();
        for &(m, x) in &[(-4.0, 4.0), (1.3, 55.0), (4.0, 100.0)] {
            let direct = shifted_poly.eval((m - basis.cm) / basis.rm, (x - basis.cx) / basis.rx);
            assert!((raw_poly.eval(m, x) - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), 6.0);
        assert_eq!(binom(3, 0), 1.0);
        assert_eq!(binom(5, 5), 1.0);
    }
}
