//! Total-degree bivariate polynomials in `x` and `m`.

use crate::point::EvalPoint;

/// Number of monomials `x^i m^j` with `i + j <= degree`.
#[inline]
pub const fn term_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Monomial exponents `(i, j)` in graded order: total degree ascending, then
/// the `x` exponent descending. `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`
pub fn monomials(degree: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=degree).flat_map(|d| (0..=d).rev().map(move |i| (i, d - i)))
}

/// Position of `x^i m^j` in the graded layout.
#[inline]
pub const fn term_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + (d - i)
}

/// `Σ c_ij x^i m^j` over `i + j <= degree`, stored densely in the order of
/// [`monomials`]. Absent terms are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    degree: usize,
    coeffs: Vec<f64>,
}

impl BivariatePoly {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![0.0; term_count(degree)] }
    }

    /// Builds from a dense coefficient vector in graded order. Returns `None`
    /// if the length is not `(n+1)(n+2)/2`.
    pub fn from_dense(degree: usize, coeffs: Vec<f64>) -> Option<Self> {
        (coeffs.len() == term_count(degree)).then_some(Self { degree, coeffs })
    }

    /// Builds from sparse `(i, j, c)` triples. Returns `None` if any pair has
    /// `i + j > degree`.
    pub fn from_terms(degree: usize, terms: &[(usize, usize, f64)]) -> Option<Self> {
        let mut p = Self::zero(degree);
        for &(i, j, c) in terms {
            if i + j > degree {
                return None;
            }
            p.coeffs[term_index(i, j)] += c;
        }
        Some(p)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `x^i m^j`, zero outside the support.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[term_index(i, j)]
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(i, j, c_ij)` in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        monomials(self.degree).zip(&self.coeffs).map(|((i, j), &c)| (i, j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Nested evaluation: for each power of `x` the `m`-polynomial
    /// `Σ_j c_ij m^j` is accumulated by Horner, then the outer Horner runs
    /// over `x`.
    pub fn eval(&self, m: f64, x: f64) -> f64 {
        let n = self.degree;
        let mut acc = 0.0;
        for i in (0..=n).rev() {
            let mut inner = 0.0;
            for j in (0..=n - i).rev() {
                inner = inner * m + self.coeffs[term_index(i, j)];
            }
            acc = acc * x + inner;
        }
        acc
    }

    #[inline]
    pub fn eval_at(&self, point: EvalPoint) -> f64 {
        self.eval(point.m(), point.x())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let order: Vec<_> = monomials(2).collect();
        assert_eq!(order, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (k, (i, j)) in monomials(5).enumerate() {
            assert_eq!(term_index(i, j), k);
        }
        assert_eq!(monomials(4).count(), term_count(4));
    }

    #[test]
    fn zero_polynomial() {
        let p = BivariatePoly::zero(3);
        assert!(p.is_zero());
        assert_eq!(p.eval(1.7, 42.0), 0.0);
    }

    #[test]
    fn linear_in_x() {
        let p = BivariatePoly::from_terms(1, &[(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(p.eval(-3.3, 3.0), 7.0);
        assert_eq!(p.eval(123.0, 3.0), 7.0);
    }

    #[test]
    fn table_one_numerator_at_m_zero() {
        let p = BivariatePoly::from_terms(
            1,
            &[(0, 0, 0.237276056849810), (1, 0, 0.388591025647952), (0, 1, -0.039895879080345)],
        )
        .unwrap();
        assert!((p.eval(0.0, 10.0) - 4.12318631332933).abs() < 1e-14);
    }

    #[test]
    fn matches_naive_sum() {
        let coeffs: Vec<f64> = (0..term_count(4)).map(|k| (k as f64 * 0.37).sin()).collect();
        let p = BivariatePoly::from_dense(4, coeffs).unwrap();
        let (m, x) = (-1.3f64, 7.25f64);
        let naive: f64 = p.terms().map(|(i, j, c)| c * x.powi(i as i32) * m.powi(j as i32)).sum();
        assert!((p.eval(m, x) - naive).abs() < 1e-12 * naive.abs().max(1.0));
    }

    #[test]
    fn rejects_out_of_support_terms() {
        assert!(BivariatePoly::from_terms(2, &[(2, 1, 1.0)]).is_none());
        assert!(BivariatePoly::from_dense(2, vec![0.0; 5]).is_none());
        assert_eq!(BivariatePoly::zero(2).coeff(3, 0), 0.0);
    }
}
