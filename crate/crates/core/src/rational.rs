//! Rational approximants `g_n(m, x) = e^(-x)/x^(m+2) · p(m, x)/q(m, x)`.

use thiserror::Error;

use crate::point::EvalPoint;
use crate::poly::BivariatePoly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalError {
    #[error("numerator degree {numer} differs from denominator degree {denom}")]
    DegreeMismatch { numer: usize, denom: usize },
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("denominator vanishes at {point}")]
    Pole { point: EvalPoint },
    #[error("denominator changes sign between {from} and {to}")]
    SignChange { from: EvalPoint, to: EvalPoint },
}

/// A ratio of two bivariate polynomials of equal total degree, approximating
/// the scaled target `h(m, x)`; multiplied by `e^(-x)/x^(m+2)` it
/// approximates `g(m, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalApproximant {
    numer: BivariatePoly,
    denom: BivariatePoly,
}

impl RationalApproximant {
    pub fn new(numer: BivariatePoly, denom: BivariatePoly) -> Result<Self, RationalError> {
        if numer.degree() != denom.degree() {
            return Err(RationalError::DegreeMismatch { numer: numer.degree(), denom: denom.degree() });
        }
        if denom.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Self { numer, denom })
    }

    pub fn degree(&self) -> usize {
        self.numer.degree()
    }

    pub fn numer(&self) -> &BivariatePoly {
        &self.numer
    }

    pub fn denom(&self) -> &BivariatePoly {
        &self.denom
    }

    /// `p/q`, the approximation to `h(m, x)`.
    pub fn eval_h(&self, point: EvalPoint) -> Result<f64, RationalError> {
        let q = self.denom.eval_at(point);
        if q == 0.0 || !q.is_finite() {
            return Err(RationalError::Pole { point });
        }
        Ok(self.numer.eval_at(point) / q)
    }

    /// The full approximant of `g(m, x)`. The prefactor is formed in log
    /// space, so large `x` underflows to zero instead of producing `inf/inf`.
    pub fn eval_g(&self, point: EvalPoint) -> Result<f64, RationalError> {
        let r = self.eval_h(point)?;
        Ok(point.prefactor() * r)
    }

    /// Minimum of the denominator over `points`, or a sign-change error if
    /// two points disagree in sign. Zero counts as a pole.
    pub fn denominator_scan<I>(&self, points: I) -> Result<f64, RationalError>
    where
        I: IntoIterator<Item = EvalPoint>,
    {
        let mut first: Option<(EvalPoint, f64)> = None;
        let mut min = f64::INFINITY;
        for p in points {
            let q = self.denom.eval_at(p);
            if q == 0.0 || !q.is_finite() {
                return Err(RationalError::Pole { point: p });
            }
            match first {
                None => first = Some((p, q)),
                Some((p0, q0)) if q0.signum() != q.signum() => {
                    return Err(RationalError::SignChange { from: p0, to: p });
                }
                _ => {}
            }
            min = min.min(q);
        }
        Ok(min)
    }

    /// Multiplies both polynomials by `factor`; the ratio is unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { numer: self.numer.scaled(factor), denom: self.denom.scaled(factor) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::term_count;

    fn pt(m: f64, x: f64) -> EvalPoint {
        EvalPoint::new(m, x).unwrap()
    }

    #[test]
    fn identity_ratio() {
        let p = BivariatePoly::from_dense(2, vec![1.0, 0.5, 0.25, 0.1, 0.2, 0.3]).unwrap();
        let r = RationalApproximant::new(p.clone(), p).unwrap();
        for &(m, x) in &[(0.0, 4.0), (-3.5, 80.0), (2.2, 17.0)] {
            assert_eq!(r.eval_h(pt(m, x)).unwrap(), 1.0);
        }
        assert_eq!(r.eval_g(pt(-2.0, 5.0)).unwrap(), (-5.0f64).exp());
    }

    #[test]
    fn construction_errors() {
        let a = BivariatePoly::zero(1);
        let b = BivariatePoly::from_dense(2, vec![1.0; term_count(2)]).unwrap();
        assert!(matches!(RationalApproximant::new(a.clone(), b), Err(RationalError::DegreeMismatch { .. })));
        assert_eq!(RationalApproximant::new(a.clone(), a), Err(RationalError::ZeroDenominator));
    }

    #[test]
    fn pole_and_sign_change() {
        // q = x - 10
        let numer = BivariatePoly::from_terms(1, &[(0, 0, 1.0)]).unwrap();
        let denom = BivariatePoly::from_terms(1, &[(0, 0, -10.0), (1, 0, 1.0)]).unwrap();
        let r = RationalApproximant::new(numer, denom).unwrap();
        assert!(matches!(r.eval_h(pt(0.0, 10.0)), Err(RationalError::Pole { .. })));
        let pts = [pt(0.0, 5.0), pt(0.0, 15.0)];
        assert!(matches!(r.denominator_scan(pts), Err(RationalError::SignChange { .. })));
        assert_eq!(r.denominator_scan([pt(0.0, 12.0), pt(0.0, 20.0)]).unwrap(), 2.0);
    }

    #[test]
    fn huge_x_underflows_to_zero() {
        let one = BivariatePoly::from_terms(1, &[(0, 0, 1.0)]).unwrap();
        let r = RationalApproximant::new(one.clone(), one).unwrap();
        assert_eq!(r.eval_g(pt(4.0, 1e4)).unwrap(), 0.0);
    }
}
