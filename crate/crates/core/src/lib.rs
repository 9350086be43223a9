//! The general temperature integral `g(m, x) = ∫_x^∞ t^(-m-2) e^(-t) dt`.
//!
//! - [`oracle`]: reference values by continued fraction, checked by quadrature.
//! - [`rational`], [`poly`], [`coeff`]: bivariate rational approximants and
//!   their file format.
//! - [`fit`]: minimax fitting by bisection over linear feasibility problems.
//! - [`models`]: approximations from the literature.
//! - [`harness`], [`tables`]: deviation reports and the reference tables.
//! - [`cli`]: the `tempint` binary.
//!
//! ```
//! use tempint::coeff::bundled;
//! use tempint::oracle::{h, OracleConfig};
//! use tempint::point::EvalPoint;
//!
//! let p = EvalPoint::new(0.5, 12.0).unwrap();
//! let exact = h(p, &OracleConfig::default()).unwrap();
//! let approx = bundled(4).eval_h(p).unwrap();
//! assert!((approx / exact - 1.0).abs() < 1e-6);
//! ```

pub mod cli;
pub mod coeff;
pub mod fit;
pub mod grid;
pub mod harness;
pub mod models;
pub mod oracle;
pub mod point;
pub mod poly;
pub mod rational;
pub mod tables;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/approximants.md")]
    mod approximants {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    mod fitting {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
