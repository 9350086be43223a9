//! Published approximations of `g(m, x)` used as baselines.
//!
//! Every formula is transcribed with exactly the printed constants. Each
//! model is evaluated in scaled form, `e^x x^(m+2) g_model(m, x)`, which is
//! what the deviation `g_model/g - 1` needs; [`eval_model`] multiplies the
//! prefactor back in.
//!
//! | tag | m-domain | form |
//! |-----|----------|------|
//! | `J`, `O`, `SY` | `m = 0` | rational in `x` (J also uses `ln x`) |
//! | `G`, `W1`, `C1`–`C3`, `Ch3`, `Ch4`, `Cs`, `L`, `Cp`, `Ch1` | any | prefactor × ratio |
//! | `W2`, `Ch2` | any | exponential-power, evaluated in log space |
//! | `X` | `m ∈ {−1, −0.5, 0, 0.5, 1, 2}` | tabulated numerator |
//! | `G1`–`G4` | any | bundled minimax approximants |

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::coeff;
use crate::point::EvalPoint;
use crate::rational::{RationalApproximant, RationalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model {model} is not defined at m = {m}; allowed m: {allowed}")]
    Domain { model: ModelId, m: f64, allowed: String },
    #[error("model {model}: {source}")]
    Eval { model: ModelId, source: RationalError },
    #[error("model {model} returned a non-finite value at {point}")]
    NonFinite { model: ModelId, point: EvalPoint },
    #[error("unknown model tag `{0}`; valid tags: {tags}", tags = valid_tags())]
    UnknownTag(String),
}

fn valid_tags() -> String {
    ModelId::ALL.iter().map(|m| m.tag()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    J,
    O,
    SY,
    /// `SY` with the misquoted 88 in place of 86. Not part of [`ModelId::ALL`].
    SY88,
    G,
    W1,
    W2,
    C1,
    C2,
    C3,
    Ch1,
    Ch2,
    Ch3,
    Ch4,
    Cp,
    X,
    Cs,
    L,
    G1,
    G2,
    G3,
    G4,
}

/// Which values of `m` a model accepts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MDomain {
    Any,
    /// Only `m = 0`.
    Arrhenius,
    /// Only the listed values.
    Tabulated(&'static [f64]),
}

impl MDomain {
    pub fn admits(&self, m: f64) -> bool {
        match self {
            MDomain::Any => true,
            MDomain::Arrhenius => m == 0.0,
            MDomain::Tabulated(ms) => ms.iter().any(|&v| (v - m).abs() < 1e-9),
        }
    }

    /// Whether some admitted `m` lies in `[lo, hi]`.
    pub fn intersects(&self, lo: f64, hi: f64) -> bool {
        match self {
            MDomain::Any => true,
            MDomain::Arrhenius => lo <= 0.0 && 0.0 <= hi,
            MDomain::Tabulated(ms) => ms.iter().any(|&v| lo - 1e-9 <= v && v <= hi + 1e-9),
        }
    }
}

impl fmt::Display for MDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MDomain::Any => f.write_str("any"),
            MDomain::Arrhenius => f.write_str("0"),
            MDomain::Tabulated(ms) => {
                let list: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
                f.write_str(&list.join(" "))
            }
        }
    }
}

/// One row of the X model's numerator table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XCoeffRow {
    pub m: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
}

pub const X_COEFFS: [XCoeffRow; 6] = [
    XCoeffRow { m: -1.0, a3: 15.0, a2: 58.0, a1: 50.0 },
    XCoeffRow { m: -0.5, a3: 14.5, a2: 51.75, a1: 34.875 },
    XCoeffRow { m: 0.0, a3: 14.0, a2: 46.0, a1: 24.0 },
    XCoeffRow { m: 0.5, a3: 13.5, a2: 40.75, a1: 16.625 },
    XCoeffRow { m: 1.0, a3: 13.0, a2: 36.0, a1: 12.0 },
    XCoeffRow { m: 2.0, a3: 12.0, a2: 28.0, a1: 8.0 },
];

pub const X_M_VALUES: [f64; 6] = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

impl ModelId {
    /// The 21 listed models, in table order.
    pub const ALL: [ModelId; 21] = [
        ModelId::J,
        ModelId::O,
        ModelId::SY,
        ModelId::G,
        ModelId::W1,
        ModelId::W2,
        ModelId::C1,
        ModelId::C2,
        ModelId::C3,
        ModelId::Ch1,
        ModelId::Ch2,
        ModelId::Ch3,
        ModelId::Ch4,
        ModelId::Cp,
        ModelId::X,
        ModelId::Cs,
        ModelId::L,
        ModelId::G1,
        ModelId::G2,
        ModelId::G3,
        ModelId::G4,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            ModelId::J => "J",
            ModelId::O => "O",
            ModelId::SY => "SY",
            ModelId::SY88 => "SY88",
            ModelId::G => "G",
            ModelId::W1 => "W1",
            ModelId::W2 => "W2",
            ModelId::C1 => "C1",
            ModelId::C2 => "C2",
            ModelId::C3 => "C3",
            ModelId::Ch1 => "Ch1",
            ModelId::Ch2 => "Ch2",
            ModelId::Ch3 => "Ch3",
            ModelId::Ch4 => "Ch4",
            ModelId::Cp => "Cp",
            ModelId::X => "X",
            ModelId::Cs => "Cs",
            ModelId::L => "L",
            ModelId::G1 => "G1",
            ModelId::G2 => "G2",
            ModelId::G3 => "G3",
            ModelId::G4 => "G4",
        }
    }

    pub fn citation(&self) -> &'static str {
        match self {
            ModelId::J => "Ji",
            ModelId::O => "Orfao",
            ModelId::SY | ModelId::SY88 => "Senum1977",
            ModelId::G => "Gorbachev",
            ModelId::W1 => "Wanjun2005",
            ModelId::W2 => "Wanjun2009",
            ModelId::C1 => "Cai2007-1",
            ModelId::C2 => "Cai2007-2",
            ModelId::C3 => "Cai2008",
            ModelId::Ch1 => "Chen2007",
            ModelId::Ch2 => "Chen2009-1",
            ModelId::Ch3 | ModelId::Ch4 => "Chen2009-2",
            ModelId::Cp => "Capela",
            ModelId::X => "Xia",
            ModelId::Cs => "Casal",
            ModelId::L => "Lei",
            ModelId::G1 => "bundled:g1",
            ModelId::G2 => "bundled:g2",
            ModelId::G3 => "bundled:g3",
            ModelId::G4 => "bundled:g4",
        }
    }

    pub fn domain(&self) -> MDomain {
        match self {
            ModelId::J | ModelId::O | ModelId::SY | ModelId::SY88 => MDomain::Arrhenius,
            ModelId::X => MDomain::Tabulated(&X_M_VALUES),
            _ => MDomain::Any,
        }
    }

    /// True for the `m = 0`-only models.
    pub fn is_univariate(&self) -> bool {
        self.domain() == MDomain::Arrhenius
    }

    /// The bundled approximant behind `G1`–`G4`.
    pub fn bundled_degree(&self) -> Option<usize> {
        match self {
            ModelId::G1 => Some(1),
            ModelId::G2 => Some(2),
            ModelId::G3 => Some(3),
            ModelId::G4 => Some(4),
            _ => None,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ModelId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        ModelId::ALL
            .iter()
            .chain(std::iter::once(&ModelId::SY88))
            .find(|m| m.tag().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| ModelError::UnknownTag(s.to_owned()))
    }
}

fn bundled_approximant(n: usize) -> &'static RationalApproximant {
    static CELLS: [OnceLock<RationalApproximant>; 4] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CELLS[n - 1].get_or_init(|| coeff::bundled(n))
}

fn x_row(m: f64) -> Option<&'static XCoeffRow> {
    X_COEFFS.iter().find(|r| (r.m - m).abs() < 1e-9)
}

/// `e^x x^(m+2) g_model(m, x)`.
pub fn eval_model_h(id: ModelId, point: EvalPoint) -> Result<f64, ModelError> {
    let (m, x) = (point.m(), point.x());
    if !id.domain().admits(m) {
        return Err(ModelError::Domain { model: id, m, allowed: id.domain().to_string() });
    }
    let s = m + 2.0;
    let ln = x.ln();
    let value = match id {
        ModelId::J => {
            (x * x + 16.99864 * x + 3.65517 * ln + 5.41337) / (x * x + 18.99977 * x + 3.43593 * ln + 38.49858)
        }
        ModelId::O => {
            (((0.9999936 * x + 7.5739391) * x + 12.4648922) * x + 3.6907232) * x
                / ((((x + 9.5733223) * x + 25.6329561) * x + 21.0996531) * x + 3.9584969)
        }
        ModelId::SY | ModelId::SY88 => {
            let c2 = if id == ModelId::SY { 86.0 } else { 88.0 };
            (((x + 18.0) * x + c2) * x + 96.0) * x / ((((x + 20.0) * x + 120.0) * x + 240.0) * x + 120.0)
        }
        ModelId::G => 1.0 / (1.0 + s / x),
        ModelId::W1 => 1.0 / (1.0 + s * (0.00099441 + 0.93695599 / x)),
        ModelId::W2 => (-0.18887 * s - (1.00145 + 0.00069 * m) * x - 0.94733 * s * ln + x + s * ln).exp(),
        ModelId::C1 => (0.99954 * x - 0.044967 * m + 0.58058) / (x + 0.94057 * m + 2.5400),
        ModelId::C2 => {
            (1.0002486 * x + 0.2228027 * ln - 0.05241956 * m + 0.2975711)
                / (x + 0.2333376 * ln + 0.9496628 * m + 2.2781591)
        }
        ModelId::C3 => (x - 0.054182 * m + 0.65061) / (x + 0.93544 * m + 2.62993),
        ModelId::Ch1 => {
            let num = x.powi(4) + 3.0 * s * x.powi(3) + (3.0 * m + 1.0) * s * x * x + m * (m - 1.0) * s * x;
            let den = x.powi(4)
                + 4.0 * s * x.powi(3)
                + 6.0 * (m + 1.0) * s * x * x
                + 4.0 * m * (m + 1.0) * s * x
                + (m - 1.0) * m * (m + 1.0) * s;
            num / den
        }
        ModelId::Ch2 => {
            (-(0.16656 * m + 0.39329) - (1.00147 + 0.00057 * m) * x - (1.89021 + 0.95479 * m) * ln + x + s * ln).exp()
        }
        ModelId::Ch3 => x / ((1.00141 + 0.0006 * m) * x + (1.89376 + 0.95276 * m)),
        ModelId::Ch4 => (x + (0.74981 - 0.06396 * m)) / ((1.00017 + 0.00013 * m) * x + (2.73166 + 0.92246 * m)),
        ModelId::Cp => {
            let r2 = std::f64::consts::SQRT_2;
            (2.0 - r2) / 4.0 * (x / (x + 2.0 + r2)).powf(s) + (2.0 + r2) / 4.0 * (x / (x + 2.0 - r2)).powf(s)
        }
        ModelId::X => {
            let row = x_row(m).expect("domain checked above");
            (((x + row.a3) * x + row.a2) * x + row.a1) * x / ((((x + 16.0) * x + 72.0) * x + 96.0) * x + 24.0)
        }
        ModelId::Cs => (x - 0.05924479 * m + 0.62385968) / (x + 0.92755595 * m + 2.59746116),
        ModelId::L => {
            let b = x + m + 1.0;
            ((b * b + 4.0 * x).sqrt() - b) / 2.0
        }
        ModelId::G1 | ModelId::G2 | ModelId::G3 | ModelId::G4 => {
            let n = id.bundled_degree().unwrap();
            bundled_approximant(n).eval_h(point).map_err(|source| ModelError::Eval { model: id, source })?
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite { model: id, point })
    }
}

/// The model's approximation of `g(m, x)`, prefactor included.
pub fn eval_model(id: ModelId, point: EvalPoint) -> Result<f64, ModelError> {
    match id {
        // Printed without the separate prefactor; evaluate the whole
        // exponent at once.
        ModelId::W2 => {
            let (m, x) = (point.m(), point.x());
            Ok((-0.18887 * (m + 2.0) - (1.00145 + 0.00069 * m) * x - 0.94733 * (m + 2.0) * x.ln()).exp())
        }
        ModelId::Ch2 => {
            let (m, x) = (point.m(), point.x());
            Ok((-(0.16656 * m + 0.39329) - (1.00147 + 0.00057 * m) * x - (1.89021 + 0.95479 * m) * x.ln()).exp())
        }
        _ => Ok(point.prefactor() * eval_model_h(id, point)?),
    }
}

/// Metadata for the `list` command.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInfo {
    pub id: ModelId,
    pub citation: &'static str,
    pub domain: MDomain,
    pub univariate: bool,
}

/// Models whose m-domain meets `[lo, hi]`, or all 21 without a filter.
pub fn list_models(filter: Option<(f64, f64)>) -> Vec<ModelInfo> {
    ModelId::ALL
        .iter()
        .filter(|id| filter.is_none_or(|(lo, hi)| id.domain().intersects(lo, hi)))
        .map(|&id| ModelInfo { id, citation: id.citation(), domain: id.domain(), univariate: id.is_univariate() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(m: f64, x: f64) -> EvalPoint {
        EvalPoint::new(m, x).unwrap()
    }

    #[test]
    fn sy_at_twenty() {
        let x: f64 = 20.0;
        let expect = (-x).exp() / 400.0 * (x.powi(4) + 18.0 * x.powi(3) + 86.0 * x * x + 96.0 * x)
            / (x.powi(4) + 20.0 * x.powi(3) + 120.0 * x * x + 240.0 * x + 120.0);
        let got = eval_model(ModelId::SY, pt(0.0, 20.0)).unwrap();
        assert!((got / expect - 1.0).abs() < 4e-16 * 8.0);
        assert!(eval_model(ModelId::SY88, pt(0.0, 20.0)).unwrap() > got);
    }

    #[test]
    fn g_is_exact_at_minus_two() {
        assert_eq!(eval_model_h(ModelId::G, pt(-2.0, 7.0)).unwrap(), 1.0);
        let g = eval_model(ModelId::G, pt(-2.0, 7.0)).unwrap();
        assert!((g / (-7.0f64).exp() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_model_identity() {
        for &(m, x) in &[(-3.5, 4.0), (0.0, 12.0), (2.7, 80.0)] {
            let a = eval_model(ModelId::G, pt(m, x)).unwrap();
            let b = (-x).exp() / x.powf(m + 2.0) * x / (x + m + 2.0);
            assert!((a / b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let err = eval_model(ModelId::X, pt(0.3, 10.0)).unwrap_err();
        assert!(matches!(err, ModelError::Domain { model: ModelId::X, .. }));
        assert!(err.to_string().contains("-0.5"));
        for id in [ModelId::J, ModelId::O, ModelId::SY] {
            assert!(eval_model(id, pt(1.0, 10.0)).is_err());
            assert!(eval_model(id, pt(0.0, 10.0)).is_ok());
        }
        assert!(eval_model(ModelId::X, pt(-0.5, 10.0)).is_ok());
    }

    #[test]
    fn cp_weights_and_exactness() {
        let r2 = std::f64::consts::SQRT_2;
        assert!(((2.0 - r2) / 4.0 + (2.0 + r2) / 4.0 - 1.0).abs() < 1e-16);
        let h = eval_model_h(ModelId::Cp, pt(-2.0, 9.0)).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ch1_reduces_at_m_zero() {
        for x in [4.0, 17.5, 100.0] {
            let h = eval_model_h(ModelId::Ch1, pt(0.0, x)).unwrap();
            let reduced = (x * x + 6.0 * x + 2.0) / (x * x + 8.0 * x + 12.0);
            assert!((h / reduced - 1.0).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn x_reduces_at_m_zero() {
        for x in [4.0, 30.0] {
            let h = eval_model_h(ModelId::X, pt(0.0, x)).unwrap();
            let direct = (x.powi(4) + 14.0 * x.powi(3) + 46.0 * x * x + 24.0 * x)
                / (x.powi(4) + 16.0 * x.powi(3) + 72.0 * x * x + 96.0 * x + 24.0);
            assert!((h / direct - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn log_space_forms_match_scaled_forms() {
        for id in [ModelId::W2, ModelId::Ch2] {
            for &(m, x) in &[(-4.0, 4.0), (0.0, 50.0), (4.0, 100.0)] {
                let p = pt(m, x);
                let g = eval_model(id, p).unwrap();
                let via_h = p.prefactor() * eval_model_h(id, p).unwrap();
                assert!(g > 0.0 && (g / via_h - 1.0).abs() < 1e-12, "{id} {m} {x}");
            }
        }
    }

    #[test]
    fn bundled_aliases() {
        let h = eval_model_h(ModelId::G1, pt(0.0, 10.0)).unwrap();
        let expect = (0.237276056849810 + 3.88591025647952) / (1.0 + 3.86946448530584);
        assert!((h / expect - 1.0).abs() < 1e-15);
    }

    #[test]
    fn listing() {
        assert_eq!(list_models(None).len(), 21);
        assert_eq!(list_models(Some((0.0, 0.0))).len(), 21);
        let at3: Vec<ModelId> = list_models(Some((3.0, 3.0))).iter().map(|i| i.id).collect();
        assert_eq!(at3.len(), 17);
        for id in [ModelId::J, ModelId::O, ModelId::SY, ModelId::X] {
            assert!(!at3.contains(&id));
        }
        assert!(list_models(None).iter().filter(|i| i.univariate).count() == 3);
    }

    #[test]
    fn tags_parse() {
        for id in ModelId::ALL {
            assert_eq!(id.tag().parse::<ModelId>().unwrap(), id);
        }
        assert_eq!("sy88".parse::<ModelId>().unwrap(), ModelId::SY88);
        let err = "Q".parse::<ModelId>().unwrap_err();
        assert!(err.to_string().contains("Ch4"));
    }
}
