//! Plain-text coefficient files.
//!
//! ```text
//! # optional comment lines
//! degree 2
//! a 0 0 0.091419664846862
//! a 1 0 0.592563087097409
//! …
//! b 0 2 0.092119571681669
//! ```
//!
//! One `degree n` header, then one `a i j value` (numerator) or `b i j value`
//! (denominator) line per monomial `x^i m^j`, every pair with `i + j <= n`
//! present exactly once for both polynomials. Lines are written in graded
//! order, numerator first. Values use 15 significant digits whenever that
//! reproduces the stored double exactly, otherwise the shortest round-trip
//! representation, so `load(save(r)) == r` bit for bit.

use std::fmt::Write as _;
use std::path::Path;
use std::{fs, io};

use thiserror::Error;

use crate::poly::{term_count, term_index, BivariatePoly};
use crate::rational::{RationalApproximant, RationalError};

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing coefficient {poly} {i} {j}")]
    Missing { poly: char, i: usize, j: usize },
    #[error("invalid approximant: {0}")]
    Invalid(#[from] RationalError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> CoeffError {
    CoeffError::Parse { line, msg: msg.into() }
}

/// Formats `v` with 15 significant digits if that round-trips, else with the
/// shortest exact representation.
pub fn format_coeff(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let exp = v.abs().log10().floor() as i32;
    let fifteen = if (-6..15).contains(&exp) { format!("{:.*}", (14 - exp) as usize, v) } else { format!("{v:.14e}") };
    if fifteen.parse::<f64>().ok() == Some(v) {
        fifteen
    } else {
        format!("{v:e}")
    }
}

/// Serializes `r` in the coefficient-file format.
pub fn save_coeffs(r: &RationalApproximant) -> String {
    let mut out = String::new();
    writeln!(out, "degree {}", r.degree()).unwrap();
    for (tag, poly) in [('a', r.numer()), ('b', r.denom())] {
        for (i, j, c) in poly.terms() {
            writeln!(out, "{tag} {i} {j} {}", format_coeff(c)).unwrap();
        }
    }
    out
}

/// Parses a coefficient file.
pub fn load_coeffs(text: &str) -> Result<RationalApproximant, CoeffError> {
    let mut degree: Option<usize> = None;
    let mut slots: [Vec<Option<f64>>; 2] = [Vec::new(), Vec::new()];

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();

        let Some(n) = degree else {
            match fields.as_slice() {
                ["degree", n] => {
                    let n: usize = n.parse().map_err(|_| parse_err(line_no, format!("bad degree `{n}`")))?;
                    degree = Some(n);
                    slots = [vec![None; term_count(n)], vec![None; term_count(n)]];
                    continue;
                }
                _ => return Err(parse_err(line_no, "expected `degree n` header")),
            }
        };

        let [tag, i, j, value] = fields.as_slice() else {
            return Err(parse_err(line_no, "expected `a|b i j value`"));
        };
        let which = match *tag {
            "a" => 0,
            "b" => 1,
            other => return Err(parse_err(line_no, format!("unknown polynomial tag `{other}`"))),
        };
        let i: usize = i.parse().map_err(|_| parse_err(line_no, format!("bad index `{i}`")))?;
        let j: usize = j.parse().map_err(|_| parse_err(line_no, format!("bad index `{j}`")))?;
        if i + j > n {
            return Err(parse_err(line_no, format!("term ({i}, {j}) exceeds degree {n}")));
        }
        let value: f64 = value.parse().map_err(|_| parse_err(line_no, format!("bad value `{value}`")))?;
        if !value.is_finite() {
            return Err(parse_err(line_no, "coefficient is not finite"));
        }
        let slot = &mut slots[which][term_index(i, j)];
        if slot.is_some() {
            return Err(parse_err(line_no, format!("duplicate coefficient {tag} {i} {j}")));
        }
        *slot = Some(value);
    }

    let n = degree.ok_or_else(|| parse_err(text.lines().count().max(1), "missing header"))?;
    let mut polys = Vec::with_capacity(2);
    for (which, tag) in [(0, 'a'), (1, 'b')] {
        let mut dense = Vec::with_capacity(term_count(n));
        for ((i, j), v) in crate::poly::monomials(n).zip(&slots[which]) {
            dense.push(v.ok_or(CoeffError::Missing { poly: tag, i, j })?);
        }
        polys.push(BivariatePoly::from_dense(n, dense).expect("dense length matches degree"));
    }
    let denom = polys.pop().unwrap();
    let numer = polys.pop().unwrap();
    Ok(RationalApproximant::new(numer, denom)?)
}

pub fn read_coeff_file(path: impl AsRef<Path>) -> Result<RationalApproximant, CoeffError> {
    load_coeffs(&fs::read_to_string(path)?)
}

pub fn write_coeff_file(path: impl AsRef<Path>, r: &RationalApproximant) -> io::Result<()> {
    fs::write(path, save_coeffs(r))
}

const BUNDLED: [&str; 4] = [
    include_str!("../data/g1.coeff"),
    include_str!("../data/g2.coeff"),
    include_str!("../data/g3.coeff"),
    include_str!("../data/g4.coeff"),
];

/// Source text of the bundled published approximant of degree `n` (1 to 4).
pub fn bundled_source(n: usize) -> Option<&'static str> {
    BUNDLED.get(n.checked_sub(1)?).copied()
}

/// The bundled published approximant `g_n`, `n` in `1..=4`.
///
/// # Panics
///
/// If `n` is outside `1..=4`.
pub fn bundled(n: usize) -> RationalApproximant {
    let src = bundled_source(n).unwrap_or_else(|| panic!("no bundled approximant of degree {n}"));
    load_coeffs(src).expect("bundled coefficient files are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixtures_load() {
        for n in 1..=4 {
            let r = bundled(n);
            assert_eq!(r.degree(), n);
        }
        assert_eq!(bundled(1).numer().coeff(0, 1), -0.039895879080345);
        assert_eq!(bundled(4).denom().coeff(0, 0), 1e-5);
        assert_eq!(bundled(2).numer().coeff(1, 1), 0.089269674860906);
        assert!(bundled_source(0).is_none());
        assert!(bundled_source(5).is_none());
    }

    #[test]
    fn degree_two_round_trip() {
        let r = bundled(2);
        let text = save_coeffs(&r);
        let back = load_coeffs(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.numer().coeffs().len() + back.denom().coeffs().len(), 12);
        assert!(text.contains("a 0 0 0.0914196648468620\n"));
    }

    #[test]
    fn fifteen_digits_when_exact() {
        assert_eq!(format_coeff(0.237276056849810), "0.237276056849810");
        assert_eq!(format_coeff(1.0), "1.00000000000000");
        assert_eq!(format_coeff(1e-5), "0.0000100000000000000");
        assert_eq!(format_coeff(0.0), "0");
        // Needs 17 digits.
        let v = 0.1 + 0.2;
        assert_eq!(format_coeff(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn rejects_out_of_support_term() {
        let err = load_coeffs("degree 1\na 1 1 0.5\n").unwrap_err();
        match err {
            CoeffError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("exceeds degree"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(load_coeffs(""), Err(CoeffError::Parse { .. })));
        assert!(matches!(load_coeffs("a 0 0 1\n"), Err(CoeffError::Parse { line: 1, .. })));
        assert!(matches!(load_coeffs("degree x\n"), Err(CoeffError::Parse { .. })));
        assert!(matches!(load_coeffs("degree 0\na 0 0 1\na 0 0 2\nb 0 0 1\n"), Err(CoeffError::Parse { line: 3, .. })));
        assert!(matches!(
            load_coeffs("degree 1\na 0 0 1\na 1 0 1\na 0 1 1\nb 0 0 1\n"),
            Err(CoeffError::Missing { poly: 'b', i: 1, j: 0 })
        ));
        assert!(matches!(
            load_coeffs("degree 0\na 0 0 1\nb 0 0 0\n"),
            Err(CoeffError::Invalid(RationalError::ZeroDenominator))
        ));
        assert!(matches!(load_coeffs("degree 0\nc 0 0 1\n"), Err(CoeffError::Parse { line: 2, .. })));
    }
}
