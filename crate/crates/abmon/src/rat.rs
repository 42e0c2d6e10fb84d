//! Exact rational time constants.
//!
//! All user-facing constants (guard bounds, observation interval endpoints,
//! query times) are rationals written as `"7"` or `"p/q"` with `q > 0`. The
//! engine itself works on integers after a session-wide scaling step; this
//! module holds the shared parsing, formatting and denominator arithmetic.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rational = Ratio<i64>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RationalError {
    #[error("malformed rational `{0}`: expected an integer or `p/q`")]
    Malformed(String),
    #[error("malformed rational `{0}`: denominator must be positive")]
    BadDenominator(String),
}

/// Parses `"n"` or `"p/q"` with `q > 0`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let text = text.trim();
    match text.split_once('/') {
        None => text
            .parse::<i64>()
            .map(Rational::from_integer)
            .map_err(|_| RationalError::Malformed(text.to_string())),
        Some((p, q)) => {
            let p: i64 = p
                .trim()
                .parse()
                .map_err(|_| RationalError::Malformed(text.to_string()))?;
            let q: i64 = q
                .trim()
                .parse()
                .map_err(|_| RationalError::Malformed(text.to_string()))?;
            if q <= 0 {
                return Err(RationalError::BadDenominator(text.to_string()));
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Formats in the same syntax `parse_rational` accepts.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of the denominators, i.e. the smallest positive
/// integer s such that s * r is an integer for every r.
pub fn common_scale<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values
        .into_iter()
        .fold(1i64, |acc, r| acc.lcm(r.denom()))
}

/// r * scale, which the caller guarantees to be integral.
///
/// Panics if it is not; scale mismatches are caught before this point by the
/// session setup (file mode) or the stream parser (stdin mode).
pub fn scaled_int(r: Rational, scale: i64) -> i64 {
    let s = r * Rational::from_integer(scale);
    assert!(
        s.is_integer(),
        "constant {} not integral at scale {}",
        format_rational(r),
        scale
    );
    *s.numer()
}

/// Whether r * scale is an integer.
pub fn representable(r: Rational, scale: i64) -> bool {
    (r * Rational::from_integer(scale)).is_integer()
}

/// True iff r is a nonnegative multiple of the grid step.
pub fn on_grid(r: Rational, step: Rational) -> bool {
    !r.is_negative() && (r / step).is_integer()
}

/// Nonnegative grid points of `step` spacing inside [lo, hi].
pub fn grid_points(lo: Rational, hi: Rational, step: Rational) -> Vec<Rational> {
    assert!(step > Rational::zero());
    let mut out = Vec::new();
    let lo = if lo.is_negative() { Rational::zero() } else { lo };
    // First multiple of step that is >= lo.
    let q = lo / step;
    let mut k = *q.floor().numer();
    if Rational::from_integer(k) * step < lo {
        k += 1;
    }
    loop {
        let p = Rational::from_integer(k) * step;
        if p > hi {
            break;
        }
        out.push(p);
        k += 1;
    }
    out
}
