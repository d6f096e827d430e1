//! Exact rational thresholds.
//!
//! Every verdict in the crate reduces to comparisons of the form
//! `count < eps * total`, evaluated by integer cross-multiplication.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// `count < frac * total`, exactly.
#[inline]
pub fn lt_frac(count: usize, frac: Rational, total: usize) -> bool {
    (count as i128) * (*frac.denom() as i128) < (*frac.numer() as i128) * (total as i128)
}

/// `count >= frac * total`, exactly.
#[inline]
pub fn ge_frac(count: usize, frac: Rational, total: usize) -> bool {
    !lt_frac(count, frac, total)
}

/// Parse `"1/5"`, `"0.2"` or `"3"` into an exact rational. Decimal input is
/// converted digit by digit, never through floating point.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = int
            .abs()
            .checked_mul(den)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(bad)?;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, den));
    }
    let v: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(v))
}

/// Decimal rendering for reports.
pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `sqrt(radicand)`, kept symbolic so that comparisons stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SqrtRational {
    pub radicand: Rational,
}

impl SqrtRational {
    pub fn new(radicand: Rational) -> Self {
        debug_assert!(!radicand.is_negative());
        SqrtRational { radicand }
    }

    /// The threshold `eps` itself, as `sqrt(eps^2)`.
    pub fn of_rational(eps: Rational) -> Self {
        SqrtRational::new(eps * eps)
    }

    /// `x < sqrt(r)`.
    pub fn exceeds(&self, x: Rational) -> bool {
        x.is_negative() || x * x < self.radicand
    }

    /// `count >= sqrt(r) * total`.
    pub fn count_reaches(&self, count: usize, total: usize) -> bool {
        let c = Rational::from_integer(count as i64);
        let t = Rational::from_integer(total as i64);
        c * c >= self.radicand * t * t
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(self.radicand).sqrt()
    }

    /// The exact value when the radicand is a perfect rational square.
    pub fn exact(&self) -> Option<Rational> {
        let n = isqrt(*self.radicand.numer())?;
        let d = isqrt(*self.radicand.denom())?;
        Some(Rational::new(n, d))
    }
}

fn isqrt(v: i64) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    (r * r == v).then_some(r)
}

/// Check `0 < eps < 1/2`.
pub fn check_epsilon(eps: Rational) -> Result<()> {
    if eps <= Rational::zero() || eps * 2 >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must satisfy 0 < epsilon < 1/2, got {eps}"
        )));
    }
    Ok(())
}

/// JSON form of a rational: numerator, denominator and a decimal rendering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalRepr {
    pub num: i64,
    pub den: i64,
    pub decimal: String,
}

impl From<Rational> for RationalRepr {
    fn from(r: Rational) -> Self {
        RationalRepr {
            num: *r.numer(),
            den: *r.denom(),
            decimal: format!("{:.6}", to_f64(r)),
        }
    }
}

/// `serialize_with` helper rendering a [`Rational`] as a [`RationalRepr`].
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    RationalRepr::from(*r).serialize(s)
}
