//! Exact currency arithmetic.
//!
//! All valuations, payments and rewards are `BigRational`. Mechanism code
//! never rounds; decimal strings exist only for display.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact monetary amount.
pub type Money = BigRational;

/// Integer amount.
pub fn int(n: i64) -> Money {
    Money::from_integer(BigInt::from(n))
}

/// Exact fraction `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Money {
    Money::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Money {
    Money::zero()
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_money(s: &str) -> Result<Money> {
    let bad = |reason: &str| Error::BadRational {
        literal: s.to_string(),
        reason: reason.to_string(),
    };
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("empty string"));
    }
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad("not an integer"))?;
            Ok(Money::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
            let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Money::new(n, d))
        }
    }
}

/// Renders as `"p"` for integers, `"p/q"` otherwise.
pub fn format_money(m: &Money) -> String {
    if m.is_integer() {
        m.numer().to_string()
    } else {
        format!("{}/{}", m.numer(), m.denom())
    }
}

/// Decimal rendering with `places` fractional digits, rounding half away
/// from zero. `2/7` with two places gives `"0.29"`.
pub fn to_decimal_string(m: &Money, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = m * Money::from_integer(scale.clone());
    // round half away from zero: floor((2|n| + d) / 2d), then re-sign
    let two = BigInt::from(2);
    let n_abs = scaled.numer().abs();
    let d = scaled.denom().clone();
    let q = (&two * n_abs + &d) / (two * &d);
    let sign = if scaled.is_negative() && !q.is_zero() {
        "-"
    } else {
        ""
    };
    let whole = &q / &scale;
    let frac = &q % &scale;
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0>width$}", width = places as usize)
    }
}

/// A top-bid value: the maximum over a possibly empty bid set.
///
/// `NegInf` is the empty maximum; it only participates in comparisons.
/// Payment formulas convert it to zero via [`Bid::or_zero`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bid {
    NegInf,
    Val(Money),
}

impl Bid {
    pub fn or_zero(self) -> Money {
        match self {
            Bid::NegInf => zero(),
            Bid::Val(v) => v,
        }
    }

    pub fn value(&self) -> Option<&Money> {
        match self {
            Bid::NegInf => None,
            Bid::Val(v) => Some(v),
        }
    }
}
