//! Numeric abstraction shared by the game engine, the strategies and the
//! oracles.
//!
//! Everything that manipulates amounts of protection or fire is written
//! against [`Scalar`], so the same code runs on exact rationals (the
//! default, see [`crate::Rational`]) and on `f64`/`f32` for quick
//! exploratory runs.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A field-like number type usable for protection amounts, burnt fractions,
/// prefix sums and ratios.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic is exact. Exact scalars compare with zero tolerance.
    fn is_exact() -> bool;

    /// Slack used by comparisons on inexact types.
    fn tolerance() -> Self;

    fn floor(&self) -> Self;

    fn ceil(&self) -> Self;

    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn is_integral(&self) -> bool {
        let f = self.floor();
        let diff = self.clone() - f;
        diff.abs() <= Self::tolerance()
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("every u64 is representable")
    }

    /// `floor(self)` as an unsigned count, `None` when negative or too large.
    fn floor_count(&self) -> Option<u64> {
        if self.is_negative() {
            return None;
        }
        let f = self.floor();
        let f = if Self::is_exact() { f } else { (self.clone() + Self::tolerance()).floor() };
        let v = f.to_f64();
        if v >= u64::MAX as f64 {
            return None;
        }
        // exact path avoids the f64 detour for large integers
        Self::integral_to_u64(&f).or(Some(v as u64))
    }

    /// Integer conversion hook for exact types; inexact types return `None`.
    fn integral_to_u64(_value: &Self) -> Option<u64> {
        None
    }
}

/// `a <= b` up to the scalar tolerance.
pub fn le<S: Scalar>(a: &S, b: &S) -> bool {
    a.clone() <= b.clone() + S::tolerance()
}

/// `a < b` beyond the scalar tolerance.
pub fn lt<S: Scalar>(a: &S, b: &S) -> bool {
    a.clone() + S::tolerance() < b.clone()
}

pub fn is_zero<S: Scalar>(a: &S) -> bool {
    a.abs() <= S::tolerance()
}

pub fn is_positive<S: Scalar>(a: &S) -> bool {
    a.clone() > S::tolerance()
}

pub fn max<S: Scalar>(a: S, b: S) -> S {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min<S: Scalar>(a: S, b: S) -> S {
    if a <= b {
        a
    } else {
        b
    }
}

/// Decides `p / q >= 1/φ` for non-negative `p`, `q` without touching φ:
/// the inequality is equivalent to `p² + pq − q² >= 0`.
pub fn at_least_inverse_phi<S: Scalar>(p: &S, q: &S) -> bool {
    let lhs = p.clone() * p.clone() + p.clone() * q.clone() - q.clone() * q.clone();
    !lt(&lhs, &S::zero())
}

/// Integer form of [`at_least_inverse_phi`], used on subtree weights.
pub fn weights_at_least_inverse_phi(p: u64, q: u64) -> bool {
    let (p, q) = (p as i128, q as i128);
    p * p + p * q - q * q >= 0
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn is_exact() -> bool {
                false
            }
            fn tolerance() -> Self {
                $tol
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn ceil(&self) -> Self {
                <$t>::ceil(*self)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    fn is_exact() -> bool {
        true
    }
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator or denominator beyond f64 range: drop low bits of both
            let bits = self.numer().bits().max(self.denom().bits());
            let shift = bits.saturating_sub(1000) as usize;
            let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
    fn integral_to_u64(value: &Self) -> Option<u64> {
        value.to_integer().to_u64()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as an exact rational")]
pub struct ParseRationalError {
    pub input: String,
}

/// Renders a rational as `"num/den"`, always with an explicit denominator.
pub fn fraction_string(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"1.25"` exactly.
pub fn parse_rational(input: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError { input: input.to_string() };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str_radix(n.trim(), 10).map_err(|_| err())?;
        let d = BigInt::from_str_radix(d.trim(), 10).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str_radix(int, 10).map_err(|_| err())?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let frac_part = BigInt::from_str_radix(frac, 10).map_err(|_| err())?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(numer, scale));
    }
    let n = BigInt::from_str_radix(s, 10).map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// Converts any scalar to a rational for reporting. Exact for rationals,
/// a best-effort decimal expansion otherwise.
pub fn to_rational<S: Scalar>(value: &S) -> BigRational {
    let any: &dyn std::any::Any = value;
    if let Some(r) = any.downcast_ref::<BigRational>() {
        return r.clone();
    }
    BigRational::from_float(value.to_f64()).unwrap_or_else(BigRational::zero)
}

/// Converts a rational into any scalar type.
pub fn from_rational<S: Scalar>(value: &BigRational) -> S {
    let mut out: Option<S> = None;
    if let Some(r) = (&mut out as &mut dyn std::any::Any).downcast_mut::<Option<BigRational>>() {
        *r = Some(value.clone());
    }
    match out {
        Some(v) => v,
        None => {
            // numerator and denominator may exceed i64; go through f64 halves
            match (value.numer().to_i64(), value.denom().to_i64()) {
                (Some(n), Some(d)) => S::from_ratio(n, d),
                _ => S::from_f64(ToPrimitive::to_f64(value).unwrap_or(0.0)).unwrap_or_else(S::zero),
            }
        }
    }
}

/// `1/φ` as an `f64`, for display only.
pub fn inverse_phi_f64() -> f64 {
    2.0 / (1.0 + 5f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn parses_all_accepted_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("4").unwrap(), q(4, 1));
        assert_eq!(parse_rational("1.5").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), q(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn fraction_string_keeps_denominator() {
        assert_eq!(fraction_string(&q(4, 1)), "4/1");
        assert_eq!(fraction_string(&q(1151, 1901)), "1151/1901");
    }

    #[test]
    fn phi_certificate_boundaries() {
        // 1002/1645 < 1/φ while 1618/2615 >= 1/φ
        assert!(!weights_at_least_inverse_phi(1002, 1645));
        assert!(weights_at_least_inverse_phi(1618, 2615));
        assert!(!at_least_inverse_phi(&q(1002, 1), &q(1645, 1)));
        assert!(at_least_inverse_phi(&q(1, 1), &q(1, 1)));
        // consecutive Fibonacci numbers straddle 1/φ
        assert!(weights_at_least_inverse_phi(34, 55) != weights_at_least_inverse_phi(55, 89));
    }

    #[test]
    fn floor_count_and_conversions() {
        assert_eq!(q(7, 2).floor_count(), Some(3));
        assert_eq!(q(-1, 2).floor_count(), None);
        assert_eq!(2.999_999_999_9_f64.floor_count(), Some(3));
        let r: f64 = from_rational(&q(3, 4));
        assert_eq!(r, 0.75);
        let back: BigRational = from_rational(&q(3, 4));
        assert_eq!(back, q(3, 4));
        assert_eq!(to_rational(&q(5, 3)), q(5, 3));
        assert_eq!(to_rational(&0.5f64), q(1, 2));
    }
}
