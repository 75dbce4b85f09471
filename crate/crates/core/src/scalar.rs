//! Ordered-field scalars with an exact and a floating realization.
//!
//! Every geometric routine is generic over [`Scalar`]. Rational maps
//! (brackets, continuants, recutting) are exact over [`Rational`];
//! anything needing a square root of a non-square is float territory.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arbitrary precision rational.
pub type Rational = BigRational;

/// Default relative tolerance for float comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// Relative threshold under which a float bracket counts as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// True when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;
    /// Backend name used in reports.
    const NAME: &'static str;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    /// Exact conversion for rationals (binary expansion); `None` if not finite.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// Square root inside the field, if it exists there.
    fn sqrt(&self) -> Option<Self>;
    /// Text form: 17 significant digits for floats, `p/q` for rationals.
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Option<Self>;

    /// Zero test. Exact for rationals; `|x| <= tol * scale` for floats.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol * scale
        }
    }

    fn is_finite(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn to_text(&self) -> String {
        format!("{:.16e}", self)
    }
    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return (q != 0.0).then(|| p / q);
        }
        s.parse().ok()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }
    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        if let Some(f) = ToPrimitive::to_f64(self) {
            if f.is_finite() {
                return f;
            }
        }
        // Numerator and denominator may each overflow even when the ratio does not.
        let shift = self.numer().bits() as i64 - self.denom().bits() as i64;
        let scaled = if shift > 0 {
            self / Rational::from_integer(BigInt::one() << shift as usize)
        } else {
            self * Rational::from_integer(BigInt::one() << (-shift) as usize)
        };
        ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| Rational::new(n, d))
    }
    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_text(s: &str) -> Option<Self> {
        parse_rational(s.trim())
    }
}

/// Parses `p/q`, an integer, or a decimal literal with optional exponent, exactly.
fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(digits);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Equality up to the backend's notion of tolerance.
///
/// Exact for rationals; for floats `|a-b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        let (x, y) = (a.to_f64(), b.to_f64());
        (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs())
    }
}

/// Relative difference used in float reports.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Largest element under `PartialOrd`, or zero for an empty iterator.
pub fn max_abs<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().fold(S::zero(), |m, v| {
        let a = v.abs();
        if a > m {
            a
        } else {
            m
        }
    })
}

pub fn square<S: Scalar>(x: &S) -> S {
    x.clone() * x.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = Rational::from_ratio(-7, 3);
        assert_eq!(r.to_text(), "-7/3");
        assert_eq!(Rational::parse_text("-7/3"), Some(r));
        assert_eq!(Rational::parse_text("4"), Some(Rational::from_i64(4)));
        assert_eq!(Rational::parse_text("0.25"), Some(Rational::from_ratio(1, 4)));
        assert_eq!(Rational::parse_text("-1.5e-2"), Some(Rational::from_ratio(-3, 200)));
        assert_eq!(Rational::parse_text("1/0"), None);
        assert_eq!(Rational::parse_text("abc"), None);
    }

    #[test]
    fn float_text_has_17_digits() {
        let t = (0.1f64).to_text();
        assert_eq!(t, "1.0000000000000001e-1");
        assert_eq!(f64::parse_text(&t), Some(0.1));
        assert_eq!(f64::parse_text("1/4"), Some(0.25));
    }

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(Rational::from_ratio(9, 4).sqrt(), Some(Rational::from_ratio(3, 2)));
        assert_eq!(Rational::from_i64(2).sqrt(), None);
        assert_eq!(Rational::from_i64(-4).sqrt(), None);
        assert_eq!(Scalar::sqrt(&-1.0f64), None);
    }

    #[test]
    fn huge_rational_converts() {
        let big = Rational::new(BigInt::one() << 2000usize, (BigInt::one() << 1999usize) * 3);
        assert!((Scalar::to_f64(&big) - 2.0 / 3.0).abs() < 1e-15);
    }
}
