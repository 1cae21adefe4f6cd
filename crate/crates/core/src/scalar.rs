//! Ground-field elements.
//!
//! Two scalar paths exist: exact Gaussian rationals ([`Gq`]) and complex
//! doubles ([`C64`]). Generic algorithms are written against [`Ring`] and
//! [`Field`]; the mode-tagged [`Scalar`] is only used at API and I/O
//! boundaries where a value may come from either path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_complex::Complex64 as C64;

use crate::error::{DmodError, Result};

/// Commutative ring with unit, embedding the Gaussian rationals.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Structural zero test (exact for exact rings, `== 0.0` for floats).
    fn is_zero(&self) -> bool;
    fn from_gq(q: &Gq) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_gq(&Gq::from_i64(v))
    }
}

/// A field: exact Gaussian rationals or complex doubles.
pub trait Field: Ring + Div<Output = Self> {
    const EXACT: bool;

    fn inv(&self) -> Self;
    /// Absolute value as a float, used for pivot selection and tolerances.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> C64;
    fn to_scalar(&self) -> Scalar;
    /// Nearest field element to a float (binary-exact for [`Gq`]).
    fn from_c64_lossy(z: C64) -> Self;

    /// Zero up to `tol` in approximate mode; exact zero test otherwise.
    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }
}

/// Exact Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn from_i64(v: i64) -> Self {
        Gq::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    /// `num/den`, real.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Gq::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn complex(re: Gq, im: Gq) -> Self {
        debug_assert!(re.is_real() && im.is_real());
        Gq::new(re.re, im.re)
    }

    pub fn i() -> Self {
        Gq::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_rational(re: BigRational) -> Self {
        Gq::new(re, BigRational::zero())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `Some(k)` when the value is a (real) integer that fits in an `i64`.
    pub fn as_integer(&self) -> Option<i64> {
        if self.is_real() && self.re.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        Gq::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// `floor(Re z)` as an exact integer.
    pub fn floor_re(&self) -> BigInt {
        self.re.floor().to_integer()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Gq::from_i64(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.pow((-e) as u32).inv()
        }
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        Gq::new(&self.re / &n, -(&self.im / &n))
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Both parts overflow f64: shift them down together.
            let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

impl PartialOrd for Gq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on `(Re, Im)`.
impl Ord for Gq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Gq> for Gq {
            type Output = Gq;
            fn $m(self, rhs: Gq) -> Gq {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Gq> for Gq {
            type Output = Gq;
            fn $m(self, rhs: &'a Gq) -> Gq {
                (&self).$m(rhs)
            }
        }
    };
}

impl<'a, 'b> Add<&'b Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, rhs: &'b Gq) -> Gq {
        Gq::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}
impl<'a, 'b> Sub<&'b Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, rhs: &'b Gq) -> Gq {
        Gq::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}
impl<'a, 'b> Mul<&'b Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, rhs: &'b Gq) -> Gq {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Gq::new(&self.re * &rhs.re, BigRational::zero());
        }
        Gq::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}
impl<'a, 'b> Div<&'b Gq> for &'a Gq {
    type Output = Gq;
    fn div(self, rhs: &'b Gq) -> Gq {
        if rhs.im.is_zero() {
            assert!(!rhs.re.is_zero(), "division by zero Gaussian rational");
            return Gq::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        self * &rhs.inv()
    }
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq::new(-self.re, -self.im)
    }
}
impl<'a> Neg for &'a Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq::new(-self.re.clone(), -self.im.clone())
    }
}

impl Ring for Gq {
    fn zero() -> Self {
        Gq::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Gq::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_gq(q: &Gq) -> Self {
        q.clone()
    }
}

impl Field for Gq {
    const EXACT: bool = true;
    fn inv(&self) -> Self {
        Gq::inv(self)
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn to_c64(&self) -> C64 {
        Gq::to_c64(self)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn from_c64_lossy(z: C64) -> Self {
        let conv = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Gq::new(conv(z.re), conv(z.im))
    }
}

impl Ring for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_gq(q: &Gq) -> Self {
        q.to_c64()
    }
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
}

impl Field for C64 {
    const EXACT: bool = false;
    fn inv(&self) -> Self {
        C64::new(1.0, 0.0) / *self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Approx(*self)
    }
    fn from_c64_lossy(z: C64) -> Self {
        z
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}/{}", r.numer(), r.denom())
}

/// Canonical text encoding: `a/b` or `a/b+c/di` (sign folded into the
/// imaginary part, denominators always present and positive).
impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.re, f)?;
        if !self.im.is_zero() {
            if self.im.is_negative() {
                f.write_str("-")?;
            } else {
                f.write_str("+")?;
            }
            fmt_rational(&self.im.abs(), f)?;
            f.write_str("i")?;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let t = t.strip_prefix('-').unwrap_or(t);
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl FromStr for Gq {
    type Err = DmodError;

    /// Accepts `a`, `a/b`, `a/b+c/di`, `a/b-c/di`, `c/di`, `i`, `-i`.
    fn from_str(s: &str) -> Result<Gq> {
        let bad = || DmodError::Parse(format!("invalid exact scalar {s:?}"));
        let t = s.trim();
        if t.contains(char::is_whitespace) {
            return Err(bad());
        }
        let Some(body) = t.strip_suffix('i') else {
            return parse_rational(t).map(Gq::from_rational).ok_or_else(bad);
        };
        // Split at the last sign that is not the leading character.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let re = parse_rational(re_part).ok_or_else(bad)?;
        let im = match im_part {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other).ok_or_else(bad)?,
        };
        Ok(Gq::new(re, im))
    }
}

/// Mode-tagged scalar.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Gq),
    Approx(C64),
}

impl Scalar {
    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_c64(&self) -> C64 {
        match self {
            Scalar::Exact(q) => q.to_c64(),
            Scalar::Approx(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Gq> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    /// Equality under the tolerance policy: exact pairs compare exactly,
    /// anything involving an approximate value compares with
    /// `|a - b| <= eps * max(1, |a|, |b|)`.
    pub fn approx_eq(&self, other: &Scalar, eps: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => close(self.to_c64(), other.to_c64(), eps),
        }
    }

    /// Canonical order: `(Re, Im)` lexicographic. Exact pairs compare
    /// exactly; otherwise components within `eps` (relative) are treated
    /// as equal before comparing.
    pub fn canonical_cmp(&self, other: &Scalar, eps: f64) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_c64(), other.to_c64());
                snapped_cmp(a.re, b.re, eps).then_with(|| snapped_cmp(a.im, b.im, eps))
            }
        }
    }
}

pub(crate) fn close(a: C64, b: C64, eps: f64) -> bool {
    (a - b).norm() <= eps * 1f64.max(a.norm()).max(b.norm())
}

fn snapped_cmp(a: f64, b: f64, eps: f64) -> Ordering {
    if (a - b).abs() <= eps * 1f64.max(a.abs()).max(b.abs()) {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => q.fmt(f),
            Scalar::Approx(z) => write!(f, "[{}, {}]", z.re, z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Gq {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_encoding() {
        assert_eq!(Gq::from_i64(3).to_string(), "3/1");
        assert_eq!(Gq::ratio(-4, 6).to_string(), "-2/3");
        assert_eq!(q("1/2-3/4i").to_string(), "1/2-3/4i");
        assert_eq!(q("2/4+6/8i").to_string(), "1/2+3/4i");
        assert_eq!(Gq::i().to_string(), "0/1+1/1i");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(q("i"), Gq::i());
        assert_eq!(q("-i"), -Gq::i());
        assert_eq!(q("3i"), Gq::new(BigRational::zero(), BigRational::from_integer(3.into())));
        assert_eq!(q("-1/2+i"), Gq::complex(Gq::ratio(-1, 2), Gq::from_i64(1)));
        assert_eq!(q("7"), Gq::from_i64(7));
        for bad in ["", "1/0", "a", "1 / 2", "1/-2", "1/2+"] {
            assert!(bad.parse::<Gq>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn field_ops() {
        let a = q("1/2+1/3i");
        let b = q("-2+5i");
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&a * &a.inv(), Gq::one());
        assert_eq!(Gq::ratio(2, 1).powi(-3), Gq::ratio(1, 8));
    }

    #[test]
    fn tolerance_equality() {
        let a = Scalar::Approx(C64::new(1.0, 0.0));
        let b = Scalar::Approx(C64::new(1.0 + 1e-12, 0.0));
        assert!(a.approx_eq(&b, 1e-9));
        assert!(!a.approx_eq(&Scalar::Exact(Gq::from_i64(2)), 1e-9));
    }
}
