//! Arbitrary-precision reals and complexes that carry an absolute error radius.
//!
//! Values live in MPFR floats; radii are `f64` and are only ever rounded up.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub const DEFAULT_CONSTANT_DIGITS: u32 = 50;
pub const DEFAULT_SCAN_DIGITS: u32 = 25;

const GUARD_BITS: u32 = 24;

/// Working precision in bits for `digits` correct decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

pub fn tolerance_for_digits(digits: u32) -> f64 {
    10f64.powi(-(digits as i32))
}

/// Adds two non-negative radii, rounding up.
pub(crate) fn err_add(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        return 0.0;
    }
    s.next_up()
}

/// Upper bound on |x| as an `f64`.
pub(crate) fn abs_up(x: &Float) -> f64 {
    x.to_f64_round(Round::Up).abs().max(x.to_f64_round(Round::Down).abs())
}

/// Bound on the rounding error committed when `x` was produced by one
/// correctly rounded MPFR operation at its own precision.
pub(crate) fn rounding_err(x: &Float) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let scale = 2f64.powi(1 - x.prec() as i32);
    (abs_up(x) * scale).next_up()
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn log2(prec: u32) -> Float {
    Float::with_val(prec, Constant::Log2)
}

pub fn euler_gamma(prec: u32) -> Float {
    Float::with_val(prec, Constant::Euler)
}

/// A real number known to lie in `[value - err, value + err]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionReal {
    value: Float,
    err: f64,
}

impl PrecisionReal {
    pub fn new(value: Float, err: f64) -> Self {
        assert!(err >= 0.0 && !err.is_nan(), "error radius must be non-negative");
        Self { value, err }
    }

    pub fn exact(value: Float) -> Self {
        Self { value, err: 0.0 }
    }

    /// Wraps a binary64 value; the value itself is stored exactly.
    pub fn from_f64(value: f64, err: f64) -> Self {
        Self::new(Float::with_val(53, value), err)
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn into_parts(self) -> (Float, f64) {
        (self.value, self.err)
    }

    pub fn upper(&self) -> Float {
        let prec = self.prec().max(64);
        Float::with_val_round(prec, &self.value + self.err, Round::Up).0
    }

    pub fn lower(&self) -> Float {
        let prec = self.prec().max(64);
        Float::with_val_round(prec, &self.value - self.err, Round::Down).0
    }

    /// True when every point of the enclosure is `<= c`.
    pub fn certified_le(&self, c: f64) -> bool {
        self.upper() <= c
    }

    /// True when every point of the enclosure is `>= c`.
    pub fn certified_ge(&self, c: f64) -> bool {
        self.lower() >= c
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && self.upper() >= x
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        *x >= self.lower() && *x <= self.upper()
    }

    /// True when the two enclosures intersect.
    pub fn overlaps(&self, other: &PrecisionReal) -> bool {
        let prec = self.prec().max(other.prec()) + 8;
        let gap = Float::with_val(prec, &self.value - &other.value).abs();
        gap <= err_add(self.err, other.err)
    }

    pub fn widen(mut self, extra: f64) -> Self {
        assert!(extra >= 0.0);
        self.err = err_add(self.err, extra);
        self
    }

    pub fn abs(&self) -> Self {
        Self { value: self.value.clone().abs(), err: self.err }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.value.to_string_radix(10, Some(digits.max(1)))
    }

    pub fn cmp_value(&self, other: &PrecisionReal) -> Ordering {
        self.value.partial_cmp(&other.value).unwrap_or(Ordering::Equal)
    }

    fn binary_prec(&self, other: &PrecisionReal) -> u32 {
        self.prec().max(other.prec())
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec() as f64) / std::f64::consts::LOG2_10).floor() as usize;
        write!(f, "{} ± {:.3e}", self.to_decimal(digits.max(3)), self.err)
    }
}

impl Serialize for PrecisionReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let digits = ((self.prec() as f64) / std::f64::consts::LOG2_10).floor() as usize;
        let mut st = s.serialize_struct("PrecisionReal", 2)?;
        st.serialize_field("value", &self.to_decimal(digits.max(3)))?;
        st.serialize_field("err", &self.err)?;
        st.end()
    }
}

impl Add for &PrecisionReal {
    type Output = PrecisionReal;
    fn add(self, rhs: &PrecisionReal) -> PrecisionReal {
        let v = Float::with_val(self.binary_prec(rhs), &self.value + &rhs.value);
        let err = err_add(err_add(self.err, rhs.err), rounding_err(&v));
        PrecisionReal { value: v, err }
    }
}

impl Sub for &PrecisionReal {
    type Output = PrecisionReal;
    fn sub(self, rhs: &PrecisionReal) -> PrecisionReal {
        let v = Float::with_val(self.binary_prec(rhs), &self.value - &rhs.value);
        let err = err_add(err_add(self.err, rhs.err), rounding_err(&v));
        PrecisionReal { value: v, err }
    }
}

impl Mul for &PrecisionReal {
    type Output = PrecisionReal;
    fn mul(self, rhs: &PrecisionReal) -> PrecisionReal {
        let v = Float::with_val(self.binary_prec(rhs), &self.value * &rhs.value);
        let a = abs_up(&self.value);
        let b = abs_up(&rhs.value);
        let prop = (a * rhs.err).next_up() + (b * self.err).next_up() + (self.err * rhs.err).next_up();
        PrecisionReal { value: v.clone(), err: err_add(prop.next_up(), rounding_err(&v)) }
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal { value: Float::with_val(self.prec(), -&self.value), err: self.err }
    }
}

impl Add for PrecisionReal {
    type Output = PrecisionReal;
    fn add(self, rhs: PrecisionReal) -> PrecisionReal {
        &self + &rhs
    }
}

impl Sub for PrecisionReal {
    type Output = PrecisionReal;
    fn sub(self, rhs: PrecisionReal) -> PrecisionReal {
        &self - &rhs
    }
}

impl Mul for PrecisionReal {
    type Output = PrecisionReal;
    fn mul(self, rhs: PrecisionReal) -> PrecisionReal {
        &self * &rhs
    }
}

impl PrecisionReal {
    /// Quotient; `None` when the divisor's enclosure contains zero.
    pub fn checked_div(&self, rhs: &PrecisionReal) -> Option<PrecisionReal> {
        let b_lo = Float::with_val_round(64, rhs.value.clone().abs() - rhs.err, Round::Down).0;
        if b_lo <= 0 {
            return None;
        }
        let v = Float::with_val(self.binary_prec(rhs), &self.value / &rhs.value);
        let q = abs_up(&v);
        let denom = b_lo.to_f64_round(Round::Down);
        let prop = ((self.err + q * rhs.err).next_up() / denom).next_up();
        Some(PrecisionReal { value: v.clone(), err: err_add(prop, rounding_err(&v)) })
    }
}

/// A complex number known to lie in the closed disk of radius `err`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionComplex {
    re: Float,
    im: Float,
    err: f64,
}

impl PrecisionComplex {
    pub fn new(re: Float, im: Float, err: f64) -> Self {
        assert!(err >= 0.0 && !err.is_nan());
        Self { re, im, err }
    }

    pub fn from_real(x: &PrecisionReal) -> Self {
        let prec = x.prec();
        Self { re: x.value.clone(), im: Float::new(prec), err: x.err }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn re_part(&self) -> PrecisionReal {
        PrecisionReal::new(self.re.clone(), self.err)
    }

    pub fn im_part(&self) -> PrecisionReal {
        PrecisionReal::new(self.im.clone(), self.err)
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im), err: self.err }
    }

    pub fn abs(&self) -> PrecisionReal {
        let v = Float::with_val(self.prec(), self.re.hypot_ref(&self.im));
        let err = err_add(self.err, rounding_err(&v));
        PrecisionReal::new(v, err)
    }

    pub fn mul(&self, rhs: &PrecisionComplex) -> PrecisionComplex {
        let prec = self.prec().max(rhs.prec());
        let re = Float::with_val(prec, &self.re * &rhs.re - &self.im * &rhs.im);
        let im = Float::with_val(prec, &self.re * &rhs.im + &self.im * &rhs.re);
        let a = abs_up(&self.re) + abs_up(&self.im);
        let b = abs_up(&rhs.re) + abs_up(&rhs.im);
        let prop = (a * rhs.err).next_up() + (b * self.err).next_up() + (self.err * rhs.err).next_up();
        // Each component is two products and a sum, each correctly rounded.
        let round = 4.0 * a * b * 2f64.powi(1 - prec as i32);
        let err = err_add(prop.next_up(), round.next_up());
        PrecisionComplex { re, im, err }
    }

    pub fn scale(&self, k: &PrecisionReal) -> PrecisionComplex {
        self.mul(&PrecisionComplex::from_real(k))
    }

    pub fn sub(&self, rhs: &PrecisionComplex) -> PrecisionComplex {
        let prec = self.prec().max(rhs.prec());
        let re = Float::with_val(prec, &self.re - &rhs.re);
        let im = Float::with_val(prec, &self.im - &rhs.im);
        let err = err_add(err_add(self.err, rhs.err), rounding_err(&re) + rounding_err(&im));
        PrecisionComplex { re, im, err }
    }

    pub fn add(&self, rhs: &PrecisionComplex) -> PrecisionComplex {
        let prec = self.prec().max(rhs.prec());
        let re = Float::with_val(prec, &self.re + &rhs.re);
        let im = Float::with_val(prec, &self.im + &rhs.im);
        let err = err_add(err_add(self.err, rhs.err), rounding_err(&re) + rounding_err(&im));
        PrecisionComplex { re, im, err }
    }

    /// True when the two disks intersect.
    pub fn overlaps(&self, other: &PrecisionComplex) -> bool {
        let prec = self.prec().max(other.prec()) + 8;
        let dr = Float::with_val(prec, &self.re - &other.re);
        let di = Float::with_val(prec, &self.im - &other.im);
        let dist = Float::with_val(prec, dr.hypot_ref(&di));
        dist <= err_add(self.err, other.err)
    }

    pub fn distance(&self, other: &PrecisionComplex) -> f64 {
        let prec = self.prec().max(other.prec()) + 8;
        let dr = Float::with_val(prec, &self.re - &other.re);
        let di = Float::with_val(prec, &self.im - &other.im);
        Float::with_val(prec, dr.hypot_ref(&di)).to_f64_round(Round::Up)
    }
}

impl Serialize for PrecisionComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let digits = ((self.prec() as f64) / std::f64::consts::LOG2_10).floor() as usize;
        let mut st = s.serialize_struct("PrecisionComplex", 3)?;
        st.serialize_field("re", &self.re.to_string_radix(10, Some(digits.max(3))))?;
        st.serialize_field("im", &self.im.to_string_radix(10, Some(digits.max(3))))?;
        st.serialize_field("err", &self.err)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_cover_digits() {
        assert!(bits_for_digits(50) as f64 >= 50.0 * std::f64::consts::LOG2_10);
    }

    #[test]
    fn certified_comparisons_use_the_radius() {
        let x = PrecisionReal::from_f64(1.0, 0.25);
        assert!(x.certified_le(1.25));
        assert!(!x.certified_le(1.2));
        assert!(x.certified_ge(0.75));
        assert!(!x.certified_ge(0.8));
    }

    #[test]
    fn sums_add_radii() {
        let a = PrecisionReal::from_f64(1.0, 1e-10);
        let b = PrecisionReal::from_f64(2.0, 3e-10);
        let c = &a + &b;
        assert!(c.err() >= 4e-10);
        assert!(c.contains(3.0));
    }

    #[test]
    fn division_refuses_zero_enclosures() {
        let a = PrecisionReal::from_f64(1.0, 0.0);
        let z = PrecisionReal::from_f64(0.1, 0.2);
        assert!(a.checked_div(&z).is_none());
        let b = PrecisionReal::from_f64(4.0, 0.0);
        let q = a.checked_div(&b).unwrap();
        assert!(q.contains(0.25));
    }

    #[test]
    fn complex_product_encloses_exact() {
        let a = PrecisionComplex::new(Float::with_val(100, 1), Float::with_val(100, 2), 1e-20);
        let b = PrecisionComplex::new(Float::with_val(100, 3), Float::with_val(100, -1), 1e-20);
        let c = a.mul(&b);
        assert_eq!(c.re().to_f64(), 5.0);
        assert_eq!(c.im().to_f64(), 5.0);
        assert!(c.err() >= 1e-20 * (10f64.sqrt() + 5f64.sqrt()) * 0.99);
    }

    #[test]
    fn gamma_plus_log2_matches_reference_digits() {
        let prec = bits_for_digits(50);
        let s = Float::with_val(prec, euler_gamma(prec) + log2(prec));
        let txt = s.to_string_radix(10, Some(40));
        assert!(txt.starts_with("1.27036284546147817002374421154057899911"), "{txt}");
    }
}
