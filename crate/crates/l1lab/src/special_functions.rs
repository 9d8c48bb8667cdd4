//! The extremal function F1(t) = 1 + (sin(pi t)/pi) (log 4 - 1/t - 2t S(t)),
//! S(t) = sum_{k>=0} (-1)^k / ((k+1)(t+k+1)), its kernel representation
//! F1(t)/t = -4 int_0^{1/2} log|sin(pi v)| cos(2 pi t v) dv, and the kernels
//! psi, phi that appear in the derivatives of G.

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{domain, precision, Result};
use crate::precision::{bits_for_digits, err_add, rounding_err, tolerance_for_digits, PrecisionReal};
use crate::quadrature::tanh_sinh;

pub const MIN_DIGITS: u32 = 10;

#[derive(Clone, Debug, Serialize)]
pub struct F1Eval {
    pub t: f64,
    pub value: PrecisionReal,
    /// Terms of the accelerated alternating sum that were used.
    pub terms_used: usize,
}

/// sin(pi r) for a binary64 `r`, reduced exactly modulo 2.
/// Returns `None` at integers, where the value is exactly zero.
fn sin_pi_mp(r: f64, prec: u32) -> Option<PrecisionReal> {
    let r = r.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return None;
    }
    let (sign, r) = if r > 1.0 { (-1, r - 1.0) } else { (1, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    let x = Float::with_val(prec, Constant::Pi) * r;
    let mut s = Float::with_val(prec, x.sin_ref());
    // |x - pi r| <= 2^{1-prec} pi r feeds through sin with slope <= 1.
    let err = err_add((x.to_f64() * 2f64.powi(2 - prec as i32)).next_up(), rounding_err(&s));
    if sign < 0 {
        s = -s;
    }
    Some(PrecisionReal::new(s, err))
}

/// S(t) = sum_{k>=0} (-1)^k a_k with a_k = 1/((k+1)(t+k+1)), by the
/// Cohen-Rodriguez Villegas-Zagier acceleration.
///
/// a_k are the moments of the non-negative weight (1 - x^t)/t on [0, 1], so
/// the n-term error is at most S/d_n <= 2 a_0 (3 + sqrt 8)^{-n}.
fn alternating_s(t: &Float, n: usize, prec: u32) -> PrecisionReal {
    let base = Float::with_val(prec, 8u32).sqrt() + 3u32;
    let d = Float::with_val(prec, base.pow(n as u32));
    let d = Float::with_val(prec, &d + Float::with_val(prec, d.recip_ref())) / 2u32;
    let mut b = Float::with_val(prec, -1);
    let mut c = Float::with_val(prec, -&d);
    let mut s = Float::new(prec);
    let mut magnitude = 0f64;
    let nn = n as i64;
    for k in 0..n {
        c = Float::with_val(prec, &b - &c);
        let kp1 = Float::with_val(prec, k as u64 + 1);
        let ak = Float::with_val(prec, Float::with_val(prec, t + &kp1) * &kp1).recip();
        let term = Float::with_val(prec, &c * &ak);
        magnitude += term.to_f64().abs();
        s += &term;
        let ki = k as i64;
        b *= (ki + nn) * (ki - nn);
        b /= Float::with_val(prec, k as f64 + 0.5) * (k as u64 + 1);
    }
    let value = Float::with_val(prec, &s / &d);
    let a0 = Float::with_val(prec, Float::with_val(prec, t + 1u32).recip_ref()).to_f64_round(Round::Up);
    let dn = d.to_f64_round(Round::Down);
    let trunc = (a0 / dn).next_up();
    // Every accumulated term carries a few roundings; the quotient one more.
    let round = ((4.0 * (n as f64 + 2.0) * magnitude / dn) * 2f64.powi(1 - prec as i32)).next_up();
    let err = err_add(err_add(trunc, round), rounding_err(&value));
    PrecisionReal::new(value, err)
}

/// F1(t) through the accelerated alternating series, with err <= 10^-digits.
pub fn eval_f1(t: f64, digits: u32) -> Result<F1Eval> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("eval_F1", format!("t must be positive and finite, got {t}")));
    }
    if digits < MIN_DIGITS {
        return Err(domain("eval_F1", format!("digits must be at least {MIN_DIGITS}")));
    }
    let target = tolerance_for_digits(digits);
    let mut prec = bits_for_digits(digits) + 16;
    for _ in 0..6 {
        let sinpi = match sin_pi_mp(t, prec) {
            None => {
                return Ok(F1Eval { t, value: PrecisionReal::exact(Float::with_val(prec, 1)), terms_used: 0 });
            }
            Some(s) => s,
        };
        let n = ((f64::from(prec) + 4.0) / (3.0 + 8f64.sqrt()).log2()).ceil() as usize;
        let tf = PrecisionReal::exact(Float::with_val(prec, t));
        let s = alternating_s(tf.value(), n, prec);
        let log4 = Float::with_val(prec, Constant::Log2) * 2u32;
        let log4 = PrecisionReal::new(log4.clone(), rounding_err(&log4));
        let inv_t = Float::with_val(prec, tf.value().recip_ref());
        let inv_t = PrecisionReal::new(inv_t.clone(), rounding_err(&inv_t));
        let two_t = PrecisionReal::exact(Float::with_val(prec, tf.value() * 2u32));
        let bracket = &(&log4 - &inv_t) - &(&two_t * &s);
        let pi = Float::with_val(prec, Constant::Pi);
        let pi = PrecisionReal::new(pi.clone(), rounding_err(&pi));
        let factor = sinpi.checked_div(&pi).expect("pi is bounded away from zero");
        let one = PrecisionReal::exact(Float::with_val(prec, 1));
        let value = &one + &(&factor * &bracket);
        if value.err() <= target {
            return Ok(F1Eval { t, value, terms_used: n });
        }
        prec += 32 + (t.log2().abs().ceil() as u32);
    }
    Err(precision("eval_F1", format!("could not reach 1e-{digits} at t = {t}")))
}

/// F1(t)/t by tanh-sinh quadrature of the log-sine kernel, split into
/// half-period panels of cos(2 pi t v).
pub fn eval_f1_over_t(t: f64, digits: u32) -> Result<PrecisionReal> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("eval_F1_over_t", format!("t must be non-negative and finite, got {t}")));
    }
    let prec = bits_for_digits(digits) + 16;
    let panels = (t.ceil() as usize).max(1);
    let tol = tolerance_for_digits(digits) / (8.0 * panels as f64);
    let pi = Float::with_val(prec, Constant::Pi);
    let two_pi_t = Float::with_val(prec, &pi * 2u32) * t;
    let half = Float::with_val(prec, 0.5);
    let width = Float::with_val(prec, &half / panels as u64);
    let mut total = Float::new(prec);
    let mut err = 0.0f64;
    let mut max_abs = 0.0f64;
    for p in 0..panels {
        let a = Float::with_val(prec, &width * p as u64);
        let b = if p + 1 == panels { half.clone() } else { Float::with_val(prec, &width * (p as u64 + 1)) };
        let (v, e) = tanh_sinh(
            |x, dist, right| {
                // Near v = 0 use the distance, which is exact there.
                let arg = if p == 0 && !right { dist } else { x };
                let sv = Float::with_val(prec, &pi * arg).sin();
                let l = sv.ln();
                let c = Float::with_val(prec, &two_pi_t * arg).cos();
                let val = Float::with_val(prec, l * c) * (-4i32);
                let m = val.to_f64().abs();
                if m > max_abs {
                    max_abs = m;
                }
                val
            },
            &a,
            &b,
            prec,
            tol,
        )?;
        total += v;
        err = err_add(err, e);
    }
    // Each node costs a handful of correctly rounded operations.
    let round = (64.0 * (max_abs + 1.0) * 2f64.powi(-(prec as i32)) * panels as f64).next_up();
    let err = err_add(err_add(err, round), rounding_err(&total));
    Ok(PrecisionReal::new(total, err))
}

/// psi(v) = cot(pi v) - pi v / sin^2(pi v).
pub fn kernel_psi(v: f64) -> Result<f64> {
    if !(v > 0.0 && v <= 0.5) {
        return Err(domain("kernel_psi", format!("v must lie in (0, 1/2], got {v}")));
    }
    Ok(psi_unchecked(v))
}

/// phi(v) = cot(pi v) - pi v / (2 sin^2(pi v)).
pub fn kernel_phi(v: f64) -> Result<f64> {
    if !(v > 0.0 && v <= 0.5) {
        return Err(domain("kernel_phi", format!("v must lie in (0, 1/2], got {v}")));
    }
    Ok(phi_unchecked(v))
}

const PSI_SERIES_CUTOFF: f64 = 0.125;

pub(crate) fn psi_unchecked(v: f64) -> f64 {
    use std::f64::consts::PI;
    if v < PSI_SERIES_CUTOFF {
        psi_series(v)
    } else {
        let x = PI * v;
        let s = x.sin();
        x.cos() / s - x / (s * s)
    }
}

/// psi(v) = -(4/pi) sum_k k zeta(2k) v^{2k-1}, free of the cancellation in
/// the closed form as v -> 0.
fn psi_series(v: f64) -> f64 {
    use std::f64::consts::PI;
    {
        let v2 = v * v;
        let mut pow = v;
        let mut s = 0.0;
        for (k, z) in ZETA_EVEN.iter().enumerate() {
            let term = (k as f64 + 1.0) * z * pow;
            s += term;
            if term < 1e-18 * s {
                break;
            }
            pow *= v2;
        }
        -4.0 / PI * s
    }
}

pub(crate) fn phi_unchecked(v: f64) -> f64 {
    use std::f64::consts::PI;
    let x = PI * v;
    let s = x.sin();
    x.cos() / s - x / (2.0 * s * s)
}

/// zeta(2k) for k = 1..=24.
const ZETA_EVEN: [f64; 24] = [
    1.6449340668482264,
    1.0823232337111381,
    1.0173430619844492,
    1.0040773561979444,
    1.000994575127818,
    1.000246086553308,
    1.0000612481350588,
    1.0000152822594086,
    1.000003817293265,
    1.0000009539620338,
    1.0000002384505027,
    1.000000059608189,
    1.0000000149015549,
    1.000000003725334,
    1.0000000009313275,
    1.000000000232831,
    1.0000000000582077,
    1.000000000014552,
    1.000000000003638,
    1.0000000000009095,
    1.0000000000002274,
    1.0000000000000568,
    1.0000000000000142,
    1.0000000000000036,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct VaalerPoint {
    pub t: f64,
    pub f1: f64,
    pub f1_err: f64,
    /// sgn(sin pi t) (1 - F1(t))
    pub lower_gap: f64,
    /// |sin(pi t)/(pi t)| / (1 + t)
    pub middle: f64,
    /// 1/(pi t)
    pub upper: f64,
    pub within_log4_t: bool,
    pub status: PointStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct VaalerReport {
    pub points: Vec<VaalerPoint>,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
    pub passed: bool,
}

/// Checks 0 <= sgn(sin pi t)(1 - F1(t)) <= |sin(pi t)/(pi t)|/(1+t) <= 1/(pi t)
/// and |F1(t)| <= t log 4 at every sample point.
pub fn check_vaaler_inequalities(sample: &[f64], digits: u32) -> Result<VaalerReport> {
    let mut points = Vec::with_capacity(sample.len());
    let (mut checked, mut skipped, mut failures) = (0, 0, 0);
    for &t in sample {
        if !(t > 0.0) {
            return Err(domain("check_vaaler_inequalities", format!("sample point {t} is not positive")));
        }
        let eval = eval_f1(t, digits)?;
        let f1 = eval.value.to_f64();
        let e = eval.value.err() + f1.abs() * f64::EPSILON;
        let log4_t = 2.0 * std::f64::consts::LN_2 * t;
        let within_log4_t = f1.abs() <= log4_t * (1.0 + 4.0 * f64::EPSILON) + e;
        let upper = 1.0 / (std::f64::consts::PI * t);
        if t.fract() == 0.0 {
            skipped += 1;
            let status = if within_log4_t { PointStatus::Skipped } else { PointStatus::Fail };
            if status == PointStatus::Fail {
                failures += 1;
            }
            points.push(VaalerPoint { t, f1, f1_err: e, lower_gap: 0.0, middle: 0.0, upper, within_log4_t, status });
            continue;
        }
        checked += 1;
        let s = fast::sin_pi(t);
        let gap = s.signum() * (1.0 - f1);
        let middle = (s / (std::f64::consts::PI * t)).abs() / (1.0 + t);
        let slack = e + 8.0 * f64::EPSILON * middle;
        let ok = gap >= -slack && gap <= middle + slack && middle <= upper * (1.0 + 4.0 * f64::EPSILON) && within_log4_t;
        if !ok {
            failures += 1;
        }
        points.push(VaalerPoint {
            t,
            f1,
            f1_err: e,
            lower_gap: gap,
            middle,
            upper,
            within_log4_t,
            status: if ok { PointStatus::Pass } else { PointStatus::Fail },
        });
    }
    Ok(VaalerReport { points, checked, skipped, failures, passed: failures == 0 })
}

/// Binary64 evaluation of F1 for bulk work (G sums, b_F1 quadrature,
/// smoothed Dirichlet series). Accuracy is pinned against the MPFR route in
/// the test suite.
pub mod fast {
    use std::f64::consts::{LN_2, PI};

    /// Absolute error bound for `f1`, `one_minus_f1` (t >= 1 relative to |1 - F1|
    /// plus this) and `f1_over_t`.
    pub const ABS_ERR: f64 = 2e-15;

    /// sin(pi x) with exact reduction modulo 2; exactly zero at integers.
    pub fn sin_pi(x: f64) -> f64 {
        let r = x.rem_euclid(2.0);
        let (sign, r) = if r >= 1.0 { (-1.0, r - 1.0) } else { (1.0, r) };
        let r = if r > 0.5 { 1.0 - r } else { r };
        sign * (PI * r).sin()
    }

    const ASYMPTOTIC_FROM: f64 = 16.0;

    /// (4^k - 1) B_{2k} / k for k = 1..=12.
    const D_COEFFS: [f64; 12] = [
        0.5,
        -0.25,
        0.5,
        -2.125,
        15.5,
        -172.75,
        2730.5,
        -58098.0625,
        1601145.5,
        -55482645.25,
        2361058260.5,
        -121047960103.375,
    ];

    fn d_asymptotic(t: f64) -> f64 {
        let inv2 = 1.0 / (t * t);
        let mut pow = inv2;
        let mut s = 0.0;
        for c in D_COEFFS {
            let term = c * pow;
            s += term;
            if term.abs() < 1e-19 * s.abs() {
                break;
            }
            pow *= inv2;
        }
        -s
    }

    /// D(t) = 1/t - 2 beta(t), beta(t) = sum_{n>=0} (-1)^n/(n+t).
    pub fn d(t: f64) -> f64 {
        let mut acc = 0.0;
        let mut sign = 1.0;
        let mut x = t;
        while x < ASYMPTOTIC_FROM {
            acc -= sign / (x * (x + 1.0));
            sign = -sign;
            x += 1.0;
        }
        acc + sign * d_asymptotic(x)
    }

    /// (1 - sin(x)/x)/x' where x = pi t, returned divided by t.
    fn one_minus_sinc_over_t(t: f64) -> f64 {
        let x = PI * t;
        if x < 0.5 {
            let x2 = x * x;
            let series = x / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0 * (1.0 - x2 / 156.0 * (1.0 - x2 / 210.0))))));
            PI * series
        } else {
            (1.0 - x.sin() / x) / t
        }
    }

    pub fn f1_over_t(t: f64) -> f64 {
        if t < 1.0 {
            if t == 0.0 {
                return 2.0 * LN_2;
            }
            let x = PI * t;
            let sinc = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
            // F1(t)/t = (1 - sinc)/t + sinc (1/(1+t) - D(1+t))
            one_minus_sinc_over_t(t) + sinc * (1.0 / (1.0 + t) - d(1.0 + t))
        } else {
            f1(t) / t
        }
    }

    pub fn f1(t: f64) -> f64 {
        if t < 1.0 {
            t * f1_over_t(t)
        } else {
            1.0 + sin_pi(t) / PI * d(t)
        }
    }

    /// 1 - F1(t), accurate relative to its own size for t >= 1.
    pub fn one_minus_f1(t: f64) -> f64 {
        if t < 1.0 {
            1.0 - f1(t)
        } else {
            -sin_pi(t) / PI * d(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integer_arguments_are_exactly_one() {
        for t in [1.0, 2.0, 7.0, 1024.0] {
            let r = eval_f1(t, 30).unwrap();
            assert_eq!(r.value.to_f64(), 1.0);
            assert_eq!(r.value.err(), 0.0);
        }
    }

    #[test]
    fn half_gives_two_over_pi() {
        let r = eval_f1(0.5, 40).unwrap();
        assert!(r.value.err() <= 1e-40);
        assert!((r.value.to_f64() - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(eval_f1(0.0, 20).is_err());
        assert!(eval_f1(-1.0, 20).is_err());
        assert!(eval_f1(1.0, 5).is_err());
    }

    #[test]
    fn fast_route_tracks_mp_route() {
        for &t in &[1e-9, 1e-4, 0.013, 0.5, 0.999, 1.0001, 1.5, 3.25, 15.9, 16.1, 123.456, 1e5 + 0.3] {
            let mp = eval_f1(t, 25).unwrap().value.to_f64();
            let fast = fast::f1(t);
            assert!((mp - fast).abs() <= fast::ABS_ERR, "t={t}: {mp} vs {fast}");
        }
    }

    #[test]
    fn kernel_values() {
        assert!((kernel_psi(0.5).unwrap() + PI / 2.0).abs() < 1e-15);
        assert!((kernel_psi(0.25).unwrap() - (1.0 - PI / 2.0)).abs() < 1e-15);
        assert!((kernel_phi(0.5).unwrap() + PI / 4.0).abs() < 1e-15);
        assert!((kernel_phi(0.25).unwrap() - (1.0 - PI / 4.0)).abs() < 1e-15);
        assert!(kernel_psi(0.0).is_err());
        assert!(kernel_phi(0.6).is_err());
    }

    #[test]
    fn psi_series_and_direct_forms_meet() {
        for v in [0.08, 0.1, PSI_SERIES_CUTOFF, 0.2] {
            let x = PI * v;
            let direct = x.cos() / x.sin() - x / (x.sin() * x.sin());
            assert!((direct - psi_series(v)).abs() < 1e-14, "v={v}");
        }
    }
}
