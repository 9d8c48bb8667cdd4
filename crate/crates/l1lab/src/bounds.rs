//! Explicit constants and bound functions: b_F1, D(theta), H(delta), C(q),
//! the conductor margin, and the auxiliary odd-sum and log-sine lemmas.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::gfun::{g_fast, U0};
use crate::precision::{bits_for_digits, err_add, euler_gamma, log2, rounding_err, PrecisionReal};
use crate::quadrature::{adaptive_gk15, Estimate};
use crate::special_functions::fast;

/// Upper bound for b_F1 used in the conductor margin.
pub const STATED_BF1_BOUND: f64 = -0.66266;
/// Budget for the three-part truncation remainder of b_F1 at (L, T) = (50, 1000).
pub const BF1_TRUNCATION_BUDGET: f64 = 0.00022;
/// Required value of the conductor margin.
pub const THEOREM1_MARGIN: f64 = -0.02012;
/// Start of the conductor range covered by the margin argument.
pub const MARGIN_RANGE_START: f64 = 2e6;
/// Below this, sqrt(q) log 2 - 4 <= 0.
pub const MIN_CONDUCTOR: f64 = 33.4;

pub const DEFAULT_BF1_DEPTH: usize = 50;
pub const DEFAULT_BF1_HORIZON: f64 = 1000.0;

/// Constants with |1 - F(t)| <= c0/t^2, |F'(t)| <= c1/t^2, |F(t)| <= c2,
/// |F(t)| <= c3 t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothingConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl SmoothingConstants {
    pub fn f1() -> Self {
        Self { c0: 1.0, c1: 1.0 / PI, c2: 2.0, c3: 2.0 * LN_2 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.c0, self.c1, self.c2, self.c3];
        if all.iter().all(|c| *c > 0.0 && c.is_finite()) {
            Ok(())
        } else {
            Err(domain("SmoothingConstants", format!("constants must be positive: {self:?}")))
        }
    }
}

/// D(theta) = (c3 theta / (2 log 2)) (-log theta + log(c2/c3) + log log 2 + log 2 + 2).
pub fn compute_d(theta: f64, c: &SmoothingConstants) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(domain("compute_D", format!("theta must lie in (0, 1], got {theta}")));
    }
    c.validate()?;
    let bracket = -theta.ln() + (c.c2 / c.c3).ln() + LN_2.ln() + LN_2 + 2.0;
    Ok(c.c3 * theta / (2.0 * LN_2) * bracket)
}

/// (H1, H2) with the (1 - 4 delta) denominators.
pub fn compute_h(delta: f64, c: &SmoothingConstants) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(domain("compute_H", format!("delta must lie in (0, 1/4), got {delta}")));
    }
    c.validate()?;
    let d2 = delta * delta;
    let h1 = (4.0 * c.c0 + 7.0 * c.c1) * delta / 21.0 + (12.0 * c.c0 + 14.0 * c.c1) * d2 / 21.0;
    let w = 1.0 - 4.0 * delta;
    let w2 = w * w;
    let h2 = (-delta).ln_1p() + d2 / (6.0 * w2) + d2 * d2 / (30.0 * w2 * w2);
    Ok((h1, h2))
}

/// theta = u0 when delta <= u0, else delta.
pub fn select_theta(delta: f64) -> f64 {
    if delta <= U0 {
        U0
    } else {
        delta
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundBreakdown {
    pub q: f64,
    pub delta: f64,
    pub theta: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "Cq")]
    pub cq: f64,
    #[serde(rename = "bF1")]
    pub bf1: PrecisionReal,
    pub margin: f64,
}

/// Flat CSV form of a breakdown.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundRow {
    pub q: f64,
    pub delta: f64,
    pub theta: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "Cq")]
    pub cq: f64,
    pub margin: f64,
}

impl BoundBreakdown {
    pub fn csv_row(&self) -> BoundRow {
        BoundRow { q: self.q, delta: self.delta, theta: self.theta, d: self.d, h1: self.h1, h2: self.h2, cq: self.cq, margin: self.margin }
    }
}

/// Per-conductor decomposition of C(q) and the margin
/// C(q) + log log 2 + b + 1 with b the printed upper bound for b_F1.
pub fn compute_cq(q: f64) -> Result<BoundBreakdown> {
    if !(q > MIN_CONDUCTOR) || !q.is_finite() {
        return Err(domain("compute_Cq", format!("q must exceed {MIN_CONDUCTOR}, got {q}")));
    }
    let c = SmoothingConstants::f1();
    let delta = 1.0 / (q.sqrt() * LN_2);
    let theta = select_theta(delta);
    let d = compute_d(theta, &c)?;
    let (h1, h2) = compute_h(delta, &c)?;
    let cq = d + h1 + h2;
    let margin = cq + LN_2.ln() + STATED_BF1_BOUND + 1.0;
    Ok(BoundBreakdown { q, delta, theta, d, h1, h2, cq, bf1: PrecisionReal::from_f64(STATED_BF1_BOUND, 0.0), margin })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginReport {
    pub q_lo: f64,
    pub q_hi: f64,
    pub threshold: f64,
    pub samples: Vec<BoundBreakdown>,
    pub max_margin: f64,
    pub argmax: f64,
    pub passed: bool,
    /// Where theta = delta the margin never increases with q.
    pub delta_regime_nonincreasing: bool,
    /// Where theta = u0 the margin increases towards this delta -> 0 limit.
    pub u0_regime_limit: f64,
    pub u0_regime_bounded: bool,
    pub failures: Vec<f64>,
}

/// Margin on log-spaced samples of [q_lo, q_hi] (endpoints included).
pub fn verify_margin_range(q_lo: f64, q_hi: f64, samples: usize) -> Result<MarginReport> {
    if !(q_lo >= 34.0 && q_hi >= q_lo) {
        return Err(domain("verify_margin_range", format!("need 34 <= q_lo <= q_hi, got [{q_lo}, {q_hi}]")));
    }
    let n = samples.max(2);
    let (a, b) = (q_lo.ln(), q_hi.ln());
    let mut qs: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    qs[0] = q_lo;
    qs[n - 1] = q_hi;
    let rows = qs.iter().map(|&q| compute_cq(q)).collect::<Result<Vec<_>>>()?;
    let best = rows.iter().max_by(|x, y| x.margin.total_cmp(&y.margin)).expect("non-empty");
    let (max_margin, argmax) = (best.margin, best.q);
    let failures: Vec<f64> = rows.iter().filter(|r| r.margin > THEOREM1_MARGIN).map(|r| r.q).collect();

    let mut delta_regime_nonincreasing = true;
    for w in rows.windows(2) {
        if w[0].theta > U0 && w[1].theta > U0 && w[1].margin > w[0].margin {
            delta_regime_nonincreasing = false;
        }
    }
    let c = SmoothingConstants::f1();
    let u0_regime_limit = compute_d(U0, &c)? + LN_2.ln() + STATED_BF1_BOUND + 1.0;
    let u0_regime_bounded = rows.iter().filter(|r| r.theta == U0).all(|r| r.margin <= u0_regime_limit);
    Ok(MarginReport {
        q_lo,
        q_hi,
        threshold: THEOREM1_MARGIN,
        max_margin,
        argmax,
        passed: failures.is_empty(),
        samples: rows,
        delta_regime_nonincreasing,
        u0_regime_limit,
        u0_regime_bounded,
        failures,
    })
}

/// Three pieces of what the (L, T) truncation of b_F1 leaves out.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TruncationRemainder {
    /// (1/2) sum_{l>L} int_0^1 |F1(2^l t)|/(2^l t) dt
    pub small_t: f64,
    /// (1/2) sum_{l>L} int_1^T |1 - F1(2^l t)|/(2^l t) dt
    pub deep_levels: f64,
    /// (1/2) int_T^inf |G(t)|/t dt
    pub beyond_horizon: f64,
    pub total: f64,
}

pub fn bf1_truncation_remainder(depth: usize, horizon: f64, c: &SmoothingConstants) -> TruncationRemainder {
    // int_0^1 min(c3, c2/(2^l t)) dt = (c2/2^l)(1 + log(c3 2^l / c2)) once 2^l > c2/c3.
    let mut small_t = 0.0;
    for l in depth + 1..depth + 400 {
        let p = 2f64.powi(l as i32);
        let term = if p * c.c3 > c.c2 { c.c2 / p * (1.0 + (c.c3 * p / c.c2).ln()) } else { c.c3 };
        small_t += 0.5 * term;
        if term < 1e-30 * small_t {
            break;
        }
    }
    let deep_levels = c.c0 / 4.0 * (1.0 - 1.0 / (horizon * horizon)) * 2f64.powi(-3 * depth as i32) / 7.0;
    let beyond_horizon = 2.0 * c.c0 / (7.0 * horizon * horizon);
    let total = (small_t + deep_levels + beyond_horizon).next_up();
    TruncationRemainder { small_t, deep_levels, beyond_horizon, total }
}

#[derive(Clone, Debug, Serialize)]
pub struct BF1Result {
    pub depth: usize,
    pub horizon: f64,
    pub digits: u32,
    pub value: PrecisionReal,
    /// int_0^1 -sum_{l<=L} F1(2^l t)/(2^l t) dt
    pub low_integral: PrecisionReal,
    /// int_1^T |G_L(t)|/t dt
    pub high_integral: PrecisionReal,
    pub euler_plus_log2: PrecisionReal,
    pub remainder: TruncationRemainder,
    pub evaluations: usize,
}

impl BF1Result {
    pub fn certified_below(&self, bound: f64) -> bool {
        self.value.certified_le(bound)
    }
}

fn low_integrand(t: f64, depth: usize) -> f64 {
    let mut s = 0.0;
    let mut x = t;
    for _ in 0..=depth {
        s += fast::f1_over_t(x);
        x *= 2.0;
    }
    -s
}

const PANEL_TOL: f64 = 1e-13;
const SIGN_SAMPLES: usize = 32;

fn high_panel(n: usize, depth: usize) -> Estimate {
    let a = n as f64;
    let g = |t: f64| g_fast(t, depth).0;
    // Split at sign changes of G found by sampling.
    let mut cuts = vec![a];
    let mut prev_t = a;
    let mut prev_g = g(a + 0.5 / SIGN_SAMPLES as f64);
    for i in 1..SIGN_SAMPLES {
        let t = a + (i as f64 + 0.5) / SIGN_SAMPLES as f64;
        let gt = g(t);
        if gt != 0.0 && prev_g != 0.0 && gt.signum() != prev_g.signum() {
            let (mut lo, mut hi, mut glo) = (prev_t.max(a + 0.5 / SIGN_SAMPLES as f64), t, prev_g);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = g(mid);
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_g = gt;
    }
    cuts.push(a + 1.0);
    let mut out = Estimate::default();
    let share = PANEL_TOL / (cuts.len() - 1) as f64;
    for w in cuts.windows(2) {
        let e = adaptive_gk15(|t| g(t).abs() / t, w[0], w[1], share, 40);
        out.value += e.value;
        out.err += e.err;
        out.evaluations += e.evaluations;
    }
    out.evaluations += SIGN_SAMPLES;
    out
}

/// b_F1 = (1/2) int_0^1 (G - 2)/t + (1/2) int_1^inf |G|/t + gamma + log 2,
/// with G cut at depth L and the integral at T.
pub fn compute_bf1(depth: usize, horizon: f64, digits: u32) -> Result<BF1Result> {
    if depth < 10 {
        return Err(domain("compute_bF1", format!("depth must be at least 10, got {depth}")));
    }
    if !(horizon >= 100.0) || horizon.fract() != 0.0 || horizon > 1e6 {
        return Err(domain("compute_bF1", format!("horizon must be an integer in [100, 1e6], got {horizon}")));
    }
    let c = SmoothingConstants::f1();

    // [0, 1] in dyadic panels; the innermost one is a single smooth panel.
    const DYADIC: i32 = 60;
    let mut bounds: Vec<(f64, f64)> = (0..DYADIC).map(|j| (2f64.powi(-j - 1), 2f64.powi(-j))).collect();
    bounds.push((0.0, 2f64.powi(-DYADIC)));
    let low: Vec<Estimate> = bounds
        .par_iter()
        .map(|&(a, b)| adaptive_gk15(|t| low_integrand(t, depth), a, b, PANEL_TOL / bounds.len() as f64, 40))
        .collect();
    let high: Vec<Estimate> = (1..horizon as usize).into_par_iter().map(|n| high_panel(n, depth)).collect();

    let fold = |v: &[Estimate]| {
        v.iter().fold(Estimate::default(), |acc, e| Estimate {
            value: acc.value + e.value,
            err: acc.err + e.err,
            evaluations: acc.evaluations + e.evaluations,
        })
    };
    let lo = fold(&low);
    let hi = fold(&high);
    // Pointwise evaluation error integrated over each range.
    let lo_eval = (depth as f64 + 1.0) * fast::ABS_ERR;
    let hi_eval = 2.0 * fast::ABS_ERR * horizon.ln();
    let round = |v: f64, n: usize| 4.0 * f64::EPSILON * v.abs() * (n as f64).sqrt().max(1.0);
    let low_integral = PrecisionReal::from_f64(lo.value, lo.err + lo_eval + round(lo.value, low.len() * 64));
    let high_integral = PrecisionReal::from_f64(hi.value, hi.err + hi_eval + round(hi.value, high.len() * 64));

    let prec = bits_for_digits(digits);
    let gl = Float::with_val(prec, euler_gamma(prec) + log2(prec));
    let euler_plus_log2 = PrecisionReal::new(gl.clone(), 2.0 * rounding_err(&gl));

    let half = PrecisionReal::exact(Float::with_val(prec, 0.5));
    let integrals = &(&half * &low_integral) + &(&half * &high_integral);
    let remainder = bf1_truncation_remainder(depth, horizon, &c);
    let value = (&integrals + &euler_plus_log2).widen(remainder.total);
    let value = PrecisionReal::new(value.value().clone(), err_add(value.err(), 0.0));

    Ok(BF1Result {
        depth,
        horizon,
        digits,
        value,
        low_integral,
        high_integral,
        euler_plus_log2,
        remainder,
        evaluations: lo.evaluations + hi.evaluations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OddHarmonic {
    pub m: u64,
    pub exact: PrecisionReal,
    pub approx: PrecisionReal,
    pub theta: f64,
    pub theta_in_range: bool,
}

fn odd_harmonic_prec(m_max: u64) -> u32 {
    bits_for_digits(40 + 4 * (m_max.max(10) as f64).log10().ceil() as u32)
}

fn odd_harmonic_row(m: u64, exact: &PrecisionReal, gamma_log2: &Float, prec: u32) -> OddHarmonic {
    let mf = Float::with_val(prec, m);
    let approx_v = Float::with_val(prec, Float::with_val(prec, mf.ln_ref()) + gamma_log2) / 2u32
        + Float::with_val(prec, Float::with_val(prec, &mf * &mf) * 12u32).recip();
    let approx = PrecisionReal::new(approx_v.clone(), 8.0 * rounding_err(&approx_v));
    let diff = exact - &approx;
    let m4 = (m as f64).powi(4);
    let theta = diff.to_f64() * 15.0 * m4 / 2.0;
    let theta_err = diff.err() * 15.0 * m4 / 2.0;
    let theta_in_range = theta - theta_err >= -1.0 && theta + theta_err <= 0.125;
    OddHarmonic { m, exact: exact.clone(), approx, theta, theta_in_range }
}

/// sum_{m <= M, m odd} 1/m against (1/2)(log M + gamma + log 2) + 1/(12 M^2).
pub fn odd_harmonic_sum(m: u64) -> Result<OddHarmonic> {
    if m < 2 || m % 2 == 1 {
        return Err(domain("odd_harmonic_sum", format!("M must be even and >= 2, got {m}")));
    }
    Ok(odd_harmonic_scan(m)?.pop().expect("at least one row"))
}

/// The same check for every even M <= m_max, sharing one running sum.
pub fn odd_harmonic_scan(m_max: u64) -> Result<Vec<OddHarmonic>> {
    if m_max < 2 {
        return Err(domain("odd_harmonic_scan", "m_max must be at least 2"));
    }
    let prec = odd_harmonic_prec(m_max);
    let gamma_log2 = Float::with_val(prec, euler_gamma(prec) + log2(prec));
    let mut sum = Float::new(prec);
    let mut err = 0.0;
    let mut rows = Vec::with_capacity((m_max / 2) as usize);
    let mut m = 1u64;
    while m < m_max {
        sum += Float::with_val(prec, m).recip();
        // One rounding for the reciprocal, one for the addition.
        err = err_add(err, 2.0 * rounding_err(&sum));
        m += 2;
        let even = m - 1;
        rows.push(odd_harmonic_row(even, &PrecisionReal::new(sum.clone(), err), &gamma_log2, prec));
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct OddPowerTail {
    pub m: u64,
    pub k: u32,
    pub exact: f64,
    pub main: f64,
    pub residual: f64,
    pub allowed: f64,
    pub remainder_ok: bool,
}

/// sum_{j>=0} (a + 2j)^{-k} for odd a by Euler-Maclaurin with step 2.
fn odd_tail_em(a: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    let p = a.powi(-(k as i32));
    a.powf(1.0 - kf) / (2.0 * (kf - 1.0)) + p / 2.0 + kf / 6.0 * p / a
        - 8.0 / 720.0 * kf * (kf + 1.0) * (kf + 2.0) * p / a.powi(3)
}

fn odd_power_row(m: u64, k: u32, exact: f64) -> OddPowerTail {
    let mf = m as f64;
    let (main, allowed) = match k {
        3 => (1.0 / (4.0 * mf * mf), 1.0 / (2.0 * mf.powi(3))),
        _ => (1.0 / (6.0 * mf.powi(3)), 1.0 / (2.0 * mf.powi(4))),
    };
    let residual = (exact - main).abs();
    OddPowerTail { m, k, exact, main, residual, allowed, remainder_ok: residual <= allowed }
}

/// Rows for every M in [m_lo, m_hi], built by summing downwards from an
/// Euler-Maclaurin tail.
pub fn odd_power_tail_scan(m_lo: u64, m_hi: u64, k: u32) -> Result<Vec<OddPowerTail>> {
    if !(k == 3 || k == 4) {
        return Err(domain("odd_power_tail", format!("k must be 3 or 4, got {k}")));
    }
    if m_lo < 1 || m_hi < m_lo {
        return Err(domain("odd_power_tail", format!("bad range [{m_lo}, {m_hi}]")));
    }
    let mut a = m_hi + 4001;
    if a % 2 == 0 {
        a += 1;
    }
    let mut tail = odd_tail_em(a as f64, k);
    let mut m = a;
    // tail holds sum over odd m' >= m.
    let mut rows = Vec::with_capacity((m_hi - m_lo + 1) as usize);
    let mut cur = m_hi + 1;
    while cur > m_lo {
        cur -= 1;
        let first_odd = if cur % 2 == 1 { cur } else { cur + 1 };
        while m > first_odd {
            m -= 2;
            tail += (m as f64).powi(-(k as i32));
        }
        rows.push(odd_power_row(cur, k, tail));
    }
    rows.reverse();
    Ok(rows)
}

pub fn odd_power_tail(m: u64, k: u32) -> Result<OddPowerTail> {
    Ok(odd_power_tail_scan(m, m, k)?.remove(0))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogSinCheck {
    pub delta_q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// -sum_{1 <= k <= x/2} log|sin(pi k / x)| <= (x/2) log 2 with x = delta q.
pub fn log_sin_sum_check(delta_q: f64) -> Result<LogSinCheck> {
    if !(delta_q > 2.0) || !delta_q.is_finite() {
        return Err(domain("log_sin_sum_check", format!("delta q must exceed 2, got {delta_q}")));
    }
    let kmax = (delta_q / 2.0).floor() as u64;
    let mut lhs = 0.0;
    for k in 1..=kmax {
        lhs -= fast::sin_pi(k as f64 / delta_q).abs().ln();
    }
    let rhs = delta_q / 2.0 * LN_2;
    let slack = 8.0 * f64::EPSILON * kmax as f64 * (1.0 + lhs.abs());
    Ok(LogSinCheck { delta_q, lhs, rhs, ok: lhs <= rhs + slack })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Theorem2Check {
    pub delta: f64,
    pub theta: f64,
    pub bf1: f64,
    pub rhs: f64,
    /// Truncated sum plus evaluation error plus tail bound.
    pub direct: f64,
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub ok: bool,
}

const THEOREM2_DEPTH: usize = 60;

/// sum_{m odd} |G(delta m)|/m against -log delta + b + D(theta) + H(delta).
pub fn theorem2_rhs_vs_direct(delta: f64, m_max: u64, bf1: f64) -> Result<Theorem2Check> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(domain("theorem2_rhs_vs_direct", format!("delta must lie in (0, 1/4), got {delta}")));
    }
    if (m_max as f64) * delta < 10.0 {
        return Err(domain("theorem2_rhs_vs_direct", "m_max * delta must be at least 10"));
    }
    let c = SmoothingConstants::f1();
    let theta = select_theta(delta);
    let (h1, h2) = compute_h(delta, &c)?;
    let rhs = -delta.ln() + bf1 + compute_d(theta, &c)? + h1 + h2;

    let odd: Vec<u64> = (1..=m_max).step_by(2).collect();
    let terms: Vec<(f64, f64)> = odd
        .par_iter()
        .map(|&m| {
            let (g, e) = g_fast(delta * m as f64, THEOREM2_DEPTH);
            (g.abs() / m as f64, e / m as f64)
        })
        .collect();
    let mut partial = 0.0;
    let mut err = 0.0;
    for (v, e) in &terms {
        partial += v;
        err += e;
    }
    err += 4.0 * f64::EPSILON * partial * (terms.len() as f64).sqrt();
    // |G(u)| <= 8 c0 / (7 u^2); sum_{m odd >= a} m^{-3} <= a^{-3} + 1/(4 a^2).
    let a = if m_max % 2 == 0 { m_max + 1 } else { m_max + 2 } as f64;
    let tail_bound = 8.0 * c.c0 / (7.0 * delta * delta) * (a.powi(-3) + 1.0 / (4.0 * a * a));
    let direct = partial + err + tail_bound;
    Ok(Theorem2Check { delta, theta, bf1, rhs, direct, partial_sum: partial, tail_bound, ok: direct <= rhs })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailDerivativeCheck {
    pub horizon: f64,
    pub max_observed: f64,
    pub argmax: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Finite-difference max of |d/du (G(u)/u)| over sampled u >= T, against
/// 8 c0/(7 T^4) + 4 c1/(3 T^3).
pub fn tail_derivative_check(horizon: f64, span: f64, samples: usize, c: &SmoothingConstants) -> Result<TailDerivativeCheck> {
    if !(horizon > 0.0 && span > 0.0 && samples >= 2) {
        return Err(domain("tail_derivative_check", "need T > 0, span > 0 and at least two samples"));
    }
    let h = 1e-5;
    let f = |u: f64| g_fast(u, THEOREM2_DEPTH).0 / u;
    let (mut best, mut arg) = (0.0f64, horizon);
    for i in 0..samples {
        let u = horizon + span * i as f64 / (samples - 1) as f64;
        let lo = (u - h).max(horizon);
        let d = (f(u + h) - f(lo)) / (u + h - lo);
        if d.abs() > best {
            best = d.abs();
            arg = u;
        }
    }
    let bound = 8.0 * c.c0 / (7.0 * horizon.powi(4)) + 4.0 * c.c1 / (3.0 * horizon.powi(3));
    Ok(TailDerivativeCheck { horizon, max_observed: best, argmax: arg, bound, ok: best <= bound })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SmallUIntegralCheck {
    pub u0: f64,
    pub integral: f64,
    pub bound: f64,
    pub ok: bool,
}

/// int_0^{u0} |(G(u) - 2)/u| du against
/// (c3 u0 / log 2)(-log u0 + log(c2/c3) + log log 2 + log 2 + 2).
pub fn small_u_integral_check(u0: f64, c: &SmoothingConstants) -> Result<SmallUIntegralCheck> {
    if !(u0 > 0.0 && u0 <= 1.0) {
        return Err(domain("small_u_integral_check", format!("u0 must lie in (0, 1], got {u0}")));
    }
    const DEPTH: usize = 120;
    let integrand = |u: f64| {
        let mut s = 0.0;
        let mut x = u;
        for _ in 0..=DEPTH {
            s += fast::f1_over_t(x);
            x *= 2.0;
        }
        s.abs()
    };
    let mut integral = 0.0;
    let mut err = 0.0;
    for j in 0..60 {
        let (a, b) = (u0 * 2f64.powi(-j - 1), u0 * 2f64.powi(-j));
        let e = adaptive_gk15(integrand, a, b, 1e-16, 30);
        integral += e.value;
        err += e.err;
    }
    // Below u0 2^-60 and beyond the depth, use |F(t)| <= min(c3 t, c2).
    let eps = u0 * 2f64.powi(-60);
    let inner = c.c3 * eps / LN_2 * (-eps.ln() + (c.c2 / c.c3).ln() + LN_2.ln() + LN_2 + 2.0);
    let deep = c.c2 * 2f64.powi(-(DEPTH as i32)) * (1.0 + (c.c3 * u0 * 2f64.powi(DEPTH as i32) / c.c2).ln());
    let integral = integral + err + inner + deep;
    let bound = c.c3 * u0 / LN_2 * (-u0.ln() + (c.c2 / c.c3).ln() + LN_2.ln() + LN_2 + 2.0);
    Ok(SmallUIntegralCheck { u0, integral, bound, ok: integral <= bound })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DerivativeConstantCheck {
    pub max_t2_abs_derivative: f64,
    pub argmax: f64,
    pub assumed_c1: f64,
    pub within_tolerance: bool,
}

/// max over sampled t >= 1 of t^2 |F1'(t)| by central differences.
pub fn derivative_constant_check(t_max: f64, samples: usize) -> DerivativeConstantCheck {
    let c1 = SmoothingConstants::f1().c1;
    let h = 1e-6;
    let (mut best, mut arg) = (0.0f64, 1.0);
    for i in 0..samples {
        let t = 1.0 + (t_max - 1.0) * i as f64 / (samples.max(2) - 1) as f64;
        let d = (fast::one_minus_f1(t - h) - fast::one_minus_f1(t + h)) / (2.0 * h);
        let v = t * t * d.abs();
        if v > best {
            best = v;
            arg = t;
        }
    }
    DerivativeConstantCheck { max_t2_abs_derivative: best, argmax: arg, assumed_c1: c1, within_tolerance: best <= c1 + 0.05 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_at_one_and_simplification() {
        let c = SmoothingConstants::f1();
        assert!((compute_d(1.0, &c).unwrap() - (LN_2 + 2.0)).abs() < 1e-15);
        assert!(((2.0 / (2.0 * LN_2)).ln() + LN_2.ln()).abs() < 1e-15);
        assert!(compute_d(0.0, &c).is_err());
        assert!(compute_d(1.5, &c).is_err());
    }

    #[test]
    fn h_small_delta_and_domain() {
        let c = SmoothingConstants::f1();
        let (h1, h2) = compute_h(1e-12, &c).unwrap();
        assert!(h1.abs() < 1e-12 && h2.abs() < 1e-11);
        assert!(compute_h(0.25, &c).is_err());
    }

    #[test]
    fn cq_rejects_small_conductors() {
        assert!(compute_cq(33.0).is_err());
        assert!(compute_cq(33.4).is_err());
        assert!(compute_cq(34.0).is_ok());
    }

    #[test]
    fn remainder_is_dominated_by_the_horizon() {
        let r = bf1_truncation_remainder(50, 1000.0, &SmoothingConstants::f1());
        assert!((r.beyond_horizon - 2.0 / 7e6).abs() < 1e-15);
        assert!(r.small_t < 1e-12);
        assert!(r.total <= BF1_TRUNCATION_BUDGET);
    }

    #[test]
    fn odd_harmonic_small_case() {
        let r = odd_harmonic_sum(4).unwrap();
        assert!((r.exact.to_f64() - 4.0 / 3.0).abs() < 1e-15);
        assert!(r.theta_in_range);
        assert!(odd_harmonic_sum(5).is_err());
    }

    #[test]
    fn log_sin_small_cases() {
        let r = log_sin_sum_check(4.0).unwrap();
        assert!((r.lhs - 0.5 * LN_2).abs() < 1e-15);
        assert!(r.ok);
        let r = log_sin_sum_check(2.5).unwrap();
        assert!((r.lhs + (PI / 2.5).sin().ln()).abs() < 1e-15);
        assert!(log_sin_sum_check(2.0).is_err());
    }
}
