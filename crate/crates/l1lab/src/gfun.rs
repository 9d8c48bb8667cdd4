//! G(u) = sum_{l>=0} (1 - F1(2^l u)) / 2^l and the two grid certificates on
//! the signs of G' and of d/du[(G(u) - 2)/u].

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::oscillatory::{sine_moment, Kernel, Moment};
use crate::precision::{bits_for_digits, err_add, PrecisionReal};
use crate::special_functions::{eval_f1, fast};

/// Lower end of the positivity range.
pub const U0: f64 = 1e-5;

pub const LEMMA6_DEPTH: usize = 15;
pub const LEMMA7_DEPTH: usize = 21;
pub const DEFAULT_GRID_STEPS: usize = 4096;

/// Thresholds as printed with the two positivity statements.
pub const LEMMA6_STATED_THRESHOLD: f64 = -0.0001353;
pub const LEMMA7_STATED_THRESHOLD: f64 = 0.0000019;
/// Acceptance tolerances for the same two statements.
pub const LEMMA6_ACCEPT_THRESHOLD: f64 = -1.3e-4;
pub const LEMMA7_ACCEPT_THRESHOLD: f64 = 1.5e-6;

/// Log-spaced grid on [u_min, u_max].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub u_min: f64,
    pub u_max: f64,
    pub steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { u_min: U0, u_max: 1.0, steps: DEFAULT_GRID_STEPS }
    }
}

impl GridSpec {
    pub fn single(u: f64) -> Self {
        Self { u_min: u, u_max: u, steps: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(domain("GridSpec", "grid needs at least one point"));
        }
        if !(self.u_min > 0.0 && self.u_max >= self.u_min && self.u_max.is_finite()) {
            return Err(domain("GridSpec", format!("bad range [{}, {}]", self.u_min, self.u_max)));
        }
        if self.steps == 1 && self.u_min != self.u_max {
            return Err(domain("GridSpec", "a one-point grid needs u_min = u_max"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.u_min];
        }
        let (a, b) = (self.u_min.ln(), self.u_max.ln());
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    self.u_min
                } else if i == n {
                    self.u_max
                } else {
                    (a + (b - a) * i as f64 / n as f64).exp()
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GEvalConfig {
    /// Truncation depth L.
    pub depth: usize,
    pub digits: u32,
    pub grid: GridSpec,
}

impl GEvalConfig {
    pub fn lemma6() -> Self {
        Self { depth: LEMMA6_DEPTH, digits: crate::precision::DEFAULT_SCAN_DIGITS, grid: GridSpec::default() }
    }

    pub fn lemma7() -> Self {
        Self { depth: LEMMA7_DEPTH, digits: crate::precision::DEFAULT_SCAN_DIGITS, grid: GridSpec::default() }
    }
}

/// Bound on sum_{l > L} |1 - F1(2^l u)| / 2^l, zero when every omitted
/// argument is an integer (then each omitted term vanishes exactly).
pub fn g_tail_bound(u: f64, depth: usize) -> f64 {
    let first = 2f64.powi(depth as i32 + 1) * u;
    if first.fract() == 0.0 {
        return 0.0;
    }
    // |1 - F1(t)| <= min(1, 1/t^2).
    let geometric = 2f64.powi(-(depth as i32));
    let decay = 8.0 / 7.0 * 2f64.powi(-3 * (depth as i32 + 1)) / (u * u);
    geometric.min(decay).next_up()
}

/// G truncated at depth L with the tail folded into the error radius.
pub fn eval_g(u: f64, cfg: &GEvalConfig) -> Result<PrecisionReal> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(domain("eval_G", format!("u must be positive, got {u}")));
    }
    let prec = bits_for_digits(cfg.digits);
    let mut acc = PrecisionReal::exact(Float::new(prec));
    let one = PrecisionReal::exact(Float::with_val(prec, 1));
    for l in 0..=cfg.depth {
        let t = u * 2f64.powi(l as i32);
        let f = eval_f1(t, cfg.digits)?.value;
        let term = &one - &f;
        let scaled = PrecisionReal::new(Float::with_val(prec, term.value() >> l as u32), term.err() / 2f64.powi(l as i32));
        acc = &acc + &scaled;
    }
    Ok(acc.widen(g_tail_bound(u, cfg.depth)))
}

/// Binary64 G with its error radius (evaluation error plus tail bound).
pub fn g_fast(u: f64, depth: usize) -> (f64, f64) {
    let mut s = 0.0;
    let mut scale = 1.0;
    for l in 0..=depth {
        s += fast::one_minus_f1(u * 2f64.powi(l as i32)) * scale;
        scale *= 0.5;
    }
    (s, 2.0 * fast::ABS_ERR + 4.0 * f64::EPSILON * s.abs() + g_tail_bound(u, depth))
}

/// Bracketed sum and the bound for what truncation leaves out.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub u: f64,
    pub s: PrecisionReal,
    pub r_bound: f64,
}

fn kernel_sum(kernel: Kernel, u: f64, depth: usize) -> Moment {
    let mut value = 0.0;
    let mut err = 0.0;
    let mut scale = 1.0;
    for l in 0..=depth {
        // sin(2^{l+1} pi u v) = sin(2 pi s v) with s = 2^l u.
        let m = sine_moment(kernel, u * 2f64.powi(l as i32));
        value += scale * m.value;
        err += scale * m.err;
        scale *= 0.5;
    }
    Moment { value, err: err + 4.0 * f64::EPSILON * (depth as f64 + 1.0) * value.abs() }
}

/// pi^4 u / (504 2^{3L}) + (pi^3/48)(2^{-L} - 1/(7 2^{3L})).
pub fn r_bound(u: f64, depth: usize) -> f64 {
    use std::f64::consts::PI;
    let l3 = 2f64.powi(3 * depth as i32);
    PI.powi(4) * u / (504.0 * l3) + PI.powi(3) / 48.0 * (2f64.powi(-(depth as i32)) - 1.0 / (7.0 * l3))
}

/// pi^2 u / 2^{L+3} + pi (L+2) log 2 / 2^{L+3}.
pub fn r_tilde_bound(u: f64, depth: usize) -> f64 {
    use std::f64::consts::{LN_2, PI};
    let d = 2f64.powi(depth as i32 + 3);
    PI * PI * u / d + PI * (depth as f64 + 2.0) * LN_2 / d
}

/// S_L(u) = sum_{l<=L} int_0^{1/2} psi(v) sin(2^{l+1} pi u v)/2^l dv.
pub fn s_r_decomposition(u: f64, depth: usize) -> Result<Decomposition> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(domain("S_R_decomposition", format!("u must be positive, got {u}")));
    }
    let m = kernel_sum(Kernel::Psi, u, depth);
    Ok(Decomposition { u, s: PrecisionReal::from_f64(m.value, m.err), r_bound: r_bound(u, depth) })
}

/// Same with the kernel phi.
pub fn s_tilde_r_decomposition(u: f64, depth: usize) -> Result<Decomposition> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(domain("S_tilde_R_decomposition", format!("u must be positive, got {u}")));
    }
    let m = kernel_sum(Kernel::Phi, u, depth);
    Ok(Decomposition { u, s: PrecisionReal::from_f64(m.value, m.err), r_bound: r_tilde_bound(u, depth) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    MaxAtMost,
    MinAtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridValue {
    pub u: f64,
    pub s: f64,
    pub s_err: f64,
    pub r_bound: f64,
    /// s + r_bound for the max direction, s - r_bound for the min direction.
    pub combined: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityCertificate {
    pub depth: usize,
    pub grid: Vec<f64>,
    pub values: Vec<GridValue>,
    pub extremum: PrecisionReal,
    pub argument: f64,
    pub threshold: f64,
    pub stated_threshold: f64,
    pub direction: Direction,
    pub passed: bool,
    pub stated_threshold_met: bool,
}

fn certify(
    cfg: &GEvalConfig,
    direction: Direction,
    threshold: f64,
    stated_threshold: f64,
    eval: fn(f64, usize) -> Result<Decomposition>,
) -> Result<PositivityCertificate> {
    cfg.grid.validate()?;
    let grid = cfg.grid.points();
    let values: Vec<GridValue> = grid
        .par_iter()
        .map(|&u| {
            let d = eval(u, cfg.depth)?;
            let s = d.s.to_f64();
            let combined = match direction {
                Direction::MaxAtMost => s + d.r_bound,
                Direction::MinAtLeast => s - d.r_bound,
            };
            Ok(GridValue { u, s, s_err: d.s.err(), r_bound: d.r_bound, combined })
        })
        .collect::<Result<_>>()?;
    let pick = |a: &&GridValue, b: &&GridValue| a.combined.total_cmp(&b.combined);
    let best = match direction {
        Direction::MaxAtMost => values.iter().max_by(pick),
        Direction::MinAtLeast => values.iter().min_by(pick),
    }
    .expect("grid is non-empty");
    let worst_err = values.iter().map(|v| v.s_err).fold(0.0, f64::max);
    let extremum = PrecisionReal::from_f64(best.combined, err_add(worst_err, f64::EPSILON * best.combined.abs()));
    let clears = |c: f64| match direction {
        Direction::MaxAtMost => extremum.certified_le(c),
        Direction::MinAtLeast => extremum.certified_ge(c),
    };
    Ok(PositivityCertificate {
        depth: cfg.depth,
        argument: best.u,
        passed: clears(threshold),
        stated_threshold_met: clears(stated_threshold),
        grid,
        values,
        extremum,
        threshold,
        stated_threshold,
        direction,
    })
}

/// max over the grid of S_L(u) + R_L bound, certified against `threshold`.
pub fn verify_lemma6(cfg: &GEvalConfig, threshold: f64) -> Result<PositivityCertificate> {
    certify(cfg, Direction::MaxAtMost, threshold, LEMMA6_STATED_THRESHOLD, s_r_decomposition)
}

/// min over the grid of S~_L(u) - R~_L bound, certified against `threshold`.
pub fn verify_lemma7(cfg: &GEvalConfig, threshold: f64) -> Result<PositivityCertificate> {
    certify(cfg, Direction::MinAtLeast, threshold, LEMMA7_STATED_THRESHOLD, s_tilde_r_decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_points_vanish_exactly() {
        let cfg = GEvalConfig { depth: 15, digits: 30, grid: GridSpec::default() };
        for u in [1.0, 2.0, 0.5 * 6.0] {
            let g = eval_g(u, &cfg).unwrap();
            assert_eq!(g.to_f64(), 0.0);
            assert_eq!(g.err(), 0.0);
        }
    }

    #[test]
    fn tail_bound_values() {
        assert!((r_bound(1.0, 15) - 1.9713e-5).abs() < 1e-8);
        assert!((r_tilde_bound(1.0, 21) - 3.5735e-6).abs() < 1e-9);
    }

    #[test]
    fn fast_g_matches_mp_g() {
        let cfg = GEvalConfig { depth: 20, digits: 25, grid: GridSpec::default() };
        for u in [1e-4, 0.03, 0.5, 0.77, 3.3] {
            let mp = eval_g(u, &cfg).unwrap();
            let (f, e) = g_fast(u, 20);
            assert!((mp.to_f64() - f).abs() <= e + mp.err(), "u={u}");
        }
    }

    #[test]
    fn grid_spec_rejects_empty() {
        let g = GridSpec { steps: 0, ..GridSpec::default() };
        assert!(g.validate().is_err());
        assert_eq!(GridSpec::default().points().len(), DEFAULT_GRID_STEPS);
    }
}
