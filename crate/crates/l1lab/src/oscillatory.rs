//! Sine moments I_f(s) = int_0^{1/2} f(v) sin(2 pi s v) dv of the kernels
//! psi and phi.
//!
//! Two independent routes: half-period panels with Gauss-Legendre, and the
//! endpoint expansion from repeated integration by parts. Both kernels are
//! odd and analytic at v = 0 apart from the 1/(2 pi v) pole of phi, whose
//! sine integral contributes the constant 1/4; only v = 1/2 feeds the
//! expansion.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::quadrature::GaussLegendre;
use crate::special_functions::{fast::sin_pi, phi_unchecked, psi_unchecked};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Psi,
    Phi,
}

impl Kernel {
    fn eval(self, v: f64) -> f64 {
        match self {
            Kernel::Psi => psi_unchecked(v),
            Kernel::Phi => phi_unchecked(v),
        }
    }

    /// lim_{s -> inf} I_f(s).
    fn limit(self) -> f64 {
        match self {
            Kernel::Psi => 0.0,
            Kernel::Phi => 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub err: f64,
}

/// Below this angular frequency the panel route is used.
pub const ASYMPTOTIC_MIN_OMEGA: f64 = 96.0;

const TAYLOR_ORDER: usize = 96;

/// Derivatives f^{(n)}(1/2) for n < TAYLOR_ORDER.
fn endpoint_derivatives(kernel: Kernel) -> &'static [f64] {
    static PSI: OnceLock<Vec<f64>> = OnceLock::new();
    static PHI: OnceLock<Vec<f64>> = OnceLock::new();
    let cell = match kernel {
        Kernel::Psi => &PSI,
        Kernel::Phi => &PHI,
    };
    cell.get_or_init(|| build_derivatives(kernel))
}

fn build_derivatives(kernel: Kernel) -> Vec<f64> {
    // tan x = sum t_j x^j with (n+1) t_{n+1} = [n = 0] + sum_i t_i t_{n-i}.
    let n_max = TAYLOR_ORDER + 1;
    let mut t = vec![0.0f64; n_max + 1];
    for n in 0..n_max {
        let mut acc = if n == 0 { 1.0 } else { 0.0 };
        for i in 0..=n {
            acc += t[i] * t[n - i];
        }
        t[n + 1] = acc / (n as f64 + 1.0);
    }
    // psi(1/2 + s) = -tan(pi s) - pi (1/2 + s) sec^2(pi s)
    // phi(1/2 + s) = -tan(pi s) - (pi/2)(1/2 + s) sec^2(pi s)
    let mut out = Vec::with_capacity(TAYLOR_ORDER);
    let mut pi_n = 1.0;
    let mut fact = 1.0;
    for n in 0..TAYLOR_ORDER {
        let nf = n as f64;
        let c = match kernel {
            Kernel::Psi => -(nf + 1.0) * pi_n * (t[n] + PI / 2.0 * t[n + 1]),
            Kernel::Phi => -pi_n * (t[n] * (1.0 + nf / 2.0) + PI / 4.0 * (nf + 1.0) * t[n + 1]),
        };
        out.push(c * fact);
        pi_n *= PI;
        fact *= nf + 1.0;
    }
    out
}

/// I_f(s) by Gauss-Legendre on half-periods of sin(2 pi s v).
pub fn sine_moment_panels(kernel: Kernel, s: f64) -> Moment {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    let (fine, coarse) = RULES.get_or_init(|| (GaussLegendre::new(24), GaussLegendre::new(16)));
    if s == 0.0 {
        return Moment::default();
    }
    let omega = 2.0 * PI * s;
    let panels = s.abs().ceil().max(1.0) as usize;
    let width = 0.5 / panels as f64;
    let integrand = |v: f64| kernel.eval(v) * (omega * v).sin();
    let (mut hi, mut lo, mut mag) = (0.0, 0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * width;
        let b = if p + 1 == panels { 0.5 } else { a + width };
        let f = fine.integrate(integrand, a, b);
        hi += f;
        lo += coarse.integrate(integrand, a, b);
        mag += f.abs();
    }
    Moment { value: hi, err: (hi - lo).abs() + 32.0 * f64::EPSILON * mag }
}

/// I_f(s) from the endpoint expansion at v = 1/2, valid for large 2 pi s.
pub fn sine_moment_asymptotic(kernel: Kernel, s: f64) -> Moment {
    let omega = 2.0 * PI * s;
    let d = endpoint_derivatives(kernel);
    // omega / 2 = pi s, reduced exactly.
    let sn = sin_pi(s);
    let cs = sin_pi(s + 0.5);
    let inv = 1.0 / omega;
    let inv2 = inv * inv;
    let mut value = kernel.limit();
    let mut mag = value.abs();
    let mut scale = inv;
    let mut prev = f64::INFINITY;
    let mut err = f64::INFINITY;
    let mut k = 0;
    while 2 * k + 1 < d.len() {
        let term = scale * (-d[2 * k] * cs + d[2 * k + 1] * sn * inv);
        let size = scale.abs() * (d[2 * k].abs() + d[2 * k + 1].abs() * inv);
        if size > prev {
            err = prev;
            break;
        }
        value += term;
        mag += term.abs();
        prev = size;
        if size <= 1e-18 * mag {
            err = size;
            break;
        }
        scale *= -inv2;
        k += 1;
    }
    if !err.is_finite() {
        err = prev;
    }
    Moment { value, err: 2.0 * err + 8.0 * f64::EPSILON * mag }
}

pub fn sine_moment(kernel: Kernel, s: f64) -> Moment {
    if 2.0 * PI * s.abs() < ASYMPTOTIC_MIN_OMEGA {
        sine_moment_panels(kernel, s)
    } else {
        sine_moment_asymptotic(kernel, s)
    }
}
