//! Quadrature rules: Gauss-Legendre and adaptive Gauss-Kronrod in binary64,
//! tanh-sinh in MPFR for endpoint singularities.

use rug::float::Round;
use rug::Float;

use crate::error::{precision, Result};
use crate::precision::pi;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const GK_XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod evaluation with its embedded 7-point Gauss estimate.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_XK[j];
        let s = f(c - x) + f(c + x);
        k += GK_WK[j] * s;
        if j % 2 == 1 {
            g += GK_WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Result of an adaptive binary64 integration.
#[derive(Clone, Copy, Debug, Default)]
pub struct Estimate {
    pub value: f64,
    /// Sum of per-panel Gauss/Kronrod discrepancies.
    pub err: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod on [a, b] with recursive bisection.
pub fn adaptive_gk15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Estimate {
    let mut out = Estimate::default();
    let mut stack = vec![(a, b, abs_tol, 0u32)];
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, lo, hi);
        out.evaluations += 15;
        if e <= tol || depth >= max_depth || hi - lo <= f64::EPSILON * lo.abs().max(1e-300) * 64.0 {
            out.value += v;
            out.err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * tol, depth + 1));
            stack.push((lo, mid, 0.5 * tol, depth + 1));
        }
    }
    out
}

/// Tanh-sinh quadrature of `f` over [a, b] in MPFR arithmetic.
///
/// `f` receives the abscissa and its distance to the nearer endpoint, so
/// integrands with endpoint singularities can avoid cancellation.
/// Returns the value and the difference between the last two levels.
pub fn tanh_sinh<F>(mut f: F, a: &Float, b: &Float, prec: u32, tol: f64) -> Result<(Float, f64)>
where
    F: FnMut(&Float, &Float, bool) -> Float,
{
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + &half);
    let pi_2 = pi(prec) / 2u32;

    // Beyond y_max the complementary abscissa underflows the working precision.
    let y_max = (f64::from(prec) + 24.0) * std::f64::consts::LN_2 / 2.0;
    let t_max = (2.0 * y_max / std::f64::consts::PI).asinh();

    let center = f(&mid, &half, false);
    let mut sum = Float::with_val(prec, &center * &pi_2);

    let mut h = 1.0f64;
    let mut previous: Option<Float> = None;
    let mut level = 0u32;
    loop {
        let step = if level == 0 { 1 } else { 2 };
        let mut k = 1u64;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            let tf = Float::with_val(prec, t);
            let y = Float::with_val(prec, tf.sinh_ref()) * &pi_2;
            // c = 1 - tanh(y) = 2 / (1 + exp(2y)), computed without cancellation.
            let e2y = Float::with_val(prec, &y * 2u32).exp();
            let c = Float::with_val(prec, 2u32 / Float::with_val(prec, &e2y + 1u32));
            // w = (pi/2) cosh(t) (1 - tanh^2 y) = (pi/2) cosh(t) c (2 - c)
            let w = Float::with_val(prec, tf.cosh_ref()) * &pi_2 * &c * Float::with_val(prec, 2u32 - &c);
            let dist = Float::with_val(prec, &half * &c);
            let left = Float::with_val(prec, a + &dist);
            let right = Float::with_val(prec, b - &dist);
            let fl = f(&left, &dist, false);
            let fr = f(&right, &dist, true);
            sum += Float::with_val(prec, fl + fr) * w;
            k += step;
        }
        let estimate = Float::with_val(prec, &sum * &half) * h;
        if let Some(prev) = previous.as_ref() {
            let diff = Float::with_val(prec, &estimate - prev).abs().to_f64_round(Round::Up);
            if level >= 3 && diff <= tol {
                return Ok((estimate, diff));
            }
            if level >= 14 {
                return Err(precision("tanh_sinh", format!("no convergence: last difference {diff:e}")));
            }
        }
        previous = Some(estimate);
        h *= 0.5;
        level += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let g = GaussLegendre::new(8);
        let v = g.integrate(|x| x.powi(15) + 3.0 * x.powi(4), -1.0, 2.0);
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn gk_adaptive_handles_smooth_oscillation() {
        let r = adaptive_gk15(|x| (10.0 * x).sin(), 0.0, 3.0, 1e-14, 30);
        let exact = (1.0 - 30f64.cos()) / 10.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_absorbs_log_singularity() {
        let prec = 200;
        let a = Float::new(prec);
        let b = Float::with_val(prec, 1);
        let (v, _) = tanh_sinh(
            |x, d, right| {
                let x = if right { x.clone() } else { d.clone() };
                Float::with_val(prec, x.ln_ref())
            },
            &a,
            &b,
            prec,
            1e-50,
        )
        .unwrap();
        assert!((v + 1u32).abs() < 1e-50);
    }
}
