//! Gauss sums and L(1, chi) for even primitive chi, by the finite closed form
//! (MPFR) and by the smoothed series with the finite log-sine correction
//! (binary64).

use std::collections::BTreeMap;

use rug::Float;

use super::arith::gcd;
use super::character::{DirichletCharacter, Parity};
use crate::error::{domain, Result};
use crate::precision::{bits_for_digits, err_add, pi, rounding_err, PrecisionComplex, PrecisionReal};
use crate::special_functions::fast;

/// Steps between exact re-anchorings of the rotation e(a/(2q)).
const ANCHOR: u64 = 64;

/// e(a/q) and 2 sin(pi a/q) for 0 < a < q, shared by every character mod q.
pub struct ModulusTables {
    q: u64,
    prec: u32,
    /// 2 sin(pi a / q), index a.
    sines: Vec<Float>,
    /// e(a / q) as (cos, sin), index a.
    roots: Vec<(Float, Float)>,
    /// Absolute radius of every root entry.
    root_err: f64,
    /// Relative radius of every sine entry.
    sine_rel_err: f64,
}

impl ModulusTables {
    pub fn new(q: u64, digits: u32) -> Result<Self> {
        if q < 3 {
            return Err(domain("ModulusTables", format!("modulus must be at least 3, got {q}")));
        }
        let qf = q as f64;
        let extra = (qf * qf * 10.0 * ANCHOR as f64).log2().ceil() as u32 + 4;
        let prec = bits_for_digits(digits) + extra;
        let ulp = 2f64.powi(1 - prec as i32);
        let pi = pi(prec);
        let half = q / 2;
        let mut sines = vec![Float::new(prec); q as usize];
        let mut roots = vec![(Float::new(prec), Float::new(prec)); q as usize];
        // z = e(a/(2q)); step = e(1/(2q)).
        let anchor = |a: u64| {
            let arg = Float::with_val(prec, &pi * a) / q;
            let (s, c) = arg.sin_cos(Float::new(prec));
            (c, s)
        };
        let step = anchor(1);
        let mut z = anchor(0);
        for a in 0..=half {
            if a % ANCHOR == 0 {
                z = anchor(a);
            }
            if a > 0 {
                let s2 = Float::with_val(prec, &z.1 * 2u32);
                let re = Float::with_val(prec, &z.0 * &z.0 - &z.1 * &z.1);
                let im = Float::with_val(prec, &z.0 * &z.1) * 2u32;
                sines[a as usize] = s2.clone();
                roots[a as usize] = (re.clone(), im.clone());
                if a != q - a {
                    sines[(q - a) as usize] = s2;
                    roots[(q - a) as usize] = (re, -im);
                }
            }
            let (c, s) = &z;
            let re = Float::with_val(prec, c * &step.0 - s * &step.1);
            let im = Float::with_val(prec, c * &step.1 + s * &step.0);
            z = (re, im);
        }
        // Anchor error (pi + 2) ulp, then each rotation adds the step error
        // plus four roundings.
        let z_err = (6.0 + 10.0 * ANCHOR as f64) * ulp;
        let root_err = 3.0 * z_err;
        // 2 sin(pi a/q) >= 4/q.
        let sine_rel_err = (2.0 * z_err + ulp) * qf / 4.0;
        Ok(Self { q, prec, sines, roots, root_err, sine_rel_err })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }
}

/// Per value class k of chi (chi(a) = e(k/N)): sum of e(a/q) and the product
/// of 2 sin(pi a/q).
struct ClassSums {
    n: u64,
    classes: BTreeMap<u64, (u64, Float, Float, Float)>,
}

fn class_sums(chi: &DirichletCharacter, t: &ModulusTables) -> ClassSums {
    let q = t.q;
    let prec = t.prec;
    let mut classes: BTreeMap<u64, (u64, Float, Float, Float)> = BTreeMap::new();
    for a in 1..q {
        let Some(k) = chi.index(a) else { continue };
        let e = classes
            .entry(k)
            .or_insert_with(|| (0, Float::with_val(prec, 1), Float::new(prec), Float::new(prec)));
        e.0 += 1;
        e.1 *= &t.sines[a as usize];
        e.2 += &t.roots[a as usize].0;
        e.3 += &t.roots[a as usize].1;
    }
    ClassSums { n: chi.group().exponent(), classes }
}

/// e(k/n) at precision prec with its radius.
fn unit_root(k: u64, n: u64, prec: u32) -> PrecisionComplex {
    let arg = Float::with_val(prec, pi(prec) * (2 * k)) / n;
    let (s, c) = arg.sin_cos(Float::new(prec));
    PrecisionComplex::new(c, s, 10.0 * 2f64.powi(1 - prec as i32))
}

fn tau_from(sums: &ClassSums, t: &ModulusTables) -> PrecisionComplex {
    let prec = t.prec;
    let ulp = 2f64.powi(1 - prec as i32);
    let mut tau = PrecisionComplex::new(Float::new(prec), Float::new(prec), 0.0);
    for (&k, (cnt, _, re, im)) in &sums.classes {
        let c = *cnt as f64;
        let err = c * t.root_err + 2.0 * c * c * ulp;
        let e = PrecisionComplex::new(re.clone(), im.clone(), err);
        tau = tau.add(&unit_root(k, sums.n, prec).mul(&e));
    }
    tau
}

/// tau(chi) = sum_a chi(a) e(a/q) for primitive chi.
pub fn gauss_sum(chi: &DirichletCharacter, digits: u32) -> Result<PrecisionComplex> {
    let t = ModulusTables::new(chi.modulus(), digits)?;
    gauss_sum_with(chi, &t)
}

pub fn gauss_sum_with(chi: &DirichletCharacter, t: &ModulusTables) -> Result<PrecisionComplex> {
    check_tables(chi, t)?;
    if !chi.is_primitive() {
        return Err(domain("gauss_sum", format!("{chi:?} is not primitive")));
    }
    Ok(tau_from(&class_sums(chi, t), t))
}

fn check_tables(chi: &DirichletCharacter, t: &ModulusTables) -> Result<()> {
    if t.q != chi.modulus() {
        return Err(domain("L-value tables", format!("tables for {} used with modulus {}", t.q, chi.modulus())));
    }
    Ok(())
}

/// L(1, chi) and tau(chi) from one pass over the residues.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub l1: PrecisionComplex,
    pub tau: PrecisionComplex,
}

/// L(1, chi) = -(tau(chi)/q) sum_a conj(chi(a)) log(2 sin(pi a/q)).
pub fn l1_closed_form(chi: &DirichletCharacter, digits: u32) -> Result<PrecisionComplex> {
    let t = ModulusTables::new(chi.modulus(), digits)?;
    Ok(l1_closed_form_with(chi, &t)?.l1)
}

pub fn l1_closed_form_with(chi: &DirichletCharacter, t: &ModulusTables) -> Result<ClosedForm> {
    check_tables(chi, t)?;
    if chi.parity() != Parity::Even || !chi.is_primitive() {
        return Err(domain("L1_closed_form", format!("{chi:?} must be even and primitive")));
    }
    let prec = t.prec;
    let ulp = 2f64.powi(1 - prec as i32);
    let sums = class_sums(chi, t);
    let tau = tau_from(&sums, t);
    let mut acc = PrecisionComplex::new(Float::new(prec), Float::new(prec), 0.0);
    for (&k, (cnt, prod, _, _)) in &sums.classes {
        let c = *cnt as f64;
        let rel = c * (t.sine_rel_err + ulp);
        let lg = Float::with_val(prec, prod.ln_ref());
        // |log(1 + x)| <= 2|x| for |x| <= 1/2.
        let err = err_add(2.0 * rel, rounding_err(&lg));
        let lg = PrecisionReal::new(lg, err);
        let conj_root = unit_root((sums.n - k) % sums.n, sums.n, prec);
        acc = acc.add(&conj_root.scale(&lg));
    }
    let minus_inv_q = PrecisionReal::new(Float::with_val(prec, -1) / chi.modulus(), 0.0);
    let minus_inv_q = minus_inv_q.clone().widen(rounding_err(minus_inv_q.value()));
    let l1 = tau.mul(&acc).scale(&minus_inv_q);
    Ok(ClosedForm { l1, tau })
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// delta = 1/(sqrt(q) log 2).
pub fn default_delta(q: u64) -> f64 {
    1.0 / ((q as f64).sqrt() * std::f64::consts::LN_2)
}

/// Smallest n_max with tail bound 1/(2 delta^2 n_max^2) <= target.
pub fn n_max_for(delta: f64, target: f64) -> u64 {
    (1.0 / (delta * (2.0 * target).sqrt())).ceil() as u64
}

/// Residue-class sums R[r] = sum_{n <= N, n = r mod q} (1 - F1(delta n))/n.
pub struct SmoothedWeights {
    q: u64,
    delta: f64,
    n_max: u64,
    by_residue: Vec<f64>,
    abs_sum: f64,
    err: f64,
}

impl SmoothedWeights {
    pub fn new(q: u64, delta: f64, n_max: u64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(domain("L1_via_eq13", format!("delta must be positive, got {delta}")));
        }
        if q < 3 || n_max < q {
            return Err(domain("L1_via_eq13", format!("need q >= 3 and n_max >= q, got q={q}, n_max={n_max}")));
        }
        let mut acc = vec![Neumaier::default(); q as usize];
        let mut abs_sum = 0.0;
        for n in 1..=n_max {
            let w = fast::one_minus_f1(delta * n as f64) / n as f64;
            acc[(n % q) as usize].add(w);
            abs_sum += w.abs();
        }
        let by_residue: Vec<f64> = acc.iter().map(Neumaier::value).collect();
        // Pointwise error ABS_ERR/n summed, plus compensated-sum residue.
        let err = fast::ABS_ERR * ((n_max as f64).ln() + 1.0) + 4.0 * f64::EPSILON * abs_sum;
        Ok(Self { q, delta, n_max, by_residue, abs_sum, err })
    }

    /// sum_{n > N} |1 - F1(delta n)|/n <= 1/(2 delta^2 N^2) from |1 - F1(t)| <= 1/t^2.
    pub fn tail_bound(&self) -> f64 {
        let nf = self.n_max as f64;
        1.0 / (2.0 * self.delta * self.delta * nf * nf)
    }
}

/// L(1, chi) as sum_n (1 - F1(delta n)) chi(n)/n
/// - (2 tau(chi)/q) sum_{1 <= m <= delta q/2} conj(chi(m)) log|sin(pi m/(delta q))|,
/// entirely in binary64, including its own Gauss sum.
pub fn l1_via_eq13(chi: &DirichletCharacter, delta: f64, n_max: u64, target_err: f64) -> Result<PrecisionComplex> {
    let w = SmoothedWeights::new(chi.modulus(), delta, n_max)?;
    l1_via_eq13_with(chi, &w, target_err)
}

pub fn l1_via_eq13_with(chi: &DirichletCharacter, w: &SmoothedWeights, target_err: f64) -> Result<PrecisionComplex> {
    let q = chi.modulus();
    if w.q != q {
        return Err(domain("L1_via_eq13", format!("weights for {} used with modulus {q}", w.q)));
    }
    if chi.parity() != Parity::Even || !chi.is_primitive() {
        return Err(domain("L1_via_eq13", format!("{chi:?} must be even and primitive")));
    }
    let tail = w.tail_bound();
    if tail > target_err {
        return Err(domain("L1_via_eq13", format!("tail bound {tail:e} exceeds requested error {target_err:e}")));
    }
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    let (mut tre, mut tim) = (Neumaier::default(), Neumaier::default());
    for a in 1..q {
        if gcd(a, q) != 1 {
            continue;
        }
        let (c, s) = chi.value(a).to_c64();
        let r = w.by_residue[a as usize];
        re.add(c * r);
        im.add(s * r);
        let (ec, es) = (fast::sin_pi(2.0 * a as f64 / q as f64 + 0.5), fast::sin_pi(2.0 * a as f64 / q as f64));
        tre.add(c * ec - s * es);
        tim.add(c * es + s * ec);
    }
    let (tau_re, tau_im) = (tre.value(), tim.value());
    let dq = w.delta * q as f64;
    let m_max = (dq / 2.0).floor() as u64;
    let (mut lre, mut lim) = (Neumaier::default(), Neumaier::default());
    let mut log_abs = 0.0;
    for m in 1..=m_max {
        if gcd(m, q) != 1 {
            continue;
        }
        let (c, s) = chi.value(m).to_c64();
        let lg = fast::sin_pi(m as f64 / dq).abs().ln();
        lre.add(c * lg);
        lim.add(-s * lg);
        log_abs += lg.abs();
    }
    let k = 2.0 / q as f64;
    let (pr, pi_) = (lre.value(), lim.value());
    let corr_re = -k * (tau_re * pr - tau_im * pi_);
    let corr_im = -k * (tau_re * pi_ + tau_im * pr);
    let value_re = re.value() + corr_re;
    let value_im = im.value() + corr_im;
    let qf = q as f64;
    // tau carries about 4 eps per residue, the log-sine sum about 4 eps relative.
    let eps4 = 4.0 * f64::EPSILON;
    let err = tail + w.err + eps4 * w.abs_sum + k * log_abs * eps4 * (qf.sqrt() + qf);
    let prec = 64;
    Ok(PrecisionComplex::new(Float::with_val(prec, value_re), Float::with_val(prec, value_im), err))
}
