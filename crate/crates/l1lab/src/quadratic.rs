//! Real quadratic fields by fundamental discriminant: Kronecker characters,
//! fundamental units from continued fractions, class numbers from L(1, chi_q),
//! and an independent count of reduced indefinite forms.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::Serialize;

use crate::dirichlet::arith::{is_squarefree, kronecker};
use crate::dirichlet::{l1_closed_form_with, DirichletCharacter, ModulusTables, Parity, UnitGroup};
use crate::error::{domain, precision, Result};
use crate::precision::{bits_for_digits, rounding_err, PrecisionReal, DEFAULT_SCAN_DIGITS};

/// The constant in the intermediate inequality for h.
pub const THEOREM3_CHAIN_CONSTANT: f64 = 0.04038;
/// From this discriminant on the chain inequality is checked.
pub const THEOREM3_CHAIN_START: u64 = 24572;
const MAX_DIGITS: u32 = 400;

pub fn is_fundamental_discriminant(q: u64) -> bool {
    if q <= 1 {
        return false;
    }
    match q % 4 {
        1 => is_squarefree(q),
        0 => {
            let m = q / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

fn check_fundamental(op: &'static str, q: u64) -> Result<()> {
    if is_fundamental_discriminant(q) {
        Ok(())
    } else {
        Err(domain(op, format!("{q} is not a fundamental discriminant > 1")))
    }
}

/// (q / .) as a character mod q.
pub fn kronecker_character(q: u64) -> Result<DirichletCharacter> {
    check_fundamental("kronecker_character", q)?;
    kronecker_in(Arc::new(UnitGroup::new(q)?), q)
}

fn kronecker_in(group: Arc<UnitGroup>, q: u64) -> Result<DirichletCharacter> {
    let exps: Vec<u64> = group
        .generators()
        .iter()
        .map(|g| if kronecker(q as i64, g.residue) == 1 { 0 } else { g.order / 2 })
        .collect();
    let chi = DirichletCharacter::new(group, exps)?;
    if !chi.is_primitive() || chi.parity() != Parity::Even {
        return Err(domain("kronecker_character", format!("character for {q} is not even and primitive")));
    }
    Ok(chi)
}

/// epsilon = (x + y sqrt(q))/2 with x^2 - q y^2 = 4 norm.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalUnit {
    #[serde(serialize_with = "ser_int")]
    pub x: Integer,
    #[serde(serialize_with = "ser_int")]
    pub y: Integer,
    pub norm: i32,
    pub log_epsilon: PrecisionReal,
}

fn ser_int<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Walks the continued fraction of omega ((1 + sqrt q)/2 or sqrt(q/4)) until
/// a convergent h/k gives a unit h - k omega.
fn unit_coordinates(q: u64) -> (Integer, Integer, i32) {
    let one_mod_4 = q % 4 == 1;
    let radicand = if one_mod_4 { q } else { q / 4 } as i64;
    let r = (radicand as f64).sqrt() as i64;
    let r = (r - 2..=r + 2).filter(|x| *x >= 0 && x * x <= radicand).max().expect("isqrt");
    let (mut p, mut qq) = if one_mod_4 { (1i64, 2i64) } else { (0, 1) };
    let (mut h1, mut h2) = (Integer::from(1), Integer::from(0));
    let (mut k1, mut k2) = (Integer::from(0), Integer::from(1));
    let c = Integer::from((q as i64 - 1) / 4);
    loop {
        let a = (p + r) / qq;
        let h = Integer::from(&h1 * a) + &h2;
        let k = Integer::from(&k1 * a) + &k2;
        let norm = if one_mod_4 {
            Integer::from(&h * &h) - Integer::from(&h * &k) - Integer::from(&k * &k) * &c
        } else {
            Integer::from(&h * &h) - Integer::from(&k * &k) * radicand
        };
        if norm == 1 || norm == -1 {
            let n = norm.to_i32().expect("unit norm");
            return if one_mod_4 {
                (Integer::from(&h * 2) - &k, k, n)
            } else {
                (Integer::from(&h * 2), k, n)
            };
        }
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
        p = a * qq - p;
        qq = (radicand - p * p) / qq;
    }
}

pub fn fundamental_unit(q: u64, digits: u32) -> Result<FundamentalUnit> {
    check_fundamental("fundamental_unit", q)?;
    let (x, y, norm) = unit_coordinates(q);
    let check = Integer::from(&x * &x) - Integer::from(&y * &y) * q;
    if check != 4 * norm {
        return Err(precision("fundamental_unit", format!("norm equation failed for {q}")));
    }
    let prec = bits_for_digits(digits) + 16;
    let root = Float::with_val(prec, q).sqrt();
    let eps = Float::with_val(prec, Float::with_val(prec, &root * &y) + &x) / 2u32;
    let log = Float::with_val(prec, eps.ln_ref());
    // Relative error of eps is at most 4 ulp, so log is off by that plus its own rounding.
    let err = 8.0 * 2f64.powi(1 - prec as i32) + rounding_err(&log);
    Ok(FundamentalUnit { x, y, norm, log_epsilon: PrecisionReal::new(log, err) })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticField {
    pub q: u64,
    pub unit: FundamentalUnit,
    pub l1: PrecisionReal,
    pub h: u64,
    /// |sqrt(q) L1 / (2 log eps) - h|
    pub residual: f64,
    pub digits_used: u32,
    /// eps >= (sqrt(q - 4) + sqrt(q))/2
    pub unit_lower_bound_ok: bool,
}

fn class_number_at(q: u64, chi: &DirichletCharacter, digits: u32) -> Result<QuadraticField> {
    let tables = ModulusTables::new(q, digits)?;
    let l1 = l1_closed_form_with(chi, &tables)?.l1.re_part();
    let unit = fundamental_unit(q, digits)?;
    let prec = tables.prec();
    let root = PrecisionReal::new(Float::with_val(prec, q).sqrt(), 0.0);
    let root = root.clone().widen(rounding_err(root.value()));
    let two_log = &unit.log_epsilon + &unit.log_epsilon;
    let ratio = (&root * &l1)
        .checked_div(&two_log)
        .ok_or_else(|| precision("class_number", format!("log eps not separated from 0 for {q}")))?;
    let approx = ratio.to_f64();
    let h = approx.round();
    let residual = (approx - h).abs() + ratio.err();
    if h < 1.0 || residual >= 0.1 {
        return Err(precision("class_number", format!("residual {residual} for {q} at {digits} digits")));
    }
    let qf = q as f64;
    let lower = (((qf - 4.0).sqrt() + qf.sqrt()) / 2.0).ln();
    let unit_lower_bound_ok = unit.log_epsilon.to_f64() + unit.log_epsilon.err() >= lower * (1.0 - 1e-15);
    Ok(QuadraticField { q, unit, l1, h: h as u64, residual, digits_used: digits, unit_lower_bound_ok })
}

/// h = sqrt(q) L(1, chi_q) / (2 log eps_q), raising digits until the
/// rounding residual is below 0.1.
pub fn class_number(q: u64, digits: u32) -> Result<QuadraticField> {
    let chi = kronecker_character(q)?;
    let mut d = digits.max(10);
    loop {
        match class_number_at(q, &chi, d) {
            Ok(f) => return Ok(f),
            Err(e @ crate::Error::Precision { .. }) if d >= MAX_DIGITS => return Err(e),
            Err(crate::Error::Precision { .. }) => d *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Reduced indefinite forms (a, b, c) of discriminant q grouped into cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormClassCount {
    /// Number of cycles of reduced forms.
    pub narrow: u64,
    /// Orbits of cycles under (a, b, c) -> (-a, b, -c), the action of the
    /// principal ideal (sqrt q), whose generator has negative norm.
    pub wide: u64,
}

type Form = (i64, i64, i64);

pub fn form_class_count(q: u64) -> Result<FormClassCount> {
    check_fundamental("form_class_count", q)?;
    let d = q as i64;
    let r = (d as f64).sqrt() as i64;
    let r = (r - 2..=r + 2).filter(|x| *x >= 0 && x * x <= d).max().expect("isqrt");
    let reduced_a = |a: i64, b: i64| {
        let two_a = 2 * a.abs();
        (two_a + b) * (two_a + b) > d && (two_a - b <= 0 || (two_a - b) * (two_a - b) < d)
    };
    let mut forms: Vec<Form> = Vec::new();
    for b in 1..=r {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a_abs in 1..=ac.abs() {
            if ac % a_abs != 0 {
                continue;
            }
            for a in [a_abs, -a_abs] {
                if reduced_a(a, b) {
                    forms.push((a, b, ac / a));
                }
            }
        }
    }
    let rho = |(_, b, c): Form| -> Form {
        let m = 2 * c.abs();
        let b2 = r - (r + b).rem_euclid(m);
        (c, b2, (b2 * b2 - d) / (4 * c))
    };
    let mut cycle_of: HashMap<Form, usize> = HashMap::new();
    let mut cycles = 0usize;
    for &f in &forms {
        if cycle_of.contains_key(&f) {
            continue;
        }
        let mut g = f;
        loop {
            cycle_of.insert(g, cycles);
            g = rho(g);
            if g == f {
                break;
            }
            if cycle_of.contains_key(&g) {
                return Err(precision("form_class_count", format!("reduction left the cycle at {g:?}")));
            }
        }
        cycles += 1;
    }
    let mut partner = vec![usize::MAX; cycles];
    for (&(a, b, c), &id) in &cycle_of {
        let other = *cycle_of
            .get(&(-a, b, -c))
            .ok_or_else(|| precision("form_class_count", format!("no partner for {:?}", (a, b, c))))?;
        partner[id] = other;
    }
    let fixed = partner.iter().enumerate().filter(|(i, p)| *i == **p).count();
    let wide = fixed + (cycles - fixed) / 2;
    Ok(FormClassCount { narrow: cycles as u64, wide: wide as u64 })
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem3Row {
    pub q: u64,
    pub x: String,
    pub y: String,
    pub log_epsilon: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    pub h: u64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChainCheck {
    pub q: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// 2h/sqrt(q) <= (log q - 0.04038)/(log q + 2 log(1 - 2/q)).
pub fn chain_check(q: u64, h: u64) -> ChainCheck {
    let qf = q as f64;
    let lq = qf.ln();
    let lhs = 2.0 * h as f64 / qf.sqrt();
    let rhs = (lq - THEOREM3_CHAIN_CONSTANT) / (lq + 2.0 * (-2.0 / qf).ln_1p());
    ChainCheck { q, lhs, rhs, ok: lhs <= rhs }
}

pub fn theorem3_bound(q: u64) -> f64 {
    let qf = q as f64;
    qf.sqrt() / 2.0 * (1.0 - 1.0 / (25.0 * qf.ln()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem3Report {
    pub q_max: u64,
    pub rows: Vec<Theorem3Row>,
    pub violations: Vec<u64>,
    pub chain: Vec<ChainCheck>,
    pub chain_failures: Vec<u64>,
    pub unit_bound_failures: Vec<u64>,
    pub passed: bool,
}

/// Every fundamental discriminant q = 1 mod 8 up to q_max.
pub fn verify_theorem3(q_max: u64) -> Result<Theorem3Report> {
    if q_max < 5 {
        return Err(domain("verify_theorem3", format!("q_max must be at least 5, got {q_max}")));
    }
    let qs: Vec<u64> = (9..=q_max).step_by(8).filter(|&q| is_fundamental_discriminant(q)).collect();
    let fields: Vec<QuadraticField> =
        qs.par_iter().map(|&q| class_number(q, DEFAULT_SCAN_DIGITS)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(fields.len());
    let mut violations = Vec::new();
    let mut chain = Vec::new();
    let mut unit_bound_failures = Vec::new();
    for f in &fields {
        let bound = theorem3_bound(f.q);
        let slack = bound - f.h as f64;
        if slack < 0.0 {
            violations.push(f.q);
        }
        if !f.unit_lower_bound_ok {
            unit_bound_failures.push(f.q);
        }
        if f.q >= THEOREM3_CHAIN_START {
            chain.push(chain_check(f.q, f.h));
        }
        rows.push(Theorem3Row {
            q: f.q,
            x: f.unit.x.to_string(),
            y: f.unit.y.to_string(),
            log_epsilon: f.unit.log_epsilon.to_f64(),
            l1: f.l1.to_f64(),
            h: f.h,
            bound,
            slack,
        });
    }
    let chain_failures: Vec<u64> = chain.iter().filter(|c| !c.ok).map(|c| c.q).collect();
    Ok(Theorem3Report {
        q_max,
        passed: violations.is_empty(),
        rows,
        violations,
        chain,
        chain_failures,
        unit_bound_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        assert!(is_fundamental_discriminant(5));
        assert!(is_fundamental_discriminant(12));
        assert!(!is_fundamental_discriminant(9));
        assert!(!is_fundamental_discriminant(16));
    }

    #[test]
    fn small_units() {
        let u = fundamental_unit(17, 25).unwrap();
        assert_eq!((u.x.to_u64(), u.y.to_u64(), u.norm), (Some(8), Some(2), -1));
        let u = fundamental_unit(12, 25).unwrap();
        assert_eq!((u.x.to_u64(), u.y.to_u64(), u.norm), (Some(4), Some(1), 1));
    }

    #[test]
    fn form_counts_small() {
        assert_eq!(form_class_count(229).unwrap().wide, 3);
        assert_eq!(form_class_count(12).unwrap(), FormClassCount { narrow: 2, wide: 1 });
    }
}
