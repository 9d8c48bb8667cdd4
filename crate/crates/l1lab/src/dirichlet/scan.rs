//! Scan of odd conductors: |L(1, chi)| - (1/2) log q for every even primitive
//! chi with chi(2) = 1.

use std::sync::Arc;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use super::character::{enumerate_in, CharacterFilter};
use super::group::UnitGroup;
use super::lvalue::{l1_closed_form_with, ModulusTables};
use crate::bounds::THEOREM1_MARGIN;
use crate::error::{domain, Result};
use crate::precision::{rounding_err, PrecisionComplex};

#[derive(Clone, Debug, Serialize)]
pub struct LValueRecord {
    pub q: u64,
    pub char_id: String,
    pub l1: PrecisionComplex,
    pub abs_l1: f64,
    /// |L(1, chi)| - (1/2) log q
    pub deviation: f64,
    pub deviation_err: f64,
}

/// Flat CSV form of a record.
#[derive(Clone, Debug, Serialize)]
pub struct LValueRow {
    pub q: u64,
    pub char_id: String,
    #[serde(rename = "re(L1)")]
    pub re: f64,
    #[serde(rename = "im(L1)")]
    pub im: f64,
    #[serde(rename = "abs(L1)")]
    pub abs: f64,
    pub deviation: f64,
}

impl From<&LValueRecord> for LValueRow {
    fn from(r: &LValueRecord) -> Self {
        Self {
            q: r.q,
            char_id: r.char_id.clone(),
            re: r.l1.re().to_f64(),
            im: r.l1.im().to_f64(),
            abs: r.abs_l1,
            deviation: r.deviation,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusExtrema {
    pub q: u64,
    pub characters: usize,
    pub max_deviation: f64,
    pub min_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordRef {
    pub q: u64,
    pub char_id: String,
    pub deviation: f64,
    pub deviation_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub q_max: u64,
    pub digits: u32,
    pub threshold: f64,
    pub records: usize,
    pub per_q: Vec<ModulusExtrema>,
    pub global_max: Option<RecordRef>,
    pub violations: Vec<RecordRef>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub records: Vec<LValueRecord>,
    pub summary: ScanSummary,
}

/// Records for one modulus, in enumeration order.
pub fn scan_modulus(q: u64, digits: u32) -> Result<Vec<LValueRecord>> {
    let group = Arc::new(UnitGroup::new(q)?);
    let chars = enumerate_in(&group, CharacterFilter::theorem1())?;
    if chars.is_empty() {
        return Ok(Vec::new());
    }
    let tables = ModulusTables::new(q, digits)?;
    let prec = tables.prec();
    let half_log_q = Float::with_val(prec, Float::with_val(prec, q).ln()) / 2u32;
    let half_log_err = 2.0 * rounding_err(&half_log_q);
    chars
        .iter()
        .map(|chi| {
            let l1 = l1_closed_form_with(chi, &tables)?.l1;
            let a = l1.abs();
            let dev = Float::with_val(prec, a.value() - &half_log_q);
            let deviation_err = a.err() + half_log_err + rounding_err(&dev);
            Ok(LValueRecord {
                q,
                char_id: chi.id(),
                abs_l1: a.to_f64(),
                deviation: dev.to_f64(),
                deviation_err,
                l1,
            })
        })
        .collect()
}

pub fn scan_theorem1(q_max: u64, digits: u32) -> Result<ScanResult> {
    if q_max < 3 {
        return Err(domain("scan_theorem1", format!("q_max must be at least 3, got {q_max}")));
    }
    let qs: Vec<u64> = (3..=q_max).step_by(2).collect();
    let per: Vec<Vec<LValueRecord>> = qs.par_iter().map(|&q| scan_modulus(q, digits)).collect::<Result<_>>()?;
    let mut per_q = Vec::new();
    let mut violations = Vec::new();
    let mut global_max: Option<RecordRef> = None;
    for recs in &per {
        let Some(first) = recs.first() else { continue };
        let max = recs.iter().map(|r| r.deviation).fold(f64::NEG_INFINITY, f64::max);
        let min = recs.iter().map(|r| r.deviation).fold(f64::INFINITY, f64::min);
        per_q.push(ModulusExtrema { q: first.q, characters: recs.len(), max_deviation: max, min_deviation: min });
        for r in recs {
            let rr = || RecordRef { q: r.q, char_id: r.char_id.clone(), deviation: r.deviation, deviation_err: r.deviation_err };
            if r.deviation + r.deviation_err > THEOREM1_MARGIN {
                violations.push(rr());
            }
            if global_max.as_ref().map_or(true, |g| r.deviation > g.deviation) {
                global_max = Some(rr());
            }
        }
    }
    let records: Vec<LValueRecord> = per.into_iter().flatten().collect();
    let summary = ScanSummary {
        q_max,
        digits,
        threshold: THEOREM1_MARGIN,
        records: records.len(),
        per_q,
        global_max,
        passed: violations.is_empty(),
        violations,
    };
    Ok(ScanResult { records, summary })
}
