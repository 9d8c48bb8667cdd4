use l1lab::bounds::{self, SmoothingConstants};
use l1lab::gfun::{self, GEvalConfig};
use l1lab::{cli, dirichlet, quadratic};
use l1lab_acceptance::{line, report};
use std::time::Instant;

#[test]
fn criterion_1_bf1() {
    let t = Instant::now();
    let r = bounds::compute_bf1(50, 1000.0, 50).unwrap();
    let upper = r.value.to_f64() + r.value.err();
    let ok = r.certified_below(-0.66266) && r.remainder.total <= 0.00022 && t.elapsed().as_secs() < 300;
    let detail = format!("b_F1 = {:.9} +- {:.2e}, remainder {:.3e}, {:.1?}", r.value.to_f64(), r.value.err(), r.remainder.total, t.elapsed());
    assert!(report(1, ok, detail), "upper end {upper}");
}

#[test]
fn criterion_2_lemma6() {
    let t = Instant::now();
    let c = gfun::verify_lemma6(&GEvalConfig { depth: 15, digits: 25, grid: gfun::GridSpec::default() }, -1.3e-4).unwrap();
    let ok = c.passed && c.extremum.certified_le(-1.3e-4) && t.elapsed().as_secs() < 120;
    let detail = format!("max S_L + R_L = {:.4e} +- {:.1e} at u = {:.4e}, {:.1?}", c.extremum.to_f64(), c.extremum.err(), c.argument, t.elapsed());
    assert!(report(2, ok, detail));
}

#[test]
fn criterion_3_lemma7() {
    let t = Instant::now();
    let c = gfun::verify_lemma7(&GEvalConfig { depth: 21, digits: 25, grid: gfun::GridSpec::default() }, 1.5e-6).unwrap();
    let ok = c.passed && c.extremum.certified_ge(1.5e-6) && t.elapsed().as_secs() < 120;
    let detail = format!("min S~_L - R~_L = {:.4e} +- {:.1e} at u = {:.4e}, {:.1?}", c.extremum.to_f64(), c.extremum.err(), c.argument, t.elapsed());
    assert!(report(3, ok, detail));
}

#[test]
fn criterion_4_near_miss_241() {
    let t = Instant::now();
    let r = dirichlet::scan_theorem1(300, 30).unwrap();
    let g = r.summary.global_max.clone().unwrap();
    let ok = g.q == 241
        && g.deviation - g.deviation_err >= -0.3240421 - 1e-6
        && g.deviation + g.deviation_err <= -0.3240420 + 1e-6
        && (-0.3240421..=-0.3240420).contains(&g.deviation)
        && t.elapsed().as_secs() < 60;
    assert!(report(4, ok, format!("global max at q = {} ({}), deviation {:.10}, {:.1?}", g.q, g.char_id, g.deviation, t.elapsed())));
}

#[test]
fn criterion_5_scan_3000() {
    let t = Instant::now();
    let r = dirichlet::scan_theorem1(3000, 25).unwrap();
    let worst = r.summary.global_max.clone().unwrap();
    let ok = r.summary.passed && r.summary.violations.is_empty() && t.elapsed().as_secs() < 600;
    let detail = format!(
        "{} characters, {} violations, worst deviation {:.6} at q = {}, {:.1?}",
        r.summary.records,
        r.summary.violations.len(),
        worst.deviation,
        worst.q,
        t.elapsed()
    );
    assert!(report(5, ok, detail));
}

#[test]
fn criterion_6_margin() {
    let mut worst = (f64::NEG_INFINITY, 0.0);
    let mut ok = true;
    for q in [2e6, 1e8, 2e10, 1e14] {
        let m = bounds::compute_cq(q).unwrap().margin;
        ok &= m <= -0.02012;
        if m > worst.0 {
            worst = (m, q);
        }
    }
    let range = bounds::verify_margin_range(2e6, 1e16, 1000).unwrap();
    ok &= range.passed;
    let theta = bounds::compute_cq(2e10).unwrap().theta;
    ok &= theta <= 1.02014e-5 * (1.0 + 1e-9);
    let detail = format!(
        "worst fixed point {:.7} at q = {:e}; sampled max {:.7} at q = {:.4e}; theta(2e10) = {:.8e}",
        worst.0, worst.1, range.max_margin, range.argmax, theta
    );
    assert!(report(6, ok, detail));
}

#[test]
fn criterion_7_theorem3() {
    let t = Instant::now();
    let r = quadratic::verify_theorem3(50_000).unwrap();
    let mut form_mismatch = Vec::new();
    for q in (2..=1000u64).filter(|&q| quadratic::is_fundamental_discriminant(q)) {
        let h = quadratic::class_number(q, 25).unwrap().h;
        if quadratic::form_class_count(q).unwrap().wide != h {
            form_mismatch.push(q);
        }
    }
    let ok = r.violations.is_empty() && form_mismatch.is_empty() && t.elapsed().as_secs() < 600;
    let detail = format!(
        "{} discriminants, {} violations, {} form-count mismatches up to 1000, {:.1?}",
        r.rows.len(),
        r.violations.len(),
        form_mismatch.len(),
        t.elapsed()
    );
    assert!(report(7, ok, detail));
}

#[test]
fn criterion_8_property_suites() {
    let t = Instant::now();
    const LISTED: [&str; 8] = [
        "vaaler_sandwich",
        "g_bounds",
        "gauss_sum_modulus",
        "two_route_l1",
        "odd_harmonic_theta",
        "odd_power_tails",
        "log_sine_sum",
        "theorem2_oracle",
    ];
    let suites: Vec<_> = cli::check_lemmas(10_000, 25).unwrap().into_iter().filter(|s| LISTED.contains(&s.name)).collect();
    assert_eq!(suites.len(), LISTED.len());
    let failed: Vec<&str> = suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    for s in &suites {
        line(format!("  {:<24} {} {}", s.name, if s.passed { "pass" } else { "FAIL" }, s.detail));
    }
    let ok = failed.is_empty();
    assert!(report(8, ok, format!("{} suites, failing: {:?}, {:.1?}", suites.len(), failed, t.elapsed())));
}

#[test]
fn stated_invariant_tail_derivative_bound() {
    // max over u >= T of |d/du (G/u)| <= 8c0/(7T^4) + 4c1/(3T^3) with c0 = 1, c1 = 1/pi.
    let c = SmoothingConstants::f1();
    let mut ok = true;
    for t in [1.0, 2.0, 5.0, 10.0] {
        let r = bounds::tail_derivative_check(t, 40.0, 4000, &c).unwrap();
        line(format!("  T = {t:>4}: observed {:.4e} vs bound {:.4e} {}", r.max_observed, r.bound, if r.ok { "pass" } else { "FAIL" }));
        ok &= r.ok;
    }
    line(format!("tail derivative invariant: {}", if ok { "PASS" } else { "FAIL" }));
    assert!(ok);
}
