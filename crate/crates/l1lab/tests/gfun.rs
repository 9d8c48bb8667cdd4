use l1lab::gfun::{
    eval_g, g_fast, g_tail_bound, s_r_decomposition, s_tilde_r_decomposition, verify_lemma6, verify_lemma7,
    GEvalConfig, GridSpec, LEMMA6_ACCEPT_THRESHOLD, LEMMA7_ACCEPT_THRESHOLD,
};

// Sum over l = 0..=L of (1 - F1(2^l u))/2^l, with F1 from its log-sine integral; computed outside this crate.
const G_REFERENCE: [(f64, usize, f64); 4] = [
    (0.3, 12, 0.7185604480603595568131182),
    (1.5, 12, -0.06103295394596890512589176),
    (0.01, 15, 1.889363258385670914838442),
    (0.7, 10, 0.146368997722675427765061),
];

#[test]
fn g_matches_reference_truncations() {
    for (u, depth, expect) in G_REFERENCE {
        let cfg = GEvalConfig { depth, digits: 25, grid: GridSpec::single(u) };
        let g = eval_g(u, &cfg).unwrap();
        // eval_g folds the omitted tail into its radius.
        let tail = g_tail_bound(u, depth);
        assert!((g.to_f64() - expect).abs() <= tail + 1e-15, "u={u}");
        let (f, e) = g_fast(u, depth);
        assert!((f - expect).abs() <= e, "u={u}: fast {f} vs {expect}");
    }
}

#[test]
fn g_vanishes_at_one_and_two() {
    let cfg = GEvalConfig { depth: 40, digits: 30, grid: GridSpec::default() };
    for u in [1.0, 2.0] {
        let g = eval_g(u, &cfg).unwrap();
        assert!(g.to_f64().abs() <= 1e-20 && g.err() <= 1e-20);
    }
}

#[test]
fn g_is_bounded_by_two() {
    let mut u = 1e-6;
    while u < 1e4 {
        let (g, e) = g_fast(u, 60);
        assert!(g.abs() + e <= 2.0, "u={u}");
        u *= 1.013;
    }
}

#[test]
fn decompositions_agree_with_direct_g_derivative_sign() {
    // S + R bound < 0 means G' < 0; check G actually decreases there.
    for u in [0.01, 0.1, 0.5] {
        let d = s_r_decomposition(u, 15).unwrap();
        assert!(d.s.to_f64() + d.r_bound < 0.0);
        let h = 1e-6;
        assert!(g_fast(u + h, 60).0 < g_fast(u - h, 60).0, "u={u}");
    }
    let d = s_tilde_r_decomposition(0.5, 21).unwrap();
    assert!(d.s.to_f64() - d.r_bound > 0.0);
}

#[test]
fn lemma7_certificate_on_coarse_grid() {
    let cfg = GEvalConfig { depth: 21, digits: 25, grid: GridSpec { steps: 256, ..GridSpec::default() } };
    let c = verify_lemma7(&cfg, LEMMA7_ACCEPT_THRESHOLD).unwrap();
    assert!(c.passed);
    assert_eq!(c.values.len(), 256);
}

#[test]
fn shallow_depth_fails_lemma6() {
    let cfg = GEvalConfig { depth: 2, digits: 25, grid: GridSpec { steps: 64, ..GridSpec::default() } };
    assert!(!verify_lemma6(&cfg, LEMMA6_ACCEPT_THRESHOLD).unwrap().passed);
}

#[test]
fn empty_grid_is_rejected() {
    let cfg = GEvalConfig { depth: 15, digits: 25, grid: GridSpec { steps: 0, ..GridSpec::default() } };
    assert!(verify_lemma6(&cfg, LEMMA6_ACCEPT_THRESHOLD).is_err());
}

#[test]
fn dyadic_shift_identity() {
    // G(2u) = 2G(u) - 2(1 - F1(u)) when both sides are summed to matching depth.
    for u in [0.013, 0.21, 0.37, 0.8] {
        let a = eval_g(2.0 * u, &GEvalConfig { depth: 30, digits: 25, grid: GridSpec::single(2.0 * u) }).unwrap();
        let b = eval_g(u, &GEvalConfig { depth: 31, digits: 25, grid: GridSpec::single(u) }).unwrap();
        let f = l1lab::special_functions::eval_f1(u, 25).unwrap().value;
        let rhs = 2.0 * b.to_f64() - 2.0 * (1.0 - f.to_f64());
        assert!((a.to_f64() - rhs).abs() <= a.err() + 2.0 * b.err() + 1e-15, "u={u}");
    }
}
