use l1lab::dirichlet::arith::{euler_phi, gcd, mult_order};
use l1lab::dirichlet::*;
use proptest::prelude::*;
use std::f64::consts::LN_2;
use std::sync::Arc;

/// L(1, chi) for even chi by direct summation over whole periods. Each period
/// contributes O(j^-3), so the tail past J periods is O(J^-2).
fn dirichlet_series(chi: &DirichletCharacter, periods: u64) -> (f64, f64) {
    let q = chi.modulus();
    let vals: Vec<(f64, f64)> = (0..q).map(|a| chi.value(a).to_c64()).collect();
    let (mut re, mut im) = (0.0, 0.0);
    for j in (0..periods).rev() {
        let (mut br, mut bi) = (0.0, 0.0);
        for a in 1..q {
            let n = (j * q + a) as f64;
            br += vals[a as usize].0 / n;
            bi += vals[a as usize].1 / n;
        }
        re += br;
        im += bi;
    }
    (re, im)
}

fn theorem1_chars(q: u64) -> Vec<DirichletCharacter> {
    enumerate_characters(q, CharacterFilter::theorem1()).unwrap()
}

#[test]
fn unit_group_examples() {
    let g = unit_group(5).unwrap();
    assert_eq!(g.structure(), vec![4]);
    let r = g.generators()[0].residue;
    assert_eq!(mult_order(r, 5), Some(4));
    assert_eq!(unit_group(8).unwrap().structure(), vec![2, 2]);
    assert_eq!(unit_group(15).unwrap().order(), 8);
    assert!(unit_group(2).is_err());
}

#[test]
fn generator_orders_are_exact() {
    for q in 3..600u64 {
        let g = unit_group(q).unwrap();
        assert_eq!(g.structure().iter().product::<u64>(), euler_phi(q), "q={q}");
        for gen in g.generators() {
            assert_eq!(mult_order(gen.residue, q), Some(gen.order), "q={q}");
        }
    }
}

#[test]
fn enumeration_examples() {
    let five = enumerate_characters(5, CharacterFilter { even: true, primitive: true, chi2_eq_1: false }).unwrap();
    assert_eq!(five.len(), 1);
    assert!(five[0].is_real());
    for a in 1..5u64 {
        let legendre = if [1, 4].contains(&a) { (1.0, 0.0) } else { (-1.0, 0.0) };
        assert_eq!(five[0].value(a).to_c64(), legendre);
    }
    let only2 = CharacterFilter { even: false, primitive: false, chi2_eq_1: true };
    assert!(enumerate_characters(4, only2).unwrap().is_empty());
    assert_eq!(enumerate_characters(7, only2).unwrap().len(), 2);
    assert!(theorem1_chars(3).is_empty());
}

#[test]
fn chi2_count_is_phi_over_order_of_two() {
    let only2 = CharacterFilter { even: false, primitive: false, chi2_eq_1: true };
    for q in (3..400u64).step_by(2) {
        let n = enumerate_characters(q, only2).unwrap().len() as u64;
        assert_eq!(n, euler_phi(q) / mult_order(2, q).unwrap(), "q={q}");
    }
}

#[test]
fn conductor_examples() {
    let g12 = Arc::new(unit_group(12).unwrap());
    assert_eq!(DirichletCharacter::principal(g12).conductor(), 1);
    let g15 = Arc::new(unit_group(15).unwrap());
    // The mod-5 Legendre symbol lifted to modulus 15.
    let legendre5 = |a: u64| if a % 5 == 1 || a % 5 == 4 { 1.0 } else { -1.0 };
    let lifted: Vec<_> = enumerate_in(&g15, CharacterFilter::default())
        .unwrap()
        .into_iter()
        .filter(|c| (1..15u64).filter(|&a| gcd(a, 15) == 1).all(|a| c.value(a).to_c64() == (legendre5(a), 0.0)))
        .collect();
    assert_eq!(lifted.len(), 1);
    assert_eq!(lifted[0].conductor(), 5);
    let seven: Vec<_> = enumerate_characters(7, CharacterFilter::default()).unwrap().into_iter().filter(|c| c.order() == 2).collect();
    assert_eq!(seven.len(), 1);
    assert_eq!(seven[0].conductor(), 7);
}

#[test]
fn conductor_matches_brute_force_induction() {
    // chi is induced mod f iff chi(a) = 1 for all a = 1 mod f coprime to q.
    for q in 3..120u64 {
        for chi in enumerate_characters(q, CharacterFilter::default()).unwrap() {
            let f = (1..=q)
                .filter(|f| q % f == 0)
                .find(|&f| (1..q).filter(|&a| gcd(a, q) == 1 && a % f == 1 % f).all(|a| chi.value(a).is_one()))
                .unwrap();
            assert_eq!(chi.conductor(), f, "q={q} chi={}", chi.id());
        }
    }
}

#[test]
fn gauss_sum_examples() {
    let five = &enumerate_characters(5, CharacterFilter { even: true, primitive: true, chi2_eq_1: false }).unwrap()[0];
    let t = gauss_sum(five, 25).unwrap();
    assert!((t.re().to_f64() - 5f64.sqrt()).abs() < 1e-20 && t.im().to_f64().abs() < 1e-20);
    let eight: Vec<_> = enumerate_characters(8, CharacterFilter { even: true, primitive: true, chi2_eq_1: false }).unwrap();
    assert_eq!(eight.len(), 1);
    let t = gauss_sum(&eight[0], 25).unwrap();
    assert!((t.re().to_f64() - 8f64.sqrt()).abs() < 1e-20 && t.im().to_f64().abs() < 1e-20);
    for chi in enumerate_characters(13, CharacterFilter { even: false, primitive: true, chi2_eq_1: false }).unwrap() {
        let a = gauss_sum(&chi, 25).unwrap().abs();
        assert!((a.to_f64() - 13f64.sqrt()).abs() < 1e-20);
    }
    let g = Arc::new(unit_group(15).unwrap());
    assert!(gauss_sum(&DirichletCharacter::principal(g), 25).is_err());
}

#[test]
fn closed_form_matches_dirichlet_series() {
    let five = &enumerate_characters(5, CharacterFilter { even: true, primitive: true, chi2_eq_1: false }).unwrap()[0];
    let l = l1_closed_form(five, 30).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((l.re().to_f64() - 2.0 / 5f64.sqrt() * golden.ln()).abs() < 1e-15);
    assert!((l.re().to_f64() - 0.4304089409640040388894332).abs() < 1e-15);
    let s = dirichlet_series(five, 200_000);
    assert!((l.re().to_f64() - s.0).abs() < 1e-10);

    let eight = &enumerate_characters(8, CharacterFilter { even: true, primitive: true, chi2_eq_1: false }).unwrap()[0];
    let l = l1_closed_form(eight, 30).unwrap();
    assert!((l.re().to_f64() - 0.6232252401402305133940201).abs() < 1e-15);
    assert!((l.re().to_f64() - dirichlet_series(eight, 200_000).0).abs() < 1e-10);

    for q in [41u64, 73, 89, 241] {
        for chi in theorem1_chars(q) {
            let l = l1_closed_form(&chi, 30).unwrap();
            let s = dirichlet_series(&chi, 20_000);
            assert!((l.re().to_f64() - s.0).abs() < 1e-8 && (l.im().to_f64() - s.1).abs() < 1e-8, "q={q} {}", chi.id());
        }
    }
}

#[test]
fn closed_form_rejects_odd_and_imprimitive() {
    let odd = enumerate_characters(5, CharacterFilter { even: false, primitive: true, chi2_eq_1: false })
        .unwrap()
        .into_iter()
        .find(|c| c.parity() == Parity::Odd)
        .unwrap();
    assert!(l1_closed_form(&odd, 25).is_err());
    let g = Arc::new(unit_group(9).unwrap());
    assert!(l1_closed_form(&DirichletCharacter::principal(g), 25).is_err());
}

#[test]
fn two_routes_agree_up_to_200() {
    for q in (3..=200u64).step_by(2) {
        for chi in theorem1_chars(q) {
            let a = l1_closed_form(&chi, 30).unwrap();
            let b = l1_via_eq13(&chi, default_delta(q), n_max_for(default_delta(q), 1e-11), 1e-10).unwrap();
            assert!(a.distance(&b) <= 1e-10, "q={q} {}: {:e}", chi.id(), a.distance(&b));
            assert!(a.distance(&b) <= a.err() + b.err());
        }
    }
}

#[test]
fn eq13_at_241_and_small_delta() {
    let chi = theorem1_chars(241)
        .into_iter()
        .max_by(|a, b| {
            let x = l1_closed_form(a, 30).unwrap().abs().to_f64();
            let y = l1_closed_form(b, 30).unwrap().abs().to_f64();
            x.partial_cmp(&y).unwrap()
        })
        .unwrap();
    let a = l1_closed_form(&chi, 30).unwrap();
    let d = default_delta(241);
    let b = l1_via_eq13(&chi, d, n_max_for(d, 1e-10), 1e-9).unwrap();
    assert!(a.distance(&b) < 1e-8);
    // delta q / 2 < 1 leaves the finite sum empty; the smoothed series alone is L.
    let small = 1.0 / 241.0;
    let c = l1_via_eq13(&chi, small, n_max_for(small, 1e-9), 1e-8).unwrap();
    assert!(a.distance(&c) < 1e-8);
}

#[test]
fn scan_to_300_near_miss_at_241() {
    let r = scan_theorem1(300, 30).unwrap();
    let g = r.summary.global_max.as_ref().unwrap();
    assert_eq!(g.q, 241);
    assert!(g.deviation >= -0.3240421 && g.deviation <= -0.3240420, "{}", g.deviation);
    assert!(r.summary.violations.is_empty() && r.summary.passed);
    assert!(r.records.iter().all(|x| x.q % 2 == 1 && x.q != 3));
    for x in &r.records {
        assert!((x.deviation - (x.abs_l1 - 0.5 * (x.q as f64).ln())).abs() < 1e-15);
    }
}

#[test]
fn conjugate_pairs_have_equal_deviation() {
    for q in [41u64, 113, 241] {
        for chi in theorem1_chars(q) {
            let a = l1_closed_form(&chi, 30).unwrap();
            let b = l1_closed_form(&chi.conj(), 30).unwrap();
            assert!(a.conj().distance(&b) < 1e-25);
        }
    }
}

#[test]
fn kronecker_character_matches_class_number_route() {
    for q in [17u64, 41, 73, 89, 97, 113] {
        let chi = l1lab::quadratic::kronecker_character(q).unwrap();
        let l = l1_closed_form(&chi, 30).unwrap();
        let f = l1lab::quadratic::class_number(q, 30).unwrap();
        assert!(l.im().to_f64().abs() < 1e-25 && l.re().to_f64() > 0.0);
        assert!((l.re().to_f64() - f.l1.to_f64()).abs() < 1e-10);
        let via_h = 2.0 * f.h as f64 * f.unit.log_epsilon.to_f64() / (q as f64).sqrt();
        assert!((l.re().to_f64() - via_h).abs() < 1e-10, "q={q}");
    }
}

#[test]
fn default_delta_is_optimal_choice() {
    assert!((default_delta(241) - 1.0 / (241f64.sqrt() * LN_2)).abs() < 1e-17);
}

fn arb_character() -> impl Strategy<Value = DirichletCharacter> {
    (3u64..300).prop_flat_map(|q| {
        let g = Arc::new(unit_group(q).unwrap());
        let orders = g.structure();
        orders
            .iter()
            .map(|&o| 0..o)
            .collect::<Vec<_>>()
            .prop_map(move |e| DirichletCharacter::new(g.clone(), e).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn characters_are_completely_multiplicative(chi in arb_character(), a in 0u64..10_000, b in 0u64..10_000) {
        let q = chi.modulus();
        let (x, y, z) = (chi.value(a).to_c64(), chi.value(b).to_c64(), chi.value(a * b % q).to_c64());
        prop_assert!((x.0 * y.0 - x.1 * y.1 - z.0).abs() < 1e-12);
        prop_assert!((x.0 * y.1 + x.1 * y.0 - z.1).abs() < 1e-12);
        if gcd(a, q) > 1 {
            prop_assert_eq!(chi.value(a), CharValue::Zero);
        }
    }

    #[test]
    fn orthogonality_over_residues(chi in arb_character()) {
        let q = chi.modulus();
        let (re, im) = (0..q).map(|a| chi.value(a).to_c64()).fold((0.0, 0.0), |s, v| (s.0 + v.0, s.1 + v.1));
        let expect = if chi.is_principal() { euler_phi(q) as f64 } else { 0.0 };
        prop_assert!((re - expect).abs() < 1e-9 && im.abs() < 1e-9);
        prop_assert_eq!(chi.parity() == Parity::Even, chi.value(q - 1).is_one());
        prop_assert_eq!(q % chi.conductor(), 0);
        prop_assert_eq!(chi.is_primitive(), chi.conductor() == q);
    }

    #[test]
    fn orthogonality_over_characters(q in 3u64..200, a in 2u64..200) {
        let a = a % q;
        let chars = enumerate_characters(q, CharacterFilter::default()).unwrap();
        prop_assert_eq!(chars.len() as u64, euler_phi(q));
        let (re, im) = chars.iter().map(|c| c.value(a).to_c64()).fold((0.0, 0.0), |s, v| (s.0 + v.0, s.1 + v.1));
        let expect = if a == 1 { euler_phi(q) as f64 } else { 0.0 };
        prop_assert!((re - expect).abs() < 1e-9 && im.abs() < 1e-9);
    }
}
