mod common;

use beurling::certify::{check_starlike, check_subsolution, check_supersolution, free_boundary_identity, TOL_CERT};
use beurling::regularity::{spectrum_report, DecayKind};
use beurling::solver::{radial_scan, residual};
use beurling::spectral::hp_boundary_distance;
use beurling::weight::tepper_check;
use beurling::{solve, DiskFunction, InitialMap, SolveOptions, Target, WeightField};
use common::criteria::*;
use common::*;
use proptest::prelude::*;

#[test]
fn representation_and_residual_agree() {
    representation_equivalence(20, 1041).unwrap();
}

#[test]
fn contraction_from_three_starts() {
    contraction_suite(5, 1007).unwrap();
}

#[test]
fn superharmonic_fields_have_one_univalent_solution() {
    superharmonic_uniqueness(5, 1008).unwrap();
}

#[test]
fn maximal_solutions_of_radially_monotone_fields_are_starlike() {
    let mut r = rng(53);
    let mut used = 0;
    for _ in 0..50 {
        if used == 5 {
            break;
        }
        let field = tepper_field(&mut r);
        if !tepper_check(&field, false).unwrap().pass {
            continue;
        }
        used += 1;
        let options = SolveOptions {
            target: Target::Maximal,
            ..SolveOptions::default().with_initial(InitialMap::ScaledIdentity(field.sup_bound()))
        };
        let report = solve(&field, &[], &options).unwrap();
        assert!(report.converged && report.univalent);
        let cert = check_starlike(&report.f).unwrap();
        assert!(cert.pass, "starlike margin {}", cert.worst_margin);
    }
    assert_eq!(used, 5);
}

#[test]
fn benchmark_solutions_stay_in_the_disk_of_radius_six() {
    let field = WeightField::benchmark();
    let mut starts: Vec<(Vec<_>, f64)> = [0.5, 2.0, 3.5, 4.5, 5.5, 5.9].iter().map(|&s| (vec![], s)).collect();
    starts.push((vec![c(-0.5, 0.0)], 1.0));
    for (zeros, slope) in starts {
        let options = SolveOptions::default().with_initial(InitialMap::ScaledIdentity(slope));
        let report = solve(&field, &zeros, &options).unwrap();
        assert!(report.converged, "start {slope}");
        let top = report.f.trace(report.grid).unwrap().sup_norm();
        assert!(top <= 6.0 + 1e-6, "start {slope}: max |f| = {top}");
    }
}

#[test]
fn radial_scan_of_constant_weight_is_a_point() {
    let field = WeightField::constant(2.0).unwrap();
    let intervals = radial_scan(&field, 0.1, 4.0, 10_000).unwrap();
    assert_eq!(intervals.len(), 1);
    assert!((intervals[0].lo - 2.0).abs() < 1e-3 && (intervals[0].hi - 2.0).abs() < 1e-3);
}

#[test]
fn smoother_weights_give_faster_spectral_decay() {
    let analytic = WeightField::from_fn("analytic", 3.0, |w| 2.0 + w.re.cos() * (-w.norm_sqr()).exp()).unwrap();
    let lipschitz =
        WeightField::from_fn("lipschitz", 3.0, |w| 1.0 + 2.0 * (w.re - 0.2).abs().min(1.0)).unwrap();
    let options = SolveOptions {
        tol_update: 1e-9,
        require_resolved: false,
        ..SolveOptions::default()
    };
    let smooth = spectrum_report(&solve(&analytic, &[], &options).unwrap().f).unwrap();
    let rough = spectrum_report(&solve(&lipschitz, &[], &options).unwrap().f).unwrap();
    assert_eq!(smooth.decay_kind, DecayKind::Geometric);
    assert!(smooth.geometric_residual < smooth.algebraic_residual);
    assert_eq!(rough.decay_kind, DecayKind::Algebraic);
    assert!(rough.algebraic_residual < rough.geometric_residual);
    assert!(rough.rate.is_finite() && rough.rate > 0.0);
}

#[test]
fn hp_distance_of_rational_family_decreases() {
    // f_n(z) = r_n z / (1 − r_n s z) with r_n → 1; the limit is univalent.
    let s = 0.5;
    let map = |r: f64| {
        DiskFunction::new((0..200).map(|k| c(if k == 0 { 0.0 } else { r * (r * s).powi(k as i32 - 1) }, 0.0)).collect())
            .unwrap()
    };
    let limit = map(1.0);
    for p in [0.1, 0.25, 0.4] {
        let mut previous = f64::INFINITY;
        for n in 1..=30 {
            let d = hp_boundary_distance(&map(1.0 - 2f64.powi(-n)), &limit, p).unwrap();
            assert!(d < previous, "p = {p}, n = {n}: {d} >= {previous}");
            previous = d;
        }
        assert!(previous < 2.0 * std::f64::consts::PI * 2f64.powf(-30.0 * p) * 4f64.powf(p));
    }
}

#[test]
fn hp_distance_of_polynomial_family_reaches_tolerance() {
    for p in [0.1, 0.25, 0.4] {
        hp_family_convergence(p).unwrap();
    }
}

#[test]
fn solutions_pass_both_inequalities_and_the_identity() {
    let mut r = rng(77);
    for _ in 0..4 {
        let field = bump_field(&mut r);
        let report = solve(&field, &[], &SolveOptions::default()).unwrap();
        assert!(report.converged);
        let sub = check_subsolution(&report.f, &field).unwrap();
        let sup = check_supersolution(&report.f, &field).unwrap();
        assert!(sub.pass && sup.pass);
        assert!(sub.worst_margin.abs() < 1e-8 && sup.worst_margin.abs() < 1e-8);
        assert!(free_boundary_identity(&report.f, &field).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn linear_maps_against_constant_weights(r in 0.1f64..5.0, weight in 0.5f64..5.0) {
        let field = WeightField::constant(weight).unwrap();
        let f = DiskFunction::scaled_identity(r);
        let sub = check_subsolution(&f, &field).unwrap();
        let sup = check_supersolution(&f, &field).unwrap();
        let expected = (weight / r).ln();
        prop_assert!((sub.worst_margin - expected).abs() < 1e-12);
        prop_assert!((sup.worst_margin + expected).abs() < 1e-12);
        prop_assert_eq!(sub.pass, expected >= -TOL_CERT);
        prop_assert_eq!(sup.pass, expected <= TOL_CERT);
        prop_assert!((residual(&f, &field).unwrap() - (r - weight).abs()).abs() < 1e-12);
    }

    #[test]
    fn scaling_a_subsolution_down_keeps_it_a_subsolution(shrink in 0.1f64..1.0) {
        let field = WeightField::benchmark();
        let f = DiskFunction::real_polynomial(&[0.0, 1.0, 1.0]);
        let base = check_subsolution(&f, &field).unwrap();
        let cert = check_subsolution(&f.scale(c(shrink, 0.0)), &field).unwrap();
        prop_assert!(cert.pass);
        prop_assert!(cert.worst_margin >= base.worst_margin - 1e-12);
    }

    #[test]
    fn starlike_margin_is_scale_invariant(scale in 0.1f64..10.0, a2 in -0.4f64..0.4) {
        let f = DiskFunction::real_polynomial(&[0.0, 1.0, a2]);
        let base = check_starlike(&f).unwrap();
        let scaled = check_starlike(&f.scale(c(scale, 0.0))).unwrap();
        prop_assert_eq!(base.pass, scaled.pass);
        prop_assert!((base.worst_margin - scaled.worst_margin).abs() < 1e-10);
    }
}
