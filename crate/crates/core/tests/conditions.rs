use std::sync::Arc;

use restriction_lab::conditions::{
    build_flattened, check_alpha, check_expflat, check_phicond, estimate_a, exponent_calculator, expflat_derivatives,
    interpolation_exponents, p_d, ExponentInput, MeanVariant,
};
use restriction_lab::curve::{validate_monotone, Exponential, FlattenVariant, Monomial, SimpleCurve};
use restriction_lab::finite_diff::richardson_derivative;

#[test]
fn power_laws_have_unit_mean_value_constants() {
    for d in [2usize, 3] {
        for beta in [d as f64, d as f64 + 0.5, 2.0 * d as f64] {
            let c = SimpleCurve::monomial(d, beta, (0.0, 1.0)).unwrap();
            for variant in [MeanVariant::Am, MeanVariant::Gm] {
                let a = estimate_a(&c, variant, 24).unwrap().constant;
                assert!((a - 1.0).abs() < 1e-9, "d={d} β={beta} {variant:?}: {a}");
            }
        }
    }
}

#[test]
fn exponential_exceeds_one_for_geometric_mean() {
    // ln φ''' = t + const, so A = sup exp(AM − GM) > 1.
    let c = SimpleCurve::new(3, Arc::new(Exponential { scale: 1.0, rate: 1.0 }), (0.0, 1.0)).unwrap();
    let a = estimate_a(&c, MeanVariant::Gm, 24).unwrap().constant;
    assert!(a > 1.05 && a < std::f64::consts::E, "{a}");
}

#[test]
fn gap_condition_for_cubic() {
    // φ = t³: φ''(s) − φ''(t) = 6(s − t); ρ = 1 at α = 1/6, ρ = 2 at α = 1/7.
    let c = SimpleCurve::monomial(3, 3.0, (0.0, 1.0)).unwrap();
    let e = check_phicond(&c, 1.0 / 6.0, 32).unwrap();
    assert!((e.infimum.unwrap() - 6.0).abs() < 1e-8);
    assert!((e.constant - 6f64.powf(-1.0 / 6.0)).abs() < 1e-8);
    let e = check_phicond(&c, 1.0 / 7.0, 32).unwrap();
    assert!((e.infimum.unwrap() - 6.0).abs() < 1e-6, "{:?}", e.infimum);
    assert!(e.to_report(None, 0.0).pass);
}

#[test]
fn alpha_range() {
    assert!(check_alpha(3, 1.0 / 6.0).is_ok());
    assert!(check_alpha(3, 0.2).is_err());
    assert!(check_alpha(2, 1.0 / 3.0).is_err());
    assert!(check_phicond(&SimpleCurve::monomial(3, 3.0, (0.0, 1.0)).unwrap(), 0.5, 8).is_err());
}

#[test]
fn expflat_first_derivative_closed_form() {
    for beta in [0.5, 1.0, 2.0] {
        for t in [0.3f64, 0.6, 1.0, 1.5] {
            let expect = beta * t.powf(-beta - 1.0) * (-t.powf(-beta)).exp();
            let got = expflat_derivatives(beta, 1, t).unwrap();
            assert!((got - expect).abs() <= 1e-14 * expect.abs().max(1e-300));
        }
    }
}

#[test]
fn expflat_finite_difference_check() {
    let r = check_expflat(1.5, 3, &[0.4, 0.7, 1.0]).unwrap();
    assert!(r.pass, "{}", r.estimate);
    assert!(expflat_derivatives(1.0, 2, 0.0).is_err());
    assert!(expflat_derivatives(1.0, 6, 0.5).is_err());
}

#[test]
fn log_flattening_of_constant_top_derivative() {
    // φ''' = 60 on (0, 1) ⇒ ψ''' = 2·ln 60 everywhere.
    let base = SimpleCurve::new(3, Arc::new(Monomial::scaled(10.0, 3.0)), (0.0, 1.0)).unwrap();
    let psi = build_flattened(&base, FlattenVariant::Log).unwrap();
    let top = 2.0 * 60f64.ln();
    for t in [0.2, 0.5, 0.9] {
        assert!((psi.phi_derivative(t, 3).unwrap() - top).abs() < 1e-12);
        let fd = richardson_derivative(|s| psi.phi_derivative(s, 2).unwrap(), t, 1, 0.05, 3);
        assert!((fd - top).abs() < 1e-6, "t={t}: {fd}");
    }
    assert!(validate_monotone(&psi, 32).unwrap().pass);
}

#[test]
fn exp_flattening_is_monotone_and_geometric_mean_flat() {
    let base = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
    let psi = build_flattened(&base, FlattenVariant::Exp).unwrap();
    assert!(validate_monotone(&psi, 48).unwrap().pass);
    let t: f64 = 0.4;
    let expect = 2.0 * (-1.0 / (24.0 * t)).exp();
    assert!((psi.phi_derivative(t, 3).unwrap() - expect).abs() < 1e-15);
    assert!(estimate_a(&psi, MeanVariant::Gm, 24).unwrap().constant <= 1.0 + 1e-9);
}

#[test]
fn log_flattening_rejects_small_top_derivative() {
    // φ''' = 24t falls below e near 0.
    let base = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
    assert!(build_flattened(&base, FlattenVariant::Log).is_err());
}

#[test]
fn restriction_exponent_values() {
    assert_eq!(p_d(3), 7.0 / 6.0);
    assert_eq!(p_d(2), 4.0 / 3.0);
    let r = exponent_calculator(&ExponentInput { d: 3, big_p: Some(9.0 / 8.0), alpha: Some(1.0 / 6.0), ..Default::default() })
        .unwrap();
    assert!((r.restriction_q.unwrap() - 1.5).abs() < 1e-15);
    assert!((r.alpha_q.unwrap() - 7.0).abs() < 1e-15);
    assert!((r.delta.unwrap() - 0.2).abs() < 1e-15);
    assert!(exponent_calculator(&ExponentInput { d: 3, big_p: Some(1.2), ..Default::default() }).is_err());
}

#[test]
fn interpolation_identities() {
    for d in 2..=5 {
        let pd = p_d(d);
        for i in 1..10 {
            let e = interpolation_exponents(d, 1.0 + (pd - 1.0) * i as f64 / 10.0).unwrap();
            assert!(e.eta_residual < 1e-14 && e.s_residual < 1e-12, "d={d}: {e:?}");
            assert!(e.theta > 0.0 && e.theta < 1.0);
        }
    }
}
