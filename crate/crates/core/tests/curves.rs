use std::sync::Arc;

use restriction_lab::curve::{
    evaluate_curve, normalize_domain, validate_monotone, validate_oracle, Curve, CurveKind, CurveSpec, DerivativeOracle,
    HomogeneousCurve, Monomial, Polynomial, SimpleCurve,
};
use restriction_lab::finite_diff::richardson_derivative;
use restriction_lab::LabError;

#[test]
fn simple_curve_components_are_taylor_monomials() {
    let c = SimpleCurve::monomial(4, 5.0, (0.0, 1.0)).unwrap();
    let t = 0.7;
    assert_eq!(evaluate_curve(&c, t, 0).unwrap()[..3], [t, t * t / 2.0, t.powi(3) / 6.0]);
    assert_eq!(evaluate_curve(&c, t, 2).unwrap()[..3], [0.0, 1.0, t]);
    let last = evaluate_curve(&c, t, 4).unwrap()[3];
    assert!((last - 120.0 * t).abs() < 1e-12);
}

#[test]
fn curve_derivatives_match_finite_differences() {
    let c = SimpleCurve::monomial(3, 4.5, (0.0, 1.0)).unwrap();
    for t in [0.3, 0.55, 0.8] {
        for k in 1..=3 {
            let exact = c.derivative(t, k).unwrap();
            for i in 0..3 {
                let fd = richardson_derivative(|s| c.point(s).unwrap()[i], t, k, 0.05, 4);
                assert!((fd - exact[i]).abs() <= 1e-7 * (1.0 + exact[i].abs()), "t={t} k={k} i={i}");
            }
        }
    }
}

#[test]
fn affine_weight_is_torsion_power() {
    // γ = (t, t²/2, t⁴): det(γ', γ'', γ''') = φ''' = 24t.
    let c = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
    for t in [0.1, 0.5, 0.9] {
        let w = c.affine_weight(t).unwrap();
        assert!((w - (24.0 * t).powf(1.0 / 6.0)).abs() < 1e-13);
    }
}

#[test]
fn polynomial_oracle_passes_validation() {
    let p = Polynomial::new(vec![0.0, 0.0, 0.0, 1.0, 0.5, 0.25]);
    let r = validate_oracle(&p, (0.1, 0.9), 3, 12, 1e-6);
    assert!(r.pass, "{r:?}");
    assert!((p.derivative(0.5, 3) - (6.0 + 12.0 * 0.5 + 15.0 * 0.25)).abs() < 1e-12);
}

#[test]
fn monomials_are_monotone_and_sine_is_not() {
    let c = SimpleCurve::monomial(3, 3.5, (0.0, 1.0)).unwrap();
    assert!(validate_monotone(&c, 64).unwrap().pass);
    let sine = restriction_lab::curve::FnOracle::new("sin", 8, (0.0, 10.0), |t: f64, k: usize| match k % 4 {
        0 => t.sin(),
        1 => t.cos(),
        2 => -t.sin(),
        _ => -t.cos(),
    });
    let c = SimpleCurve::new(3, Arc::new(sine), (0.0, 3.0)).unwrap();
    assert!(!validate_monotone(&c, 64).unwrap().pass);
}

#[test]
fn normalize_domain_rescales_phi() {
    let c = SimpleCurve::monomial(2, 3.0, (0.0, 2.0)).unwrap();
    let n = normalize_domain(&c).unwrap();
    assert_eq!(n.bounds(), (0.0, 1.0));
    assert!((n.phi_derivative(0.5, 0).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn homogeneous_curve_dilation() {
    let c = HomogeneousCurve::new(vec![1.0, 2.0, 3.0], (0.0, 1.0)).unwrap();
    assert_eq!(c.homogeneous_dimension(), 6.0);
    let (t, lam) = (0.3, 1.7);
    let scaled = c.point(lam * t).unwrap();
    let dilated = c.dilate(lam, &c.point(t).unwrap());
    for (a, b) in scaled.iter().zip(&dilated) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn spec_round_trip_builds_the_same_curve() {
    let spec = CurveSpec::new(CurveKind::Monomial { beta: 4.0, coeff: None }).with_d(3);
    let json = serde_json::to_string(&spec).unwrap();
    let back: CurveSpec = serde_json::from_str(&json).unwrap();
    let (a, b) = (spec.build_simple().unwrap(), back.build_simple().unwrap());
    assert_eq!(a.phi_derivative(0.4, 2).unwrap(), b.phi_derivative(0.4, 2).unwrap());
}

#[test]
fn invalid_curves_are_rejected() {
    assert!(matches!(SimpleCurve::new(1, Arc::new(Monomial::new(2.0)), (0.0, 1.0)), Err(LabError::Validation(_))));
    assert!(SimpleCurve::new(3, Arc::new(Monomial::new(4.0)), (1.0, 0.5)).is_err());
}
