use restriction_lab::curve::SimpleCurve;
use restriction_lab::finite_diff::richardson_derivative;
use restriction_lab::linalg::determinant_of_columns;
use restriction_lab::offspring::{
    admissible_samples, check_jacobian_identity, check_monomial_closed_form, estimate_sigma, jacobian_direct,
    jacobian_integral, jacobian_simplex, offspring_decomposition, offspring_point, random_admissible_polynomial,
    superfactorial, weight_product_bound, SigmaSweep,
};
use restriction_lab::sampling::substream;
use restriction_lab::vandermonde::GapVector;

/// det ∂Γ/∂(t, h) by Richardson-extrapolated central differences.
fn jacobian_fd(curve: &SimpleCurve, t: f64, gaps: &[f64]) -> f64 {
    let n = gaps.len() + 1;
    let eval = |x: &[f64]| offspring_point(curve, x[0], &GapVector::new(x[1..].to_vec()).unwrap()).unwrap();
    let mut base = vec![t];
    base.extend_from_slice(gaps);
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    richardson_derivative(
                        |s| {
                            let mut x = base.clone();
                            x[j] = s;
                            eval(&x)[i]
                        },
                        base[j],
                        1,
                        1e-3,
                        3,
                    )
                })
                .collect()
        })
        .collect();
    determinant_of_columns(&cols)
}

#[test]
fn direct_jacobian_is_the_map_jacobian() {
    let mut rng = substream(11, 0);
    for d in 2..=4 {
        let c = random_admissible_polynomial(d, &mut rng).unwrap();
        let gaps = vec![0.1; d - 1];
        let t = 0.2;
        let direct = jacobian_direct(&c, t, &GapVector::new(gaps.clone()).unwrap()).unwrap();
        let fd = jacobian_fd(&c, t, &gaps);
        assert!((direct - fd).abs() <= 1e-7 * (1.0 + direct.abs()), "d={d}: {direct} vs {fd}");
    }
}

#[test]
fn three_representations_agree() {
    let c = SimpleCurve::monomial(3, 4.5, (0.0, 1.0)).unwrap();
    let h = GapVector::new(vec![0.15, 0.2]).unwrap();
    let direct = jacobian_direct(&c, 0.3, &h).unwrap();
    let integral = jacobian_integral(&c, 0.3, &h).unwrap();
    let simplex = jacobian_simplex(&c, 0.3, &h, 10).unwrap();
    assert!((direct - integral).abs() < 1e-12 * (1.0 + direct.abs()));
    assert!((direct - simplex).abs() < 1e-10 * (1.0 + direct.abs()));
}

#[test]
fn monomial_jacobian_closed_form() {
    // φ = t^d/d!: J·∏_{j=1}^{d−1} j! = v(h).
    for d in 2..=5 {
        let fact: f64 = (1..=d).map(|j| j as f64).product();
        let phi = restriction_lab::curve::Monomial::scaled(1.0 / fact, d as f64);
        let c = SimpleCurve::new(d, std::sync::Arc::new(phi), (0.0, 1.0)).unwrap();
        let h = GapVector::new((0..d - 1).map(|i| 0.05 + 0.03 * i as f64).collect()).unwrap();
        let j = jacobian_direct(&c, 0.1, &h).unwrap();
        assert!((j * superfactorial(d - 1) - h.v()).abs() <= 1e-10 * h.v(), "d={d}");
    }
}

#[test]
fn identity_checks_pass() {
    assert!(check_jacobian_identity(&[2, 3], 8, 3).unwrap().pass);
    assert!(check_monomial_closed_form(&[2, 3, 4], 8, 3).unwrap().pass);
}

#[test]
fn decomposition_reconstructs_offspring_point() {
    let c = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
    let h = GapVector::new(vec![0.1, 0.25]).unwrap();
    let frame = offspring_decomposition(&c, &h).unwrap();
    assert!((frame.determinant() - 1.0).abs() < 1e-15);
    for t in [0.0, 0.2, 0.5] {
        let direct = offspring_point(&c, t, &h).unwrap();
        let rebuilt = frame.reconstruct(t);
        for (a, b) in direct.iter().zip(&rebuilt) {
            assert!((a - b).abs() < 1e-12, "{direct:?} vs {rebuilt:?}");
        }
    }
    // Lower triangular.
    for (k, row) in frame.matrix.iter().enumerate() {
        assert!(row[k + 1..].iter().all(|x| *x == 0.0));
    }
}

#[test]
fn sigma_of_pure_power_is_reciprocal_superfactorial() {
    for d in 2..=4 {
        let c = SimpleCurve::monomial(d, d as f64, (0.0, 1.0)).unwrap();
        let samples = admissible_samples(&c, &SigmaSweep { samples: 50, ..SigmaSweep::default() }, 0).unwrap();
        let r = estimate_sigma(&c, &samples, None, 8).unwrap();
        assert!((r.estimate * superfactorial(d - 1) - 1.0).abs() < 1e-10, "d={d}: {}", r.estimate);
    }
}

#[test]
fn weight_product_identity() {
    let c = SimpleCurve::monomial(3, 5.0, (0.0, 1.0)).unwrap();
    let samples = admissible_samples(&c, &SigmaSweep { samples: 60, ..SigmaSweep::default() }, 1).unwrap();
    assert!(weight_product_bound(&c, &samples, None, 8).unwrap().pass);
}

#[test]
fn gaps_must_fit_the_domain() {
    let c = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
    assert!(offspring_point(&c, 0.8, &GapVector::new(vec![0.2, 0.2]).unwrap()).is_err());
    assert!(jacobian_direct(&c, 0.1, &GapVector::new(vec![0.2]).unwrap()).is_err());
}
