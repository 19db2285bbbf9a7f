//! Curve models, affine arclength weights and domain normalisation.
//!
//! A *simple* curve has the form γ(t) = (t, t²/2!, …, t^{d−1}/(d−1)!, φ(t)),
//! so only its highest torsion φ^(d) can vanish. Homogeneous curves
//! (t^{a_1}, …, t^{a_d}) are the other family handled here.

mod oracle;
mod spec;

use std::sync::Arc;

use serde_json::json;

pub use oracle::{
    DerivativeOracle, ExpFlat, Exponential, Flattened, FlattenVariant, FnOracle, Monomial, Oracle,
    PlusPolynomial, Polynomial, Rescaled, ShiftAverage,
};
pub(crate) use oracle::{factorial, falling_factorial};
pub use spec::{AnyCurve, CurveKind, CurveSpec};

use crate::error::{domain, validation, LabError, Result};
use crate::finite_diff::richardson_derivative;
use crate::linalg::determinant_of_columns;
use crate::report::{CheckReport, Relation, Series};

/// Dimensions accepted without an explicit override.
pub const DEFAULT_MAX_DIMENSION: usize = 5;

/// Endpoint clamp ε as a fraction of the domain length.
pub const DEFAULT_ENDPOINT_FRACTION: f64 = 1e-9;

/// Anything that can be evaluated as a parametrised curve in ℝ^d.
pub trait Curve: Send + Sync {
    fn dim(&self) -> usize;

    fn domain(&self) -> (f64, f64);

    /// γ^(k)(t).
    fn derivative(&self, t: f64, k: usize) -> Result<Vec<f64>>;

    fn point(&self, t: f64) -> Result<Vec<f64>> {
        self.derivative(t, 0)
    }

    /// |det(γ', …, γ^(d))|^{2/(d(d+1))}, the density of affine arclength.
    fn affine_weight(&self, t: f64) -> Result<f64> {
        let d = self.dim();
        let cols = (1..=d).map(|k| self.derivative(t, k)).collect::<Result<Vec<_>>>()?;
        let torsion = determinant_of_columns(&cols).abs();
        Ok(torsion.powf(2.0 / (d * (d + 1)) as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOptions {
    /// Evaluations within ε = fraction·(b − a) of an endpoint are clamped.
    pub endpoint_fraction: f64,
    /// Accept d above [`DEFAULT_MAX_DIMENSION`].
    pub allow_high_dimension: bool,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            endpoint_fraction: DEFAULT_ENDPOINT_FRACTION,
            allow_high_dimension: false,
        }
    }
}

/// γ(t) = (t, t²/2, …, t^{d−1}/(d−1)!, φ(t)) on an open interval (a, b), 0 ≤ a < b.
#[derive(Debug, Clone)]
pub struct SimpleCurve {
    d: usize,
    phi: Oracle,
    a: f64,
    b: f64,
    options: CurveOptions,
}

impl SimpleCurve {
    pub fn new(d: usize, phi: Oracle, domain: (f64, f64)) -> Result<Self> {
        Self::with_options(d, phi, domain, CurveOptions::default())
    }

    pub fn with_options(d: usize, phi: Oracle, (a, b): (f64, f64), options: CurveOptions) -> Result<Self> {
        if d < 2 {
            return validation(format!("curve dimension must be at least 2, got {d}"));
        }
        if d > DEFAULT_MAX_DIMENSION && !options.allow_high_dimension {
            return Err(LabError::Capability(format!(
                "dimension {d} exceeds {DEFAULT_MAX_DIMENSION}; set allow_high_dimension to override"
            )));
        }
        if phi.max_order() < d {
            return Err(LabError::Capability(format!(
                "derivative oracle supplies order {} but the curve needs {d}",
                phi.max_order()
            )));
        }
        if !(a.is_finite() && a >= 0.0 && b > a) {
            return validation(format!("domain ({a}, {b}) must satisfy 0 ≤ a < b"));
        }
        let (lo, hi) = phi.support();
        if a < lo || b > hi {
            return domain(format!("domain ({a}, {b}) leaves the support ({lo}, {hi}) of {}", phi.label()));
        }
        Ok(SimpleCurve { d, phi, a, b, options })
    }

    pub fn monomial(d: usize, beta: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(d, Arc::new(Monomial::new(beta)), domain)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn phi(&self) -> &Oracle {
        &self.phi
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn options(&self) -> CurveOptions {
        self.options
    }

    fn epsilon(&self) -> f64 {
        let span = self.b - self.a;
        if span.is_finite() {
            self.options.endpoint_fraction * span
        } else {
            self.options.endpoint_fraction
        }
    }

    /// Maps `t` into [a + ε, b − ε]; errors when `t` is outside [a, b].
    pub fn clamp(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * (self.b - self.a).min(1.0).max(f64::MIN_POSITIVE) + 1e-15 * t.abs();
        if !(t >= self.a - slack && t <= self.b + slack) {
            return domain(format!("t = {t} outside ({}, {})", self.a, self.b));
        }
        let eps = self.epsilon();
        Ok(t.clamp(self.a + eps, self.b - eps))
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if k > self.phi.max_order() {
            return Err(LabError::Capability(format!(
                "derivative order {k} exceeds oracle order {}",
                self.phi.max_order()
            )));
        }
        Ok(())
    }

    /// Evaluates `f` at t (snapped into [a, b]); a NaN or +∞ result near an
    /// endpoint is retried at the clamped point.
    fn guarded(&self, t: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        let inner = self.clamp(t)?;
        let exact = t.clamp(self.a, self.b);
        if exact == inner {
            return Ok(f(inner));
        }
        let v = f(exact);
        Ok(if v.is_nan() || v == f64::INFINITY { f(inner) } else { v })
    }

    /// φ^(k)(t), with endpoint clamping where φ^(k) blows up.
    pub fn phi_derivative(&self, t: f64, k: usize) -> Result<f64> {
        self.check_order(k)?;
        self.guarded(t, |s| self.phi.derivative(s, k))
    }

    pub fn ln_phi_derivative(&self, t: f64, k: usize) -> Result<f64> {
        self.check_order(k)?;
        self.guarded(t, |s| self.phi.ln_derivative(s, k))
    }

    /// Same curve with a different φ and domain (used by offspring and flattening).
    pub fn with_phi(&self, phi: Oracle, domain: (f64, f64)) -> Result<Self> {
        Self::with_options(self.d, phi, domain, self.options)
    }
}

impl Curve for SimpleCurve {
    fn dim(&self) -> usize {
        self.d
    }

    fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn derivative(&self, t: f64, k: usize) -> Result<Vec<f64>> {
        evaluate_curve(self, t, k)
    }

    fn affine_weight(&self, t: f64) -> Result<f64> {
        affine_weight(self, t)
    }
}

/// γ^(k)(t) for a simple curve.
pub fn evaluate_curve(curve: &SimpleCurve, t: f64, k: usize) -> Result<Vec<f64>> {
    curve.check_order(k)?;
    let phi = curve.phi_derivative(t, k)?;
    let t = t.clamp(curve.a, curve.b);
    let d = curve.d;
    let mut out = Vec::with_capacity(d);
    for i in 1..d {
        out.push(if i >= k {
            let p = i - k;
            t.powi(p as i32) / factorial(p)
        } else {
            0.0
        });
    }
    out.push(phi);
    Ok(out)
}

/// w(t) = |φ^(d)(t)|^{2/(d(d+1))}.
pub fn affine_weight(curve: &SimpleCurve, t: f64) -> Result<f64> {
    let d = curve.d;
    let exponent = 2.0 / (d * (d + 1)) as f64;
    // Through the logarithm so that flat families do not underflow early.
    let ln = curve.ln_phi_derivative(t, d)?;
    if ln.is_nan() {
        Ok(curve.phi_derivative(t, d)?.abs().powf(exponent))
    } else {
        Ok((exponent * ln).exp())
    }
}

/// Rescales the domain (a, b) to (a/b, 1) by replacing φ with t ↦ φ(bt).
pub fn normalize_domain(curve: &SimpleCurve) -> Result<SimpleCurve> {
    let (a, b) = curve.bounds();
    if !b.is_finite() {
        return Err(LabError::Unsupported("cannot normalise an unbounded domain".into()));
    }
    if b == 1.0 {
        return Ok(curve.clone());
    }
    let phi: Oracle = Arc::new(Rescaled { base: curve.phi.clone(), factor: b });
    SimpleCurve::with_options(curve.d, phi, (a / b, 1.0), curve.options)
}

/// Sample grid used by scans: `n` points spread over the open domain.
pub(crate) fn interior_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}

/// Checks that φ', …, φ^(d) are nonnegative and nondecreasing on a grid.
pub fn validate_monotone(curve: &SimpleCurve, grid_size: usize) -> Result<CheckReport> {
    if grid_size < 2 {
        return validation("monotonicity grid needs at least 2 points");
    }
    let (a, b) = curve.bounds();
    if !b.is_finite() {
        return Err(LabError::Unsupported("monotonicity scan needs a bounded domain".into()));
    }
    let eps = curve.epsilon();
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| (a + eps) + (b - a - 2.0 * eps) * i as f64 / (grid_size - 1) as f64)
        .collect();
    let mut worst = f64::INFINITY;
    let mut series = Series::new("monotonicity", &["order", "min_value", "min_increment", "scale"]);
    let mut witnesses = Vec::new();
    let mut tolerance: f64 = 0.0;
    for k in 1..=curve.d {
        let values = grid.iter().map(|&t| curve.phi_derivative(t, k)).collect::<Result<Vec<_>>>()?;
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = 1e-10 * scale.max(1e-300);
        tolerance = tolerance.max(tol);
        let (imin, min_value) = values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let (jmin, min_inc) = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        series.push(vec![k as f64, min_value, min_inc, scale]);
        let normalized = (min_value / scale.max(1e-300)).min(min_inc / scale.max(1e-300));
        if min_value < -tol {
            witnesses.push((format!("phi^({k}) negative"), vec![grid[imin], min_value]));
        }
        if min_inc < -tol {
            witnesses.push((format!("phi^({k}) decreasing"), vec![grid[jmin], grid[jmin + 1], min_inc]));
        }
        worst = worst.min(normalized);
    }
    // Estimate is the worst scale-normalised value; anything ≥ −1e−10 passes.
    let mut report = CheckReport::judged(
        "curve.monotone",
        json!({"d": curve.d, "domain": [a, b], "grid_size": grid_size, "phi": curve.phi.label()}),
        worst,
        0.0,
        Relation::AtLeast,
        1e-10,
    )
    .with_series(series)
    .with_note(format!("largest absolute tolerance used: {tolerance:e}"));
    for (label, values) in witnesses {
        report = report.with_witness(label, values);
    }
    Ok(report)
}

/// Validation contract: for 1 ≤ k ≤ max order, Richardson central differences
/// of φ^(k−1) agree with φ^(k) to relative tolerance `rel_tol` at `points`
/// interior samples of `(a, b)`.
pub fn validate_oracle(oracle: &dyn DerivativeOracle, (a, b): (f64, f64), max_order: usize, points: usize, rel_tol: f64) -> CheckReport {
    let grid = interior_grid(a, b, points);
    let mut worst: f64 = 0.0;
    let mut witness = Vec::new();
    for k in 1..=max_order.min(oracle.max_order()) {
        for &t in &grid {
            let h = 1e-2 * (b - a).min(t - a).min(b - t).max(1e-6);
            let fd = richardson_derivative(|x| oracle.derivative(x, k - 1), t, 1, h, 4);
            let an = oracle.derivative(t, k);
            let scale = an.abs().max(fd.abs()).max(1e-300);
            let err = (fd - an).abs() / scale;
            // Values that are zero to rounding carry no relative information.
            let floor = 1e-10 * (oracle.derivative(t, k - 1).abs() + 1.0);
            let err = if (fd - an).abs() <= floor { 0.0 } else { err };
            if err > worst {
                worst = err;
                witness = vec![k as f64, t, an, fd];
            }
        }
    }
    CheckReport::judged(
        "curve.oracle-fd",
        json!({"oracle": oracle.label(), "domain": [a, b], "points": points, "max_order": max_order}),
        worst,
        0.0,
        Relation::AtMost,
        rel_tol,
    )
    .with_witness("worst (order, t, analytic, finite-difference)", witness)
}

/// γ(t) = (t^{a_1}, …, t^{a_d}) on (lo, hi) ⊂ (0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousCurve {
    exponents: Vec<f64>,
    homogeneous_dimension: f64,
    lo: f64,
    hi: f64,
}

impl HomogeneousCurve {
    pub fn new(exponents: Vec<f64>, (lo, hi): (f64, f64)) -> Result<Self> {
        if exponents.len() < 2 {
            return validation("a homogeneous curve needs at least two exponents");
        }
        if exponents.iter().any(|a| *a == 0.0 || !a.is_finite()) {
            return validation("homogeneous exponents must be finite and nonzero");
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return validation("homogeneous exponents must be strictly increasing");
        }
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return validation(format!("domain ({lo}, {hi}) must satisfy 0 ≤ lo < hi < ∞"));
        }
        let homogeneous_dimension = exponents.iter().sum();
        Ok(HomogeneousCurve { exponents, homogeneous_dimension, lo, hi })
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// D = Σ a_i.
    pub fn homogeneous_dimension(&self) -> f64 {
        self.homogeneous_dimension
    }

    /// The nondegenerate value D_0 = d(d+1)/2.
    pub fn nondegenerate_dimension(&self) -> f64 {
        let d = self.exponents.len();
        (d * (d + 1)) as f64 / 2.0
    }

    /// The nonisotropic dilation diag(λ^{a_1}, …, λ^{a_d}) applied to ξ.
    pub fn dilate(&self, lambda: f64, xi: &[f64]) -> Vec<f64> {
        self.exponents.iter().zip(xi).map(|(a, x)| lambda.powf(*a) * x).collect()
    }

    /// Unchecked evaluation (any t > 0), used by rescaling identities.
    pub fn raw_derivative(&self, t: f64, k: usize) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|&a| falling_factorial(a, k) * t.powf(a - k as f64))
            .collect()
    }
}

impl Curve for HomogeneousCurve {
    fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn derivative(&self, t: f64, k: usize) -> Result<Vec<f64>> {
        if !(t >= self.lo && t <= self.hi) || t <= 0.0 {
            return domain(format!("t = {t} outside ({}, {})", self.lo, self.hi));
        }
        Ok(self.raw_derivative(t, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic_curve() -> SimpleCurve {
        SimpleCurve::new(3, Arc::new(Polynomial::new(vec![0.0, 0.0, 0.0, 1.0 / 6.0])), (0.0, 2.0)).unwrap()
    }

    #[test]
    fn evaluate_moment_curve_point() {
        let c = cubic_curve();
        let p = evaluate_curve(&c, 1.0, 0).unwrap();
        assert_eq!(p, vec![1.0, 0.5, 1.0 / 6.0]);
        let v = evaluate_curve(&c, 1.3, 1).unwrap();
        assert_eq!(v[0], 1.0);
    }

    #[test]
    fn evaluate_third_derivative_of_quartic() {
        let c = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
        let v = evaluate_curve(&c, 0.5, 3).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 24.0 * 0.5]);
    }

    #[test]
    fn evaluate_errors() {
        let c = SimpleCurve::monomial(3, 4.0, (0.0, 1.0)).unwrap();
        assert!(matches!(evaluate_curve(&c, 1.5, 0), Err(LabError::Domain(_))));
        let flat = SimpleCurve::new(
            3,
            Arc::new(Flattened::new(Arc::new(Monomial::new(4.0)), FlattenVariant::Exp, 3, 0.0, 1.0, 1e-10)),
            (0.0, 1.0),
        )
        .unwrap();
        assert!(matches!(evaluate_curve(&flat, 0.5, 4), Err(LabError::Capability(_))));
    }

    #[test]
    fn dimension_guard() {
        let phi: Oracle = Arc::new(Monomial::new(8.0));
        assert!(matches!(SimpleCurve::new(6, phi.clone(), (0.0, 1.0)), Err(LabError::Capability(_))));
        let opts = CurveOptions { allow_high_dimension: true, ..CurveOptions::default() };
        assert!(SimpleCurve::with_options(6, phi, (0.0, 1.0), opts).is_ok());
    }

    #[test]
    fn endpoint_clamp() {
        let c = SimpleCurve::monomial(2, 2.5, (0.0, 1.0)).unwrap();
        // φ''' = 3.75·t^{−1/2} blows up at 0 and is evaluated just inside.
        let v = c.phi_derivative(0.0, 3).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert_eq!(c.phi_derivative(0.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn weights() {
        assert!((affine_weight(&cubic_curve(), 0.7).unwrap() - 1.0).abs() < 1e-15);
        let c = SimpleCurve::monomial(2, 3.0, (0.0, 1.0)).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let w = affine_weight(&c, t).unwrap();
            assert!((w - (6.0 * t).powf(1.0 / 3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn determinant_weight_matches_simple_formula() {
        let c = SimpleCurve::monomial(3, 4.5, (0.0, 1.0)).unwrap();
        let cols: Vec<Vec<f64>> = (1..=3).map(|k| evaluate_curve(&c, 0.4, k).unwrap()).collect();
        let det = determinant_of_columns(&cols);
        let w = affine_weight(&c, 0.4).unwrap();
        assert!((det.abs().powf(1.0 / 6.0) - w).abs() < 1e-13);
    }

    #[test]
    fn normalize_examples() {
        let c = SimpleCurve::monomial(3, 2.5, (0.0, 2.0)).unwrap();
        let n = normalize_domain(&c).unwrap();
        assert_eq!(n.bounds(), (0.0, 1.0));
        for k in 0..=3 {
            let t = 0.3;
            let want = 2f64.powi(k as i32) * c.phi_derivative(2.0 * t, k).unwrap();
            assert!((n.phi_derivative(t, k).unwrap() - want).abs() < 1e-13 * want.abs().max(1.0));
        }
        let c = SimpleCurve::monomial(3, 4.0, (0.0, 0.5)).unwrap();
        let n = normalize_domain(&c).unwrap();
        let t = 0.8;
        assert!((n.phi_derivative(t, 3).unwrap() - 0.125 * 24.0 * (0.5 * t)).abs() < 1e-14);
        let unit = SimpleCurve::monomial(3, 4.0, (0.2, 1.0)).unwrap();
        let same = normalize_domain(&unit).unwrap();
        assert_eq!(same.bounds(), unit.bounds());
        assert_eq!(same.phi_derivative(0.5, 2).unwrap(), unit.phi_derivative(0.5, 2).unwrap());
    }

    #[test]
    fn monotone_examples() {
        let c = SimpleCurve::monomial(3, 3.5, (0.0, 1.0)).unwrap();
        assert!(validate_monotone(&c, 200).unwrap().pass);
        let neg = SimpleCurve::new(2, Arc::new(Polynomial::new(vec![0.0, -1.0])), (0.0, 1.0)).unwrap();
        let r = validate_monotone(&neg, 50).unwrap();
        assert!(!r.pass);
        assert!(!r.witnesses.is_empty());
        assert!(validate_monotone(&c, 1).is_err());
    }

    #[test]
    fn homogeneous_dimension_is_exponent_sum() {
        let h = HomogeneousCurve::new(vec![1.0, 1.5, 6.5], (0.0, 1.0)).unwrap();
        assert_eq!(h.homogeneous_dimension(), 9.0);
        assert!(HomogeneousCurve::new(vec![1.0, 0.0, 2.0], (0.0, 1.0)).is_err());
        assert!(HomogeneousCurve::new(vec![2.0, 1.0], (0.0, 1.0)).is_err());
    }
}
