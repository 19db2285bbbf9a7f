//! Constants of the mean-value and derivative-gap conditions, the example
//! families (including the flattening constructors) and exponent arithmetic.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curve::{validate_monotone, ExpFlat, Flattened, FlattenVariant, Oracle, SimpleCurve, DerivativeOracle};
use crate::error::{domain, validation, LabError, Result};
use crate::quadrature::GaussLegendre;
use crate::report::{CheckReport, Relation, Series};

/// Which mean the mean-value condition compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanVariant {
    /// φ^(d) at the arithmetic mean of the s_j.
    Am,
    /// φ^(d) at the geometric mean of the s_j.
    Gm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionId {
    Am,
    Gm,
    Phicond,
}

/// A sampled constant: grid supremum for A, σ = inf^{−α} for the gap condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    pub condition: ConditionId,
    pub constant: f64,
    pub attained_at: Vec<f64>,
    pub grid: String,
    /// Raw infimum behind σ (gap condition only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infimum: Option<f64>,
}

impl ConditionEstimate {
    /// A: passes iff ≤ `bound` + tol. Gap condition: passes iff the infimum is positive.
    pub fn to_report(&self, bound: Option<f64>, tolerance: f64) -> CheckReport {
        let params = json!({"condition": self.condition, "grid": self.grid});
        let r = match (self.condition, bound) {
            (ConditionId::Phicond, _) => {
                let inf = self.infimum.unwrap_or(f64::NAN);
                let r = CheckReport::judged("conditions.phicond", params, inf, 0.0, Relation::AtLeast, 0.0)
                    .with_witness("sigma", vec![self.constant]);
                if inf > 0.0 {
                    r
                } else {
                    r.fail_with("infimum is not positive")
                }
            }
            (_, Some(b)) => CheckReport::judged("conditions.mean-value", params, self.constant, b, Relation::AtMost, tolerance),
            (_, None) => CheckReport::unbounded("conditions.mean-value", params, self.constant, self.constant.is_finite()),
        };
        r.with_witness("attained at", self.attained_at.clone())
    }
}

/// Grid of `n` points from a + ε to b − ε.
fn closed_grid(curve: &SimpleCurve, n: usize) -> Result<Vec<f64>> {
    let (a, b) = curve.bounds();
    if !b.is_finite() {
        return Err(LabError::Unsupported("condition scans need a bounded domain".into()));
    }
    if n < 2 {
        return validation("grid size must be at least 2");
    }
    let eps = curve.options().endpoint_fraction * (b - a);
    Ok((0..n).map(|i| (a + eps) + (b - a - 2.0 * eps) * i as f64 / (n - 1) as f64).collect())
}

/// Golden-section maximisation of `f` on [lo, hi].
fn golden_max(mut lo: f64, mut hi: f64, iters: usize, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Coordinate-wise golden-section ascent that keeps s sorted within [lo, hi].
fn refine_sorted(s: &mut [f64], best: &mut f64, lo: f64, hi: f64, sweeps: usize, f: &impl Fn(&[f64]) -> f64) {
    let n = s.len();
    for _ in 0..sweeps {
        let before = *best;
        for i in 0..n {
            let left = if i == 0 { lo } else { s[i - 1] };
            let right = if i + 1 == n { hi } else { s[i + 1] };
            if right <= left {
                continue;
            }
            let mut trial = s.to_vec();
            let (x, v) = golden_max(left, right, 40, |x| {
                trial[i] = x;
                f(&trial)
            });
            // Boundary values are not reached by golden section; try them too.
            for (cand_x, cand_v) in [(x, v), (left, { trial[i] = left; f(&trial) }), (right, { trial[i] = right; f(&trial) })] {
                if cand_v > *best {
                    *best = cand_v;
                    s[i] = cand_x;
                }
            }
        }
        if *best <= before {
            break;
        }
    }
}

/// Visits every nondecreasing index tuple of length `d` over `n` grid points.
fn for_each_sorted_tuple(n: usize, d: usize, first: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx = vec![first; d];
    loop {
        visit(&idx);
        let mut k = d;
        loop {
            if k == 1 {
                return;
            }
            k -= 1;
            if idx[k] + 1 < n {
                idx[k] += 1;
                for j in k + 1..d {
                    idx[j] = idx[k];
                }
                break;
            }
        }
    }
}

/// Grid supremum over a < s_1 ≤ … ≤ s_d < b of
/// (∏ φ^(d)(s_j))^{1/d} / φ^(d)(mean s), refined around the maximiser.
///
/// Works with ln φ^(d), so flat families do not underflow.
pub fn estimate_a(curve: &SimpleCurve, variant: MeanVariant, grid_size: usize) -> Result<ConditionEstimate> {
    let d = curve.dimension();
    let grid = closed_grid(curve, grid_size)?;
    let ln_top = grid.iter().map(|&t| curve.ln_phi_derivative(t, d)).collect::<Result<Vec<_>>>()?;
    if let Some(i) = ln_top.iter().position(|v| !v.is_finite()) {
        return validation(format!("φ^(d) is not positive at t = {}", grid[i]));
    }
    let phi = curve.phi().clone();
    let ln_ratio = |s: &[f64]| -> f64 {
        let mean = match variant {
            MeanVariant::Am => s.iter().sum::<f64>() / d as f64,
            MeanVariant::Gm => (s.iter().map(|x| x.ln()).sum::<f64>() / d as f64).exp(),
        };
        let gm = s.iter().map(|&x| phi.ln_derivative(x, d)).sum::<f64>() / d as f64;
        gm - phi.ln_derivative(mean, d)
    };
    let n = grid.len();
    let per_first: Vec<(f64, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best = (f64::NEG_INFINITY, Vec::new());
            let mut s = vec![0.0; d];
            // Only tuples starting at `first`: idx[0] fixed.
            for_each_sorted_tuple(n, d, first, |idx| {
                if idx[0] != first {
                    return;
                }
                for (x, &i) in s.iter_mut().zip(idx) {
                    *x = grid[i];
                }
                let gm = idx.iter().map(|&i| ln_top[i]).sum::<f64>() / d as f64;
                let mean = match variant {
                    MeanVariant::Am => s.iter().sum::<f64>() / d as f64,
                    MeanVariant::Gm => (s.iter().map(|x| x.ln()).sum::<f64>() / d as f64).exp(),
                };
                let v = gm - phi.ln_derivative(mean, d);
                if v > best.0 {
                    best = (v, s.clone());
                }
            });
            best
        })
        .collect();
    let (mut best, mut at) = per_first
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, x| if x.0 > acc.0 { x } else { acc });
    refine_sorted(&mut at, &mut best, grid[0], grid[n - 1], 6, &ln_ratio);
    Ok(ConditionEstimate {
        condition: match variant {
            MeanVariant::Am => ConditionId::Am,
            MeanVariant::Gm => ConditionId::Gm,
        },
        constant: best.exp(),
        attained_at: at,
        grid: format!("{grid_size} points on [{}, {}], sorted {d}-tuples, golden-section refinement", grid[0], grid[n - 1]),
        infimum: None,
    })
}

/// Admissible α for the gap condition: 0 < α ≤ 2/(d(d+1)) (d ≥ 3) or 0 < α < 1/3 (d = 2).
pub fn check_alpha(d: usize, alpha: f64) -> Result<()> {
    let top = 2.0 / (d * (d + 1)) as f64;
    let ok = alpha > 0.0 && if d == 2 { alpha < top } else { alpha <= top };
    if !ok {
        return validation(format!("α = {alpha} outside the admissible range for d = {d}"));
    }
    Ok(())
}

/// ρ = 1/α + 1 − d(d+1)/2.
pub fn gap_exponent(d: usize, alpha: f64) -> f64 {
    1.0 / alpha + 1.0 - (d * (d + 1)) as f64 / 2.0
}

/// φ^(d−1)(s) − φ^(d−1)(t), by quadrature of φ^(d) when s − t is small.
fn top_increment(curve: &SimpleCurve, t: f64, s: f64) -> Result<f64> {
    let d = curve.dimension();
    let (a, b) = curve.bounds();
    if s - t > 1e-3 * (b - a) {
        return Ok(curve.phi_derivative(s, d - 1)? - curve.phi_derivative(t, d - 1)?);
    }
    let phi = curve.phi();
    Ok(GaussLegendre::get(10).integrate(t, s, |u| phi.derivative(u, d)))
}

/// inf over a < t < s < b of (φ^(d−1)(s) − φ^(d−1)(t)) / (s − t)^ρ, with σ = inf^{−α}.
pub fn check_phicond(curve: &SimpleCurve, alpha: f64, grid_size: usize) -> Result<ConditionEstimate> {
    let d = curve.dimension();
    check_alpha(d, alpha)?;
    let rho = gap_exponent(d, alpha);
    let grid = closed_grid(curve, grid_size)?;
    let n = grid.len();
    let quotient = |t: f64, s: f64| -> f64 {
        match top_increment(curve, t, s) {
            Ok(inc) => inc / (s - t).powf(rho),
            Err(_) => f64::NAN,
        }
    };
    let rows: Vec<(f64, f64, f64)> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| (quotient(grid[i], grid[j]), grid[i], grid[j]))
                .fold((f64::INFINITY, 0.0, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc })
        })
        .collect();
    let (mut inf, t0, s0) = rows.into_iter().fold((f64::INFINITY, 0.0, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc });
    if inf.is_nan() {
        return Err(LabError::Numerical("difference quotient was not finite".into()));
    }
    let mut at = vec![t0, s0];
    let neg = |p: &[f64]| if p[1] > p[0] { -quotient(p[0], p[1]) } else { f64::NEG_INFINITY };
    let mut best = -inf;
    refine_sorted(&mut at, &mut best, grid[0], grid[n - 1], 6, &neg);
    inf = -best;
    Ok(ConditionEstimate {
        condition: ConditionId::Phicond,
        constant: inf.powf(-alpha),
        attained_at: at,
        grid: format!("{grid_size} points, pairs t < s, ρ = {rho}"),
        infimum: Some(inf),
    })
}

/// Flattening step: ψ^(d) = (d−1)!·exp(−1/φ^(d)) or (d−1)!·log φ^(d); lower
/// derivatives by cumulative quadrature from the left endpoint.
pub fn build_flattened(base: &SimpleCurve, variant: FlattenVariant) -> Result<SimpleCurve> {
    let d = base.dimension();
    let (a, b) = base.bounds();
    if !b.is_finite() {
        return Err(LabError::Unsupported("flattening needs a bounded domain".into()));
    }
    let mono = validate_monotone(base, 64)?;
    if !mono.pass {
        return validation(format!("base curve {} is not monotone: {:?}", base.phi().label(), mono.witnesses));
    }
    if variant == FlattenVariant::Log {
        for t in closed_grid(base, 256)? {
            let v = base.phi_derivative(t, d)?;
            if !(v > std::f64::consts::E) {
                return validation(format!("log flattening needs φ^(d) > e, but φ^(d)({t}) = {v}"));
            }
        }
    }
    let phi: Oracle = Arc::new(Flattened::new(base.phi().clone(), variant, d, a, b, 1e-9));
    base.with_phi(phi, (a, b))
}

/// φ^(d)(t) for φ(t) = exp(−t^{−β}), from the closed form with recursive coefficients.
pub fn expflat_derivatives(beta: f64, d: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    if !(beta > 0.0) {
        return validation("β must be positive");
    }
    if d > 5 {
        return Err(LabError::Capability(format!("order {d} exceeds 5")));
    }
    Ok(ExpFlat::new(beta).derivative(t, d))
}

/// [`expflat_derivatives`] against Richardson-extrapolated order-k central
/// differences of exp(−t^{−β}) at the given points, for k = 1..=d.
pub fn check_expflat(beta: f64, d: usize, points: &[f64]) -> Result<CheckReport> {
    let f = |t: f64| (-t.powf(-beta)).exp();
    let mut worst: f64 = 0.0;
    let mut series = Series::new("expflat-derivatives", &["k", "t", "recursion", "finite_difference", "relative_error"]);
    for k in 1..=d {
        let exact: Vec<f64> = points.iter().map(|&t| expflat_derivatives(beta, k, t)).collect::<Result<_>>()?;
        // Relative error, floored near sign changes of φ^(k).
        let floor = 1e-6 * exact.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for (&t, &e) in points.iter().zip(&exact) {
            // Step tied to the local scale t^{β+1}/β of exp(−t^{−β}).
            let step = 0.2 * t.powf(beta + 1.0) / beta;
            let fd = crate::finite_diff::richardson_derivative(f, t, k, step, 4);
            let err = (e - fd).abs() / e.abs().max(floor).max(f64::MIN_POSITIVE);
            worst = worst.max(err);
            series.push(vec![k as f64, t, e, fd, err]);
        }
    }
    Ok(CheckReport::judged(
        "conditions.expflat-derivatives",
        json!({"beta": beta, "d": d, "t": points}),
        worst,
        0.0,
        Relation::AtMost,
        1e-4,
    )
    .with_series(series))
}

/// Inputs to [`exponent_calculator`]; every field except `d` is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentInput {
    pub d: usize,
    /// Interpolation exponent p ∈ (1, p_d).
    #[serde(default)]
    pub p: Option<f64>,
    /// Source exponent P ∈ [1, p_d) of the restriction inequality.
    #[serde(default, rename = "P")]
    pub big_p: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Weak-type exponent s of 1/w.
    #[serde(default)]
    pub s: Option<f64>,
    /// Homogeneous dimension D.
    #[serde(default, rename = "D")]
    pub homogeneous_dimension: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationExponents {
    pub p: f64,
    pub p_prime: f64,
    pub q: f64,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub eta: f64,
    /// |η − (d+1)ϑ/4 − 1/p|.
    pub eta_residual: f64,
    /// max(|s − q/d|, |s − (d+1)p'/2|).
    pub s_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub d: usize,
    pub p_d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restriction_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<InterpolationExponents>,
    /// q = 1 + 1/α.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// q with 1/q = 1/p_d + 1/(s·p_d).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_q: Option<f64>,
    /// (D + 1)(1 − 1/p_d) − 1, positive iff D > d(d+1)/2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homogeneous_excess: Option<f64>,
}

/// p_d = (d² + d + 2)/(d² + d).
pub fn p_d(d: usize) -> f64 {
    let n = (d * d + d) as f64;
    (n + 2.0) / n
}

/// δ(α) = (1 − (2d − 1)α)/(1 − α).
pub fn delta_alpha(d: usize, alpha: f64) -> f64 {
    (1.0 - (2 * d - 1) as f64 * alpha) / (1.0 - alpha)
}

pub fn interpolation_exponents(d: usize, p: f64) -> Result<InterpolationExponents> {
    let pd = p_d(d);
    if !(p > 1.0 && p < pd) {
        return validation(format!("p = {p} must lie in (1, {pd})"));
    }
    let df = d as f64;
    let p_prime = p / (p - 1.0);
    let q = (df * df + df) * p_prime / 2.0;
    let theta = 2.0 * (df - 1.0) / (q - 2.0);
    let a = 1.0 / (1.0 - theta / 2.0);
    let b = 1.0 / (1.0 / p + theta * (0.5 - 1.0 / p));
    let s = 1.0 / ((1.0 - theta) / q + theta / 2.0);
    let eta = 1.0 - (df + 1.0) / (2.0 * q) * (1.0 - theta);
    let eta_residual = (eta - (df + 1.0) * theta / 4.0 - 1.0 / p).abs();
    let s_residual = (s - q / df).abs().max((s - (df + 1.0) * p_prime / 2.0).abs());
    Ok(InterpolationExponents { p, p_prime, q, theta, a, b, s, eta, eta_residual, s_residual })
}

pub fn exponent_calculator(input: &ExponentInput) -> Result<ExponentRecord> {
    let d = input.d;
    if d < 2 {
        return validation("d must be at least 2");
    }
    let pd = p_d(d);
    let df = d as f64;
    let restriction_q = match input.big_p {
        Some(pp) if !(pp >= 1.0 && pp < pd) => return validation(format!("P = {pp} must lie in [1, {pd})")),
        Some(pp) => Some(2.0 / (df * (df + 1.0) * (1.0 - 1.0 / pp))),
        None => None,
    };
    let interpolation = input.p.map(|p| interpolation_exponents(d, p)).transpose()?;
    let (alpha_q, delta) = match input.alpha {
        Some(al) => {
            check_alpha(d, al)?;
            (Some(1.0 + 1.0 / al), Some(delta_alpha(d, al)))
        }
        None => (None, None),
    };
    let weak_q = match input.s {
        Some(s) if !(s > 0.0) => return validation("s must be positive"),
        Some(s) => Some(1.0 / (1.0 / pd + 1.0 / (s * pd))),
        None => None,
    };
    let homogeneous_excess = input.homogeneous_dimension.map(|dd| (dd + 1.0) * (1.0 - 1.0 / pd) - 1.0);
    Ok(ExponentRecord { d, p_d: pd, restriction_q, interpolation, alpha_q, delta, weak_q, homogeneous_excess })
}

/// Exponent identities on an n-point grid of p ∈ (1, p_d) and δ(α) on a grid of
/// admissible α; the estimate is the largest identity residual.
pub fn check_exponent_identities(d: usize, n: usize) -> Result<CheckReport> {
    let pd = p_d(d);
    let mut worst: f64 = 0.0;
    let mut theta_ok = true;
    for i in 1..=n {
        let p = 1.0 + (pd - 1.0) * i as f64 / (n + 1) as f64;
        let e = interpolation_exponents(d, p)?;
        worst = worst.max(e.eta_residual).max(e.s_residual / e.s.max(1.0));
        theta_ok &= e.theta > 0.0 && e.theta < 1.0;
    }
    let top = 2.0 / (d * (d + 1)) as f64;
    let mut delta_ok = true;
    for i in 1..=n {
        let mut alpha = top * i as f64 / n as f64;
        if d == 2 && i == n {
            alpha = top * (1.0 - 1e-9);
        }
        let dl = delta_alpha(d, alpha);
        delta_ok &= dl > 0.0 && dl < 1.0;
    }
    let mut r = CheckReport::judged(
        "conditions.exponent-identities",
        json!({"d": d, "grid": n, "p_d": pd}),
        worst,
        0.0,
        Relation::AtMost,
        1e-14,
    );
    if !theta_ok {
        r = r.fail_with("ϑ(p) left (0, 1)");
    }
    if !delta_ok {
        r = r.fail_with("δ(α) left (0, 1)");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Exponential, Monomial, Polynomial};

    fn curve(d: usize, phi: impl DerivativeOracle + 'static, dom: (f64, f64)) -> SimpleCurve {
        SimpleCurve::new(d, Arc::new(phi), dom).unwrap()
    }

    #[test]
    fn gm_constant_for_monomials_is_one() {
        for beta in [3.0, 3.5, 6.0] {
            let c = curve(3, Monomial::new(beta), (0.0, 1.0));
            let e = estimate_a(&c, MeanVariant::Gm, 16).unwrap();
            assert!((e.constant - 1.0).abs() < 1e-9, "β={beta}: {}", e.constant);
        }
    }

    #[test]
    fn am_constant_for_exponential_is_one() {
        let c = curve(2, Exponential { scale: 1.0, rate: 1.0 }, (0.0, 1.0));
        let e = estimate_a(&c, MeanVariant::Am, 30).unwrap();
        assert!((e.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gm_constant_for_exponential() {
        let c = curve(2, Exponential { scale: 1.0, rate: 1.0 }, (0.0, 1.0));
        let e = estimate_a(&c, MeanVariant::Gm, 30).unwrap();
        // sup of exp(AM − GM) sits at (0, 1); the scan stops ε short of 0,
        // where √(s_1 s_2) is steep.
        assert!(e.constant <= 0.5f64.exp() && 0.5f64.exp() - e.constant < 1e-4, "{}", e.constant);
    }

    #[test]
    fn estimate_a_rejects_nonpositive_top_derivative() {
        let c = curve(2, Polynomial::new(vec![0.0, 0.0, -1.0]), (0.0, 1.0));
        assert!(matches!(estimate_a(&c, MeanVariant::Gm, 8), Err(LabError::Validation(_))));
    }

    #[test]
    fn phicond_linear_case() {
        // d = 3, α = 1/6 gives ρ = 1; φ'' = t has unit difference quotients.
        let c = curve(3, Polynomial::new(vec![0.0, 0.0, 0.0, 1.0 / 6.0]), (0.0, 1.0));
        let e = check_phicond(&c, 1.0 / 6.0, 20).unwrap();
        assert!((e.infimum.unwrap() - 1.0).abs() < 1e-10);
        assert!((e.constant - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phicond_quartic_infimum_is_left_endpoint() {
        let c = curve(3, Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 1.0 / 24.0]), (0.2, 1.0));
        let e = check_phicond(&c, 1.0 / 6.0, 40).unwrap();
        assert!((e.infimum.unwrap() - 0.2).abs() < 1e-6, "{:?}", e);
    }

    #[test]
    fn phicond_alpha_range() {
        let c = curve(3, Monomial::new(4.0), (0.0, 1.0));
        assert!(check_phicond(&c, 0.2, 10).is_err());
        let c2 = curve(2, Monomial::new(3.0), (0.0, 1.0));
        assert!(check_phicond(&c2, 1.0 / 3.0, 10).is_err());
    }

    #[test]
    fn log_flattening_needs_large_top_derivative() {
        let c = curve(3, Monomial::new(4.0), (0.0, 1.0));
        assert!(matches!(build_flattened(&c, FlattenVariant::Log), Err(LabError::Validation(_))));
        let big = curve(3, Monomial::scaled(10.0, 3.0), (0.0, 1.0));
        let f = build_flattened(&big, FlattenVariant::Log).unwrap();
        assert!((f.phi_derivative(0.5, 3).unwrap() - 2.0 * 60f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn expflat_first_order() {
        let t: f64 = 0.4;
        let v = expflat_derivatives(1.5, 1, t).unwrap();
        assert!((v - 1.5 * (-t.powf(-1.5)).exp() * t.powf(-2.5)).abs() < 1e-15);
        assert!(matches!(expflat_derivatives(1.0, 2, 0.0), Err(LabError::Domain(_))));
    }

    #[test]
    fn exponent_examples() {
        assert!((p_d(3) - 7.0 / 6.0).abs() < 1e-15);
        let r = exponent_calculator(&ExponentInput { d: 3, alpha: Some(1.0 / 6.0), ..Default::default() }).unwrap();
        assert!((r.alpha_q.unwrap() - 7.0).abs() < 1e-12);
        assert!((r.delta.unwrap() - 0.2).abs() < 1e-12);
        let r = exponent_calculator(&ExponentInput { d: 3, big_p: Some(9.0 / 8.0), ..Default::default() }).unwrap();
        assert!((r.restriction_q.unwrap() - 1.5).abs() < 1e-12);
        assert!(exponent_calculator(&ExponentInput { d: 3, p: Some(1.2), ..Default::default() }).is_err());
    }
}
