//! Offspring curves Γ(t, h) = Σ_j γ(t + κ_j(h)), their Jacobian J_φ(t, h)
//! evaluated three independent ways, the affine offspring decomposition, and
//! the sampled lower bound J_φ ≥ σ·v(h)·(∏ φ^(d)(t + κ_i))^{1/d}.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curve::{affine_weight, evaluate_curve, factorial, Oracle, ShiftAverage, SimpleCurve};
use crate::error::{domain, LabError, Result};
use crate::linalg::{determinant, determinant_of_columns};
use crate::quadrature::{simplex_rule, GaussLegendre};
use crate::report::{CheckReport, Relation, Series};
use crate::sampling::{latin_hypercube, log_uniform, substream};
use crate::vandermonde::{vandermonde, GapVector};

/// ∏_{j=1}^{n} j!.
pub fn superfactorial(n: usize) -> f64 {
    (1..=n).map(factorial).product()
}

fn check_gaps(curve: &SimpleCurve, h: &GapVector) -> Result<()> {
    if h.dim() != curve.dimension() {
        return Err(LabError::Validation(format!(
            "curve has d = {} but the gap vector has {} entries",
            curve.dimension(),
            h.gaps().len()
        )));
    }
    Ok(())
}

/// Nodes s_j = t + κ_j(h), checked against the domain.
pub fn nodes(curve: &SimpleCurve, t: f64, h: &GapVector) -> Result<Vec<f64>> {
    check_gaps(curve, h)?;
    let s: Vec<f64> = h.kappa().iter().map(|k| t + k).collect();
    let (a, b) = curve.bounds();
    let last = s[s.len() - 1];
    if t < a || last > b {
        return domain(format!("offsets [{t}, {last}] leave the domain ({a}, {b})"));
    }
    Ok(s)
}

/// Γ(t, h) = Σ_{j=1}^d γ(t + κ_j(h)).
pub fn offspring_point(curve: &SimpleCurve, t: f64, h: &GapVector) -> Result<Vec<f64>> {
    let s = nodes(curve, t, h)?;
    let mut out = vec![0.0; curve.dimension()];
    for sj in s {
        for (o, g) in out.iter_mut().zip(evaluate_curve(curve, sj, 0)?) {
            *o += g;
        }
    }
    Ok(out)
}

/// J_φ(t, h) as the determinant with columns (1, s_j, …, s_j^{d−2}/(d−2)!, φ'(s_j)).
pub fn jacobian_direct(curve: &SimpleCurve, t: f64, h: &GapVector) -> Result<f64> {
    let s = nodes(curve, t, h)?;
    let d = curve.dimension();
    let cols = s
        .iter()
        .map(|&sj| {
            let mut col: Vec<f64> = (0..d - 1).map(|p| sj.powi(p as i32) / factorial(p)).collect();
            col.push(curve.phi_derivative(sj, 1)?);
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(determinant_of_columns(&cols))
}

/// Quadrature controls for [`jacobian_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianQuadrature {
    pub start_order: usize,
    pub max_order: usize,
    /// Successive orders must agree to rel_tol·(1 + |J|).
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for JacobianQuadrature {
    fn default() -> Self {
        JacobianQuadrature { start_order: 4, max_order: 16, rel_tol: 1e-12, max_evals: 60_000_000 }
    }
}

/// J_k(s; φ^(m)) = ∫_{[s_1,s_2]×…×[s_{k−1},s_k]} J_{k−1}(σ; φ^(m+1)) dσ,
/// down to J_2(s; φ^(d−2)) = ∫_{s_1}^{s_2} φ^(d)(u) du.
fn iterated_jacobian(phi: &Oracle, s: &[f64], m: usize, rule: &GaussLegendre) -> f64 {
    let k = s.len();
    if k == 2 {
        return rule.integrate(s[0], s[1], |u| phi.derivative(u, m + 2));
    }
    let n = k - 1;
    let mapped: Vec<Vec<(f64, f64)>> = (0..n).map(|i| rule.mapped(s[i], s[i + 1]).collect()).collect();
    let order = rule.order();
    let mut idx = vec![0usize; n];
    let mut sigma = vec![0.0; n];
    let mut acc = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..n {
            let (x, wi) = mapped[i][idx[i]];
            sigma[i] = x;
            w *= wi;
        }
        acc += w * iterated_jacobian(phi, &sigma, m + 1, rule);
        let mut i = 0;
        loop {
            if i == n {
                return acc;
            }
            idx[i] += 1;
            if idx[i] < order {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// J_φ(t, h) through the iterated-integral representation, escalating the
/// Gauss–Legendre order until two successive orders agree.
pub fn jacobian_integral(curve: &SimpleCurve, t: f64, h: &GapVector) -> Result<f64> {
    jacobian_integral_with(curve, t, h, &JacobianQuadrature::default())
}

pub fn jacobian_integral_with(curve: &SimpleCurve, t: f64, h: &GapVector, q: &JacobianQuadrature) -> Result<f64> {
    let s = nodes(curve, t, h)?;
    let d = curve.dimension();
    let dims = (d * (d - 1) / 2) as u32;
    let phi = curve.phi();
    let mut order = q.start_order;
    let mut prev = iterated_jacobian(phi, &s, 0, GaussLegendre::get(order));
    let mut history = vec![(order, prev)];
    while order + 2 <= q.max_order && (order + 2).pow(dims) <= q.max_evals {
        order += 2;
        let next = iterated_jacobian(phi, &s, 0, GaussLegendre::get(order));
        history.push((order, next));
        if (next - prev).abs() <= q.rel_tol * (1.0 + next.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(LabError::Numerical(format!(
        "iterated Jacobian quadrature did not settle at (t, h) = ({t}, {:?}); (order, value) history: {history:?}",
        h.gaps()
    )))
}

/// J_φ(t, h) = v(h)/∏_{j=0}^{d−2} j! · φ'[s_1, …, s_d], with the divided
/// difference written as a simplex average of φ^(d) (Hermite–Genocchi).
///
/// Free of the cancellation that hits the determinant when gaps are small.
pub fn jacobian_simplex(curve: &SimpleCurve, t: f64, h: &GapVector, order: usize) -> Result<f64> {
    let s = nodes(curve, t, h)?;
    let d = curve.dimension();
    let phi = curve.phi();
    let avg: f64 = simplex_rule(d - 1, order)
        .iter()
        .map(|(w, wt)| wt * phi.derivative(s.iter().zip(w).map(|(x, y)| x * y).sum(), d))
        .sum();
    let norm: f64 = (0..=d - 2).map(factorial).product();
    Ok(vandermonde(&h.kappa()) / norm * avg)
}

/// Random admissible polynomial φ = Σ_{j=d}^{d+3} c_j t^j/j! on (0, 1) with
/// c_d ∈ [0.1, 1] and c_j ∈ [0, 1]: every derivative is nonnegative there.
pub fn random_admissible_polynomial(d: usize, rng: &mut impl rand::Rng) -> Result<SimpleCurve> {
    let mut coeffs = vec![0.0; d + 4];
    for j in d..d + 4 {
        let c = if j == d { rng.gen_range(0.1..1.0) } else { rng.gen_range(0.0..1.0) };
        coeffs[j] = c / factorial(j);
    }
    SimpleCurve::new(d, Arc::new(crate::curve::Polynomial::new(coeffs)), (0.0, 1.0))
}

/// Gaps in [0.02, 0.6/(d−1)] and t with t + κ_d ≤ 1.
fn random_offsets(d: usize, rng: &mut impl rand::Rng) -> Result<(f64, GapVector)> {
    let top = 0.6 / (d - 1) as f64;
    let gaps: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(0.02..top)).collect();
    let total: f64 = gaps.iter().sum();
    let t = rng.gen_range(0.0..1.0 - total);
    Ok((t, GapVector::new(gaps)?))
}

/// |jacobian_direct − jacobian_integral| ≤ 1e−8·(1 + |J|) over random
/// admissible polynomials and offsets for each d.
pub fn check_jacobian_identity(dims: &[usize], samples: usize, seed: u64) -> Result<CheckReport> {
    let jobs: Vec<(usize, usize)> = dims.iter().flat_map(|&d| (0..samples).map(move |i| (d, i))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(d, i)| -> Result<Vec<f64>> {
            let mut rng = substream(seed, (d as u64) << 32 | i as u64);
            let curve = random_admissible_polynomial(d, &mut rng)?;
            let (t, h) = random_offsets(d, &mut rng)?;
            let direct = jacobian_direct(&curve, t, &h)?;
            let integral = jacobian_integral(&curve, t, &h)?;
            Ok(vec![d as f64, t, direct, integral, (direct - integral).abs() / (1.0 + direct.abs())])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut series = Series::new("jacobian-pairs", &["d", "t", "direct", "integral", "scaled_error"]);
    let mut worst: f64 = 0.0;
    for r in rows {
        worst = worst.max(r[4]);
        series.push(r);
    }
    Ok(CheckReport::judged(
        "offspring.jacobian-identity",
        json!({"d": dims, "samples": samples, "seed": seed}),
        worst,
        0.0,
        Relation::AtMost,
        1e-8,
    )
    .with_series(series))
}

/// For φ = t^d/d!: J_φ(t, h)·∏_{j=1}^{d−1} j! = v(h), relative error.
pub fn check_monomial_closed_form(dims: &[usize], samples: usize, seed: u64) -> Result<CheckReport> {
    let mut worst: f64 = 0.0;
    let mut series = Series::new("monomial-closed-form", &["d", "t", "scaled_jacobian", "v", "relative_error"]);
    for &d in dims {
        let curve = SimpleCurve::new(d, Arc::new(crate::curve::Monomial::scaled(1.0 / factorial(d), d as f64)), (0.0, 1.0))?;
        let mut rng = substream(seed, d as u64);
        for _ in 0..samples {
            let (t, h) = random_offsets(d, &mut rng)?;
            let lhs = jacobian_direct(&curve, t, &h)? * superfactorial(d - 1);
            let v = h.v();
            let err = (lhs - v).abs() / v.abs();
            worst = worst.max(err);
            series.push(vec![d as f64, t, lhs, v, err]);
        }
    }
    Ok(CheckReport::judged(
        "offspring.monomial-closed-form",
        json!({"d": dims, "samples": samples, "seed": seed}),
        worst,
        0.0,
        Relation::AtMost,
        1e-10,
    )
    .with_series(series))
}

/// Γ(t, h) = 𝔳(h) + d·𝔄(h)·γ̃(t + h̄), with γ̃ = (s, …, s^{d−1}/(d−1)!, φ̃(s)).
///
/// 𝔄 is lower triangular with unit diagonal and last row and column e_d;
/// entry (k, i), i < k, is d^{−1}Σ_ν c_ν^{k−i}/(k−i)! where c_ν = κ_ν − h̄.
#[derive(Debug, Clone)]
pub struct OffspringFrame {
    pub d: usize,
    pub hbar: f64,
    pub shift: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
    pub phi_tilde: Oracle,
    pub offsets: Vec<f64>,
}

impl OffspringFrame {
    /// γ̃(s).
    pub fn gamma_tilde(&self, s: f64) -> Vec<f64> {
        let mut g: Vec<f64> = (1..self.d).map(|i| s.powi(i as i32) / factorial(i)).collect();
        g.push(self.phi_tilde.derivative(s, 0));
        g
    }

    /// 𝔳 + d·𝔄·γ̃(t + h̄).
    pub fn reconstruct(&self, t: f64) -> Vec<f64> {
        let g = self.gamma_tilde(t + self.hbar);
        let d = self.d as f64;
        self.matrix
            .iter()
            .zip(&self.shift)
            .map(|(row, v)| v + d * row.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.matrix)
    }

    /// Domain of φ̃ given the parent domain (a, b).
    pub fn tilde_domain(&self, (a, b): (f64, f64)) -> (f64, f64) {
        let lo = self.offsets.iter().fold(f64::NEG_INFINITY, |m, c| m.max(a - c));
        let hi = self.offsets.iter().fold(f64::INFINITY, |m, c| m.min(b - c));
        (lo, hi)
    }
}

pub fn offspring_decomposition(curve: &SimpleCurve, h: &GapVector) -> Result<OffspringFrame> {
    check_gaps(curve, h)?;
    let d = curve.dimension();
    let kappa = h.kappa();
    let hbar = kappa.iter().sum::<f64>() / d as f64;
    let c: Vec<f64> = kappa.iter().map(|k| k - hbar).collect();
    let moment = |p: usize| c.iter().map(|x| x.powi(p as i32)).sum::<f64>() / factorial(p);
    let mut shift: Vec<f64> = (1..d).map(moment).collect();
    shift.push(0.0);
    let mut matrix = vec![vec![0.0; d]; d];
    for k in 0..d {
        matrix[k][k] = 1.0;
        if k < d - 1 {
            for i in 0..k {
                matrix[k][i] = moment(k - i) / d as f64;
            }
        }
    }
    let phi_tilde: Oracle = Arc::new(ShiftAverage { base: curve.phi().clone(), shifts: c.clone() });
    Ok(OffspringFrame { d, hbar, shift, matrix, phi_tilde, offsets: c })
}

/// The simple curve with φ replaced by φ̃(·; h) on its natural domain.
pub fn offspring_curve(curve: &SimpleCurve, h: &GapVector) -> Result<SimpleCurve> {
    let frame = offspring_decomposition(curve, h)?;
    let (lo, hi) = frame.tilde_domain(curve.bounds());
    let lo = lo.max(0.0);
    if !(hi > lo) {
        return domain(format!("offspring domain ({lo}, {hi}) is empty for h = {:?}", h.gaps()));
    }
    curve.with_phi(frame.phi_tilde, (lo, hi))
}

/// Sampling box for σ estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaSweep {
    pub samples: usize,
    /// Gap range; defaults to [1e−3, (b − a)/d].
    pub h_range: Option<[f64; 2]>,
    pub seed: u64,
    /// Simplex rule order for the stable Jacobian.
    pub order: usize,
}

impl Default for SigmaSweep {
    fn default() -> Self {
        SigmaSweep { samples: 400, h_range: None, seed: 0, order: 8 }
    }
}

/// Latin-hypercube samples (t, h) with log-uniform gaps and t + κ_d(h) < b.
pub fn admissible_samples(curve: &SimpleCurve, sweep: &SigmaSweep, stream: u64) -> Result<Vec<(f64, GapVector)>> {
    let d = curve.dimension();
    let (a, b) = curve.bounds();
    if !b.is_finite() {
        return Err(LabError::Unsupported("sampling needs a bounded domain".into()));
    }
    let [lo, hi] = sweep.h_range.unwrap_or([1e-3, (b - a) / d as f64]);
    if !(lo > 0.0 && hi >= lo) {
        return Err(LabError::Validation(format!("gap range [{lo}, {hi}] is invalid")));
    }
    let margin = 1e-9 * (b - a);
    let mut rng = substream(sweep.seed, stream);
    Ok(latin_hypercube(sweep.samples, d, &mut rng)
        .into_iter()
        .filter_map(|u| {
            let h: Vec<f64> = u[1..].iter().map(|&x| log_uniform(x, lo, hi)).collect();
            let total: f64 = h.iter().sum();
            let room = b - a - total - 2.0 * margin;
            (room > 0.0).then(|| (a + margin + u[0] * room, GapVector::new(h).expect("positive gaps")))
        })
        .collect())
}

/// J / (v(h)·(∏ φ^(d)(s_i))^{1/d}) at one sample; `None` when degenerate.
fn sigma_ratio(curve: &SimpleCurve, t: f64, h: &GapVector, order: usize) -> Result<Option<f64>> {
    let d = curve.dimension();
    let v = h.v();
    let scale = h.total().powi((d * (d - 1) / 2) as i32);
    if scale == 0.0 || v < 1e-12 * scale {
        return Ok(None);
    }
    let s = nodes(curve, t, h)?;
    let mut ln_gm = 0.0;
    for &x in &s {
        let ln = curve.ln_phi_derivative(x, d)?;
        if !ln.is_finite() {
            return Ok(None);
        }
        ln_gm += ln / d as f64;
    }
    let j = jacobian_simplex(curve, t, h, order)?;
    Ok(Some(j / v / ln_gm.exp()))
}

/// Empirical infimum of J_φ(t,h) / [v(h)·(∏ φ^(d)(t + κ_i))^{1/d}] over samples.
///
/// Passes iff positive. With `a_constant` (the A of the mean-value condition)
/// the product σ_est·A is reported alongside.
pub fn estimate_sigma(
    curve: &SimpleCurve,
    samples: &[(f64, GapVector)],
    a_constant: Option<f64>,
    order: usize,
) -> Result<CheckReport> {
    let ratios = samples
        .par_iter()
        .map(|(t, h)| sigma_ratio(curve, *t, h, order))
        .collect::<Result<Vec<_>>>()?;
    let degenerate = ratios.iter().filter(|r| r.is_none()).count();
    let params = json!({
        "d": curve.dimension(),
        "phi": curve.phi().label(),
        "domain": [curve.bounds().0, curve.bounds().1],
        "samples": samples.len(),
        "A": a_constant,
    });
    let mut best: Option<(usize, f64)> = None;
    let mut series = Series::new("sigma-ratio", &["t", "v", "ratio"]).with_kind("ratio-vs-parameter");
    for (i, r) in ratios.iter().enumerate() {
        if let Some(r) = *r {
            series.push(vec![samples[i].0, samples[i].1.v(), r]);
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((i, r));
            }
        }
    }
    let Some((imin, sigma)) = best else {
        return Ok(CheckReport::unbounded("offspring.sigma", params, f64::NAN, false)
            .inconclusive(format!("all {degenerate} samples were degenerate")));
    };
    let mut witness = vec![samples[imin].0];
    witness.extend_from_slice(samples[imin].1.gaps());
    let mut report = CheckReport::judged("offspring.sigma", params, sigma, 0.0, Relation::AtLeast, 0.0)
        .with_witness("minimiser (t, h…)", witness)
        .with_series(series)
        .with_note(format!("{degenerate} degenerate samples excluded"));
    if let Some(a) = a_constant {
        report = report.with_witness("(sigma_est, A, sigma_est·A)", vec![sigma, a, sigma * a]);
    }
    Ok(if sigma > 0.0 { report } else { report.fail_with("empirical infimum is not positive") })
}

/// σ_est(φ̃(·; h)) ≥ σ_est(φ)/d − tolerance, with each σ estimated on its own
/// admissible sample set.
pub fn check_offspring_closure(
    curve: &SimpleCurve,
    h: &GapVector,
    sweep: &SigmaSweep,
    tolerance: f64,
) -> Result<CheckReport> {
    let d = curve.dimension();
    let child = offspring_curve(curve, h)?;
    let parent_samples = admissible_samples(curve, sweep, 0)?;
    let mut child_sweep = sweep.clone();
    if child_sweep.h_range.is_none() {
        let (a, b) = child.bounds();
        child_sweep.h_range = Some([1e-3_f64.min((b - a) / d as f64), (b - a) / d as f64]);
    }
    let child_samples = admissible_samples(&child, &child_sweep, 1)?;
    let parent = estimate_sigma(curve, &parent_samples, None, sweep.order)?;
    let offspring = estimate_sigma(&child, &child_samples, None, sweep.order)?;
    let bound = parent.estimate / d as f64;
    let mut report = CheckReport::judged(
        "offspring.closure",
        json!({"d": d, "h": h.gaps(), "phi": curve.phi().label(), "samples": sweep.samples, "seed": sweep.seed}),
        offspring.estimate,
        bound,
        Relation::AtLeast,
        tolerance,
    )
    .with_witness("(sigma(phi), sigma(phi~), sigma(phi)/d)", vec![parent.estimate, offspring.estimate, bound]);
    if !parent.estimate.is_finite() || !offspring.estimate.is_finite() {
        report = report.inconclusive("a σ estimate had no usable samples");
    }
    Ok(report)
}

/// H(t, h) = ∏ w(t + κ_i); checks (∏φ^(d))^{1/d} = H^{(d+1)/2} and
/// J ≥ σ·v(h)·H^{(d+1)/2} over samples.
///
/// Without an explicit σ the infimum over the same samples is used, which
/// reduces the inequality to the identity.
pub fn weight_product_bound(
    curve: &SimpleCurve,
    samples: &[(f64, GapVector)],
    sigma: Option<f64>,
    order: usize,
) -> Result<CheckReport> {
    let d = curve.dimension();
    let rows = samples
        .par_iter()
        .map(|(t, h)| -> Result<Option<(f64, f64)>> {
            let s = nodes(curve, *t, h)?;
            let mut h_prod = 1.0;
            let mut gm = 1.0;
            for &x in &s {
                h_prod *= affine_weight(curve, x)?;
                gm *= curve.phi_derivative(x, d)?.abs().powf(1.0 / d as f64);
            }
            let hh = h_prod.powf((d + 1) as f64 / 2.0);
            let identity = if gm == 0.0 && hh == 0.0 { 0.0 } else { (gm - hh).abs() / gm.abs().max(hh) };
            let v = h.v();
            if v <= 0.0 || hh == 0.0 {
                return Ok(Some((identity, f64::NAN)));
            }
            let j = jacobian_simplex(curve, *t, h, order)?;
            Ok(Some((identity, j / (v * hh))))
        })
        .collect::<Result<Vec<_>>>()?;
    let identity = rows.iter().flatten().map(|r| r.0).fold(0.0, f64::max);
    let inf = rows.iter().flatten().map(|r| r.1).filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
    let sigma_used = sigma.unwrap_or(inf);
    let mut report = CheckReport::judged(
        "offspring.weight-product",
        json!({"d": d, "phi": curve.phi().label(), "samples": samples.len(), "sigma": sigma}),
        inf,
        sigma_used,
        Relation::AtLeast,
        1e-12 * sigma_used.abs(),
    )
    .with_witness("max relative residual of (prod phi^(d))^(1/d) = H^((d+1)/2)", vec![identity]);
    if sigma.is_none() {
        report = report.with_note("σ taken as the infimum over the same samples");
    }
    if identity > 1e-12 {
        report = report.fail_with(format!("weight identity residual {identity:e} exceeds 1e-12"));
    }
    Ok(report)
}
