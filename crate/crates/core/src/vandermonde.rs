//! Vandermonde products, gap vectors, the recursive kernel Ψ_d and the
//! determinant identities and integral inequalities built on them.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curve::factorial;
use crate::error::{validation, LabError, Result};
use crate::quadrature::{refined_box, tensor_box, GaussLegendre};
use crate::report::{CheckReport, Relation, Series};
use crate::sampling::{latin_hypercube, log_uniform, substream};

/// Largest d for which Ψ_d is evaluated (nested cost grows like order^{d²/2}).
pub const MAX_PSI_DIMENSION: usize = 5;

/// ∏_{i<j} (x_j − x_i).
pub fn vandermonde(x: &[f64]) -> f64 {
    let mut acc = 1.0;
    for j in 1..x.len() {
        for i in 0..j {
            acc *= x[j] - x[i];
        }
    }
    acc
}

/// Gaps h = (h_1, …, h_{d−1}) between consecutive offspring nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GapVector {
    h: Vec<f64>,
}

impl TryFrom<Vec<f64>> for GapVector {
    type Error = LabError;

    fn try_from(h: Vec<f64>) -> Result<Self> {
        GapVector::new(h)
    }
}

impl From<GapVector> for Vec<f64> {
    fn from(g: GapVector) -> Self {
        g.h
    }
}

impl GapVector {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() {
            return validation("a gap vector needs at least one entry");
        }
        if let Some(x) = h.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return validation(format!("gaps must be finite and nonnegative, got {x}"));
        }
        Ok(GapVector { h })
    }

    pub fn zeros(d: usize) -> Self {
        GapVector { h: vec![0.0; d.saturating_sub(1).max(1)] }
    }

    pub fn gaps(&self) -> &[f64] {
        &self.h
    }

    /// The d this gap vector belongs to (one more than its length).
    pub fn dim(&self) -> usize {
        self.h.len() + 1
    }

    /// κ_1 = 0, κ_j = h_1 + … + h_{j−1}.
    pub fn kappa(&self) -> Vec<f64> {
        kappa(&self.h)
    }

    /// κ_d = h_1 + … + h_{d−1}.
    pub fn total(&self) -> f64 {
        self.h.iter().sum()
    }

    pub fn v(&self) -> f64 {
        vandermonde(&self.kappa())
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        GapVector { h: self.h.iter().map(|x| lambda * x).collect() }
    }
}

pub(crate) fn kappa(h: &[f64]) -> Vec<f64> {
    let mut k = Vec::with_capacity(h.len() + 1);
    let mut acc = 0.0;
    k.push(0.0);
    for x in h {
        acc += x;
        k.push(acc);
    }
    k
}

/// (κ(h), v(h)).
pub fn kappa_v(h: &GapVector) -> (Vec<f64>, f64) {
    let k = h.kappa();
    let v = vandermonde(&k);
    (k, v)
}

fn check_psi_dimension(d: usize, h: &GapVector) -> Result<()> {
    if !(2..=MAX_PSI_DIMENSION).contains(&d) {
        return Err(LabError::Capability(format!(
            "Ψ_d is available for 2 ≤ d ≤ {MAX_PSI_DIMENSION}, got d = {d}"
        )));
    }
    if h.dim() != d {
        return validation(format!("Ψ_{d} needs {} gaps, got {}", d - 1, h.gaps().len()));
    }
    Ok(())
}

/// Ψ_d(t; h).
pub fn psi(d: usize, t: f64, h: &GapVector) -> Result<f64> {
    check_psi_dimension(d, h)?;
    Ok(psi_raw(t, h.gaps()))
}

/// Ψ_d evaluated through the recursion down to Ψ_2, with no closed-form
/// shortcut at d = 3. Only used to cross-check [`psi`].
pub fn psi_full_recursion(d: usize, t: f64, h: &GapVector) -> Result<f64> {
    check_psi_dimension(d, h)?;
    Ok(psi_rec(t, h.gaps(), false))
}

fn psi_raw(t: f64, h: &[f64]) -> f64 {
    psi_rec(t, h, true)
}

fn psi_rec(t: f64, h: &[f64], shortcut: bool) -> f64 {
    let d = h.len() + 1;
    let total: f64 = h.iter().sum();
    if !(t >= 0.0) || t >= total {
        return 0.0;
    }
    match d {
        2 => 1.0,
        3 if shortcut => {
            let k3 = h[0] + h[1];
            (h[0].min(t) * (k3 - h[0].max(t))).max(0.0)
        }
        _ => psi_nested(t, h, shortcut),
    }
}

/// Ψ_d(t; h) = ∫ Ψ_{d−1}(t − σ_1; σ_2 − σ_1, …, σ_{d−1} − σ_{d−2}) dσ over the box
/// 0 ≤ σ_1 ≤ min(h_1, t), κ_j ≤ σ_j ≤ κ_{j+1} (1 < j < d−1),
/// max(κ_{d−1}, t) ≤ σ_{d−1} ≤ κ_d.
///
/// Splitting each middle σ_j at t leaves a polynomial integrand on every
/// cell, so a fixed Gauss–Legendre rule is exact.
fn psi_nested(t: f64, h: &[f64], shortcut: bool) -> f64 {
    let d = h.len() + 1;
    let k = kappa(h);
    let n = d - 1;
    let mut cuts: Vec<Vec<f64>> = Vec::with_capacity(n);
    cuts.push(vec![0.0, h[0].min(t)]);
    for j in 1..n - 1 {
        let (lo, hi) = (k[j], k[j + 1]);
        if lo < t && t < hi {
            cuts.push(vec![lo, t, hi]);
        } else {
            cuts.push(vec![lo, hi]);
        }
    }
    cuts.push(vec![k[n - 1].max(t), k[n]]);
    if cuts.iter().any(|c| c[c.len() - 1] <= c[0]) {
        return 0.0;
    }
    let order = d + 2;
    let mut cell = vec![0usize; n];
    let mut acc = 0.0;
    let (mut lo, mut hi) = (vec![0.0; n], vec![0.0; n]);
    let mut gaps = vec![0.0; n - 1];
    loop {
        for i in 0..n {
            lo[i] = cuts[i][cell[i]];
            hi[i] = cuts[i][cell[i] + 1];
        }
        acc += tensor_box(&lo, &hi, order, |s| {
            for i in 0..n - 1 {
                gaps[i] = s[i + 1] - s[i];
            }
            psi_rec(t - s[0], &gaps, shortcut)
        });
        let mut i = 0;
        loop {
            if i == n {
                return acc;
            }
            cell[i] += 1;
            if cell[i] + 1 < cuts[i].len() {
                break;
            }
            cell[i] = 0;
            i += 1;
        }
    }
}

/// Ψ_d(·; h) for one fixed h, memoising point values.
#[derive(Debug)]
pub struct PsiKernel {
    h: GapVector,
    kappa: Vec<f64>,
    cache: Mutex<HashMap<u64, f64>>,
}

impl PsiKernel {
    pub fn new(h: GapVector) -> Result<Self> {
        check_psi_dimension(h.dim(), &h)?;
        let kappa = h.kappa();
        Ok(PsiKernel { h, kappa, cache: Mutex::new(HashMap::new()) })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn gaps(&self) -> &GapVector {
        &self.h
    }

    pub fn value(&self, t: f64) -> f64 {
        let key = t.to_bits();
        if let Some(v) = self.cache.lock().expect("psi cache poisoned").get(&key) {
            return *v;
        }
        let v = psi_raw(t, self.h.gaps());
        self.cache.lock().expect("psi cache poisoned").insert(key, v);
        v
    }

    /// ∫_lo^hi Ψ_d(u; h) du, exact up to rounding: Ψ_d is a polynomial of
    /// degree d − 2 between consecutive κ_j.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let d = self.dim();
        if d == 2 {
            let h1 = self.h.gaps()[0];
            return (hi.min(h1) - lo.max(0.0)).max(0.0);
        }
        let mut breaks = vec![lo];
        breaks.extend(self.kappa.iter().copied().filter(|&k| k > lo && k < hi));
        breaks.push(hi);
        breaks.dedup();
        let rule = GaussLegendre::get(d);
        breaks.windows(2).map(|w| rule.integrate(w[0], w[1], |u| self.value(u))).sum()
    }

    /// ∫_{mean κ}^{κ_d} Ψ_d(u; h) du / v(h), the ratio bounded below by c(d).
    /// It equals ∫_{g_d(t,h)}^{t+κ_d} Ψ_d(u − t; h) du / v(h) for every t.
    pub fn lower_bound_ratio(&self) -> f64 {
        let d = self.dim() as f64;
        let mean = self.kappa.iter().sum::<f64>() / d;
        let top = *self.kappa.last().expect("nonempty");
        self.integral(mean, top) / self.h.v()
    }
}

/// Settings for the sampled search behind [`check_psi_lower_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiSweep {
    pub samples: usize,
    /// Gaps are drawn log-uniformly from [lo, hi].
    pub h_range: [f64; 2],
    pub t_range: [f64; 2],
    pub refine_rounds: usize,
    pub seed: u64,
}

impl Default for PsiSweep {
    fn default() -> Self {
        PsiSweep { samples: 1000, h_range: [1e-3, 1.0], t_range: [0.0, 1.0], refine_rounds: 30, seed: 0 }
    }
}

/// Latin-hypercube samples (t, h) for a Ψ_d sweep.
pub fn psi_samples(d: usize, sweep: &PsiSweep) -> Vec<(f64, GapVector)> {
    let mut rng = substream(sweep.seed, d as u64);
    let [hl, hh] = sweep.h_range;
    let [tl, th] = sweep.t_range;
    latin_hypercube(sweep.samples, d, &mut rng)
        .into_iter()
        .map(|u| {
            let t = tl + u[0] * (th - tl);
            let h = u[1..].iter().map(|&x| log_uniform(x, hl, hh)).collect();
            (t, GapVector { h })
        })
        .collect()
}

/// Empirical infimum over `samples` of ∫_{g_d}^{t+κ_d} Ψ_d(u − t; h) du / v(h).
///
/// Passes iff the infimum is strictly positive. Samples with v(h) = 0 are
/// excluded and counted; `refine_rounds` > 0 adds a coordinate search in log h
/// around the running minimiser.
pub fn check_psi_lower_bound(d: usize, samples: &[(f64, GapVector)], refine_rounds: usize) -> Result<CheckReport> {
    for (_, h) in samples {
        check_psi_dimension(d, h)?;
    }
    let ratios: Vec<Option<f64>> = samples
        .par_iter()
        .map(|(_, h)| {
            let scale = h.total().powi(((d * (d - 1)) / 2) as i32);
            if h.v() <= 1e-12 * scale || scale == 0.0 {
                return None;
            }
            PsiKernel::new(h.clone()).ok().map(|k| k.lower_bound_ratio())
        })
        .collect();
    let degenerate = ratios.iter().filter(|r| r.is_none()).count();
    let params = json!({"d": d, "samples": samples.len(), "refine_rounds": refine_rounds});
    let mut series = Series::new("psi-ratio", &["t", "v", "ratio"]).with_kind("ratio-vs-parameter");
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in ratios.iter().enumerate() {
        if let Some(r) = r {
            series.push(vec![samples[i].0, samples[i].1.v(), *r]);
            if best.is_none_or(|(_, b)| *r < b) {
                best = Some((i, *r));
            }
        }
    }
    let Some((imin, mut c_est)) = best else {
        return Ok(CheckReport::unbounded("psi.lower-bound", params, f64::NAN, false)
            .inconclusive(format!("all {degenerate} samples were degenerate (v(h) = 0)")));
    };
    let (t_min, mut h_min) = (samples[imin].0, samples[imin].1.clone());
    if d > 2 {
        let mut step = 0.5f64;
        for _ in 0..refine_rounds {
            let mut improved = false;
            for i in 0..d - 1 {
                for dir in [-1.0, 1.0] {
                    let mut g = h_min.h.clone();
                    g[i] *= (dir * step).exp();
                    let cand = GapVector { h: g };
                    let r = PsiKernel::new(cand.clone())?.lower_bound_ratio();
                    if r < c_est {
                        c_est = r;
                        h_min = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
    let mut witness = vec![t_min];
    witness.extend_from_slice(h_min.gaps());
    let report = CheckReport::judged("psi.lower-bound", params, c_est, 0.0, Relation::AtLeast, 0.0)
        .with_witness("minimiser (t, h…)", witness)
        .with_series(series)
        .with_note(format!("{degenerate} degenerate samples (v(h) = 0) excluded"));
    // Strict positivity: a zero infimum fails.
    Ok(if c_est > 0.0 { report } else { report.fail_with("empirical infimum is not positive") })
}

fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn check_sorted(s: &[f64]) -> Result<()> {
    if s.windows(2).any(|w| !(w[1] > w[0])) {
        return validation("nodes must be strictly increasing");
    }
    Ok(())
}

/// V_n(s) = (n−1)!·∫_{s_1}^{s_2} … ∫_{s_{n−1}}^{s_n} V_{n−1}(σ) dσ.
pub fn check_vandermonde_integration(s: &[f64], tolerance: f64) -> Result<CheckReport> {
    let n = s.len();
    if n < 2 {
        return validation("the integration identity needs n ≥ 2 nodes");
    }
    check_sorted(s)?;
    let lhs = vandermonde(s);
    // V_{n−1} has degree n − 2 in each variable; order n is exact, order n+2
    // confirms it.
    let box_integral = |order| tensor_box(&s[..n - 1], &s[1..], order, vandermonde);
    let rhs = factorial(n - 1) * box_integral(n);
    let rhs_check = factorial(n - 1) * box_integral(n + 2);
    let err = relative_error(lhs, rhs);
    Ok(CheckReport::judged("vandermonde.integration", json!({"n": n, "s": s}), err, 0.0, Relation::AtMost, tolerance)
        .with_witness("(V_n, (n−1)!∫V_{n−1}, refined)", vec![lhs, rhs, rhs_check]))
}

/// Cubature budget for the tail inequalities.
const TAIL_MAX_EVALS: usize = 4_000_000;

/// Ratios LHS/RHS of the two tail inequalities
///
///  ∫_{box} V_{n−1}(u)(u_{n−1} − u_1)^δ du ≥ C·V_n(t)(t_n − t_1)^δ and
///  ∫_{box} V_{n−1}(x)·1{mean x ≥ mean t} dx ≥ C·V_n(t),
///
/// both over the box ∏[t_i, t_{i+1}]. Passes iff both ratios ≥ `floor`.
pub fn check_tail_inequalities(t: &[f64], delta: f64, floor: f64) -> Result<CheckReport> {
    let n = t.len();
    if n < 3 {
        return validation("tail inequalities need n ≥ 3 (n = 2 degenerates)");
    }
    if !(delta > 0.0) {
        return validation("δ must be positive");
    }
    check_sorted(t)?;
    let vn = vandermonde(t);
    let spread = t[n - 1] - t[0];
    let lo = &t[..n - 1];
    let hi = &t[1..];
    let order = n + 4;
    let tail = refined_box(lo, hi, order, 1e-7, 0.0, TAIL_MAX_EVALS, |u| {
        vandermonde(u) * (u[n - 2] - u[0]).max(0.0).powf(delta)
    })?;
    let ratio_tail = tail.value / (vn * spread.powf(delta));

    // Mixed bound: integrate the last coordinate exactly above the mean threshold.
    let target = t.iter().sum::<f64>() / n as f64 * (n - 1) as f64;
    let inner = GaussLegendre::get(n);
    let mixed = refined_box(&lo[..n - 2], &hi[..n - 2], order, 1e-7, 0.0, TAIL_MAX_EVALS, |x| {
        let rest: f64 = x.iter().sum();
        let start = (target - rest).max(t[n - 2]);
        if start >= t[n - 1] {
            return 0.0;
        }
        let mut u = x.to_vec();
        u.push(0.0);
        inner.integrate(start, t[n - 1], |y| {
            u[n - 2] = y;
            vandermonde(&u)
        })
    })?;
    let ratio_mixed = mixed.value / vn;
    let est = ratio_tail.min(ratio_mixed);
    Ok(CheckReport::judged(
        "vandermonde.tail-inequalities",
        json!({"n": n, "t": t, "delta": delta, "floor": floor}),
        est,
        floor,
        Relation::AtLeast,
        0.0,
    )
    .with_witness("(ratio with (u_{n−1}−u_1)^δ, ratio on mean half-space)", vec![ratio_tail, ratio_mixed])
    .with_note(format!("cubature differences {:e}, {:e}", tail.error, mixed.error)))
}

/// A factor l_m in the product integrated by [`check_lin_lemma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LinFactor {
    /// t_k − t_j with j < k (0-based indices).
    Difference { j: usize, k: usize },
    /// d − t_j with d ≥ b_j.
    Upper { j: usize, d: f64 },
    /// t_j − c with c ≤ a_j.
    Lower { j: usize, c: f64 },
}

impl LinFactor {
    fn eval(&self, t: &[f64]) -> f64 {
        match *self {
            LinFactor::Difference { j, k } => t[k] - t[j],
            LinFactor::Upper { j, d } => d - t[j],
            LinFactor::Lower { j, c } => t[j] - c,
        }
    }
}

/// Ordered intervals, linear factors and shrink parameters λ_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinInstance {
    pub intervals: Vec<[f64; 2]>,
    #[serde(default)]
    pub factors: Vec<LinFactor>,
    pub lambdas: Vec<f64>,
}

impl LinInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.intervals.len();
        if n == 0 {
            return validation("need at least one interval");
        }
        if self.lambdas.len() != n {
            return validation(format!("expected {n} λ values, got {}", self.lambdas.len()));
        }
        for (i, [a, b]) in self.intervals.iter().enumerate() {
            if !(a < b) {
                return validation(format!("interval {i} is empty"));
            }
            if i > 0 && self.intervals[i - 1][1] > *a {
                return validation(format!("interval {i} overlaps its predecessor"));
            }
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return validation(format!("λ_j must lie in (0, 1), got {l}"));
        }
        for f in &self.factors {
            match *f {
                LinFactor::Difference { j, k } if !(j < k && k < n) => {
                    return validation(format!("difference factor needs j < k < {n}, got ({j}, {k})"));
                }
                LinFactor::Upper { j, d } if j >= n || d < self.intervals[j][1] => {
                    return validation(format!("upper factor d − t_{j} needs d ≥ b_{j}"));
                }
                LinFactor::Lower { j, c } if j >= n || c > self.intervals[j][0] => {
                    return validation(format!("lower factor t_{j} − c needs c ≤ a_{j}"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// ∫ over {(1−λ_j)a_j + λ_j b_j ≤ t_j ≤ b_j} of ∏ l_m, divided by the integral
/// over the full box. Both integrands are polynomials, integrated exactly.
pub fn check_lin_lemma(instance: &LinInstance) -> Result<CheckReport> {
    instance.validate()?;
    let m = instance.factors.len();
    let order = m / 2 + 2;
    let product = |t: &[f64]| instance.factors.iter().map(|f| f.eval(t)).product::<f64>();
    let full_lo: Vec<f64> = instance.intervals.iter().map(|i| i[0]).collect();
    let full_hi: Vec<f64> = instance.intervals.iter().map(|i| i[1]).collect();
    let cut_lo: Vec<f64> = instance
        .intervals
        .iter()
        .zip(&instance.lambdas)
        .map(|([a, b], l)| (1.0 - l) * a + l * b)
        .collect();
    let ratio_at = |order| tensor_box(&cut_lo, &full_hi, order, product) / tensor_box(&full_lo, &full_hi, order, product);
    let ratio = ratio_at(order);
    let refined = ratio_at(order + 3);
    Ok(CheckReport::judged(
        "vandermonde.lin-lemma",
        serde_json::to_value(instance)?,
        ratio,
        0.0,
        Relation::AtLeast,
        0.0,
    )
    .with_witness("(ratio, refined ratio)", vec![ratio, refined])
    .with_note(format!("refinement drift {:e}", (ratio - refined).abs())))
    .map(|r| if ratio > 0.0 { r } else { r.fail_with("ratio is not positive") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(&[0.0, 1.0, 2.0]), 2.0);
        assert_eq!(vandermonde(&[0.3, 0.3, 1.0]), 0.0);
        assert_eq!(vandermonde(&[5.0]), 1.0);
    }

    #[test]
    fn kappa_examples() {
        let (k, v) = kappa_v(&GapVector::new(vec![1.0, 2.0]).unwrap());
        assert_eq!(k, vec![0.0, 1.0, 3.0]);
        assert_eq!(v, 6.0);
        let (k, v) = kappa_v(&GapVector::zeros(4));
        assert_eq!(k, vec![0.0; 4]);
        assert_eq!(v, 0.0);
        assert!(GapVector::new(vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn psi2_indicator() {
        let h = GapVector::new(vec![1.0]).unwrap();
        assert_eq!(psi(2, 0.5, &h).unwrap(), 1.0);
        assert_eq!(psi(2, 1.5, &h).unwrap(), 0.0);
        assert_eq!(psi(2, -0.1, &h).unwrap(), 0.0);
    }

    #[test]
    fn psi_dimension_errors() {
        let h = GapVector::new(vec![1.0; 5]).unwrap();
        assert!(matches!(psi(6, 0.5, &h), Err(LabError::Capability(_))));
        let h = GapVector::new(vec![1.0; 2]).unwrap();
        assert!(matches!(psi(4, 0.5, &h), Err(LabError::Validation(_))));
    }

    #[test]
    fn psi3_closed_form_matches_recursion() {
        let h = GapVector::new(vec![0.7, 0.4]).unwrap();
        for t in [0.1, 0.5, 0.7, 0.9, 1.05] {
            let a = psi(3, t, &h).unwrap();
            let b = psi_full_recursion(3, t, &h).unwrap();
            assert!((a - b).abs() < 1e-14, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn psi3_integral_is_one_for_unit_gaps() {
        let k = PsiKernel::new(GapVector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert!((k.integral(0.0, 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psi2_ratio_is_exactly_half() {
        for h in [1e-3, 0.37, 1.0, 12.5] {
            let k = PsiKernel::new(GapVector::new(vec![h]).unwrap()).unwrap();
            assert_eq!(k.lower_bound_ratio(), 0.5);
        }
    }

    #[test]
    fn vandermonde_integration_small() {
        assert!(check_vandermonde_integration(&[0.3, 1.1], 1e-14).unwrap().pass);
        let r = check_vandermonde_integration(&[0.0, 1.0, 2.0], 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(check_vandermonde_integration(&[1.0, 0.0], 1e-8).is_err());
    }

    #[test]
    fn lin_lemma_without_factors() {
        let inst = LinInstance { intervals: vec![[0.0, 1.0]], factors: vec![], lambdas: vec![0.5] };
        let r = check_lin_lemma(&inst).unwrap();
        assert!((r.estimate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lin_lemma_rejects_bad_factor() {
        let inst = LinInstance {
            intervals: vec![[0.0, 1.0]],
            factors: vec![LinFactor::Lower { j: 0, c: 0.5 }],
            lambdas: vec![0.5],
        };
        assert!(matches!(check_lin_lemma(&inst), Err(LabError::Validation(_))));
    }
}
