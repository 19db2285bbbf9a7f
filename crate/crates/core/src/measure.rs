//! Parallelepipeds, the curve measure λ_γ, the parallelepiped chain used to
//! turn a measure condition into a derivative-gap bound, and the K/u/S_m
//! geometry of gap vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conditions::{check_alpha, gap_exponent};
use crate::curve::{evaluate_curve, factorial, Curve, SimpleCurve};
use crate::error::{validation, LabError, Result};
use crate::linalg::{determinant_of_columns, inverse, mat_vec};
use crate::offspring::jacobian_simplex;
use crate::report::{CheckReport, Relation, Series};
use crate::sampling::substream;
use crate::vandermonde::GapVector;

/// {base + Σ t_j·edge_j : 0 ≤ t_j ≤ 1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParallelepiped", into = "RawParallelepiped")]
pub struct Parallelepiped {
    base: Vec<f64>,
    edges: Vec<Vec<f64>>,
    volume: f64,
    /// Maps x − base to edge coordinates; `None` when degenerate.
    coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParallelepiped {
    base: Vec<f64>,
    edges: Vec<Vec<f64>>,
}

impl TryFrom<RawParallelepiped> for Parallelepiped {
    type Error = LabError;

    fn try_from(r: RawParallelepiped) -> Result<Self> {
        Parallelepiped::new(r.base, r.edges)
    }
}

impl From<Parallelepiped> for RawParallelepiped {
    fn from(p: Parallelepiped) -> Self {
        RawParallelepiped { base: p.base, edges: p.edges }
    }
}

/// Slack on edge coordinates when testing membership.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

impl Parallelepiped {
    /// Requires d independent edges in ℝ^d.
    pub fn new(base: Vec<f64>, edges: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self::possibly_degenerate(base, edges)?;
        if p.coords.is_none() {
            return validation("parallelepiped edges are linearly dependent");
        }
        Ok(p)
    }

    /// Like [`Parallelepiped::new`] but accepts zero volume (membership is then empty).
    pub fn possibly_degenerate(base: Vec<f64>, edges: Vec<Vec<f64>>) -> Result<Self> {
        let d = base.len();
        if d == 0 || edges.len() != d || edges.iter().any(|e| e.len() != d) {
            return validation(format!("a parallelepiped in ℝ^{d} needs {d} edges of length {d}"));
        }
        if base.iter().chain(edges.iter().flatten()).any(|x| !x.is_finite()) {
            return validation("parallelepiped entries must be finite");
        }
        let volume = determinant_of_columns(&edges).abs();
        let scale: f64 = edges.iter().map(|e| crate::linalg::norm2(e)).product();
        let coords = if volume > 1e-14 * scale {
            // Columns are edges; rows of the inverse give coordinates.
            let m: Vec<Vec<f64>> = (0..d).map(|i| edges.iter().map(|e| e[i]).collect()).collect();
            inverse(&m)
        } else {
            None
        };
        let volume = if coords.is_some() { volume } else { 0.0 };
        Ok(Parallelepiped { base, edges, volume, coords })
    }

    /// Axis-aligned box [lo, hi].
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let d = lo.len();
        let edges = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = hi[i] - lo[i];
                e
            })
            .collect();
        Self::new(lo.to_vec(), edges)
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn edges(&self) -> &[Vec<f64>] {
        &self.edges
    }

    /// m_d(E) = |det(edges)|.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_degenerate(&self) -> bool {
        self.coords.is_none()
    }

    /// Edge coordinates of x − base.
    pub fn coordinates(&self, x: &[f64]) -> Option<Vec<f64>> {
        let c = self.coords.as_ref()?;
        let rel: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        Some(mat_vec(c, &rel))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with_slack(x, MEMBERSHIP_SLACK)
    }

    pub fn contains_with_slack(&self, x: &[f64], slack: f64) -> bool {
        self.coordinates(x).is_some_and(|c| c.iter().all(|&v| v >= -slack && v <= 1.0 + slack))
    }

    /// base + Σ t_j edge_j.
    pub fn point_at(&self, t: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for (tj, e) in t.iter().zip(&self.edges) {
            for (pi, ei) in p.iter_mut().zip(e) {
                *pi += tj * ei;
            }
        }
        p
    }

    pub fn barycenter(&self) -> Vec<f64> {
        self.point_at(&vec![0.5; self.dim()])
    }

    /// x ↦ base + M·x maps the unit cube onto E; returns (M, base).
    pub fn affine_map(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let d = self.dim();
        let m = (0..d).map(|i| self.edges.iter().map(|e| e[i]).collect()).collect();
        (m, self.base.clone())
    }
}

fn clamped_point(curve: &dyn Curve, t: f64) -> Result<Vec<f64>> {
    let (a, b) = curve.domain();
    let eps = 1e-12 * (b - a);
    curve.point(t.clamp(a + eps, b - eps))
}

/// Settings for [`lambda_measure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaOptions {
    /// Absolute error target on the returned length.
    pub tol: f64,
    /// Coarse grid used to locate constraint crossings.
    pub coarse: usize,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        LambdaOptions { tol: 1e-10, coarse: 2048 }
    }
}

/// |{t ∈ (a, b): γ(t) ∈ E}|.
///
/// Each of the 2d constraints 0 ≤ c_i(t) ≤ 1 on the edge coordinates is
/// scanned on a coarse grid; every sign change is bracketed by bisection to
/// width tol/(number of crossings), and membership is decided between
/// consecutive crossings.
pub fn lambda_measure(curve: &dyn Curve, e: &Parallelepiped, opts: &LambdaOptions) -> Result<f64> {
    let (a, b) = curve.domain();
    if !b.is_finite() {
        return Err(LabError::Unsupported("λ_γ needs a bounded parameter domain".into()));
    }
    if e.dim() != curve.dim() {
        return validation("parallelepiped and curve dimensions differ");
    }
    if e.is_degenerate() {
        return Ok(0.0);
    }
    let coords = |t: f64| -> Result<Vec<f64>> {
        let p = clamped_point(curve, t)?;
        Ok(e.coordinates(&p).expect("nondegenerate"))
    };
    let n = opts.coarse.max(8);
    let grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let values = grid.iter().map(|&t| coords(t)).collect::<Result<Vec<_>>>()?;
    let d = e.dim();
    // (cell index, constraint index, lower/upper face)
    let mut crossings: Vec<(usize, usize, bool)> = Vec::new();
    for i in 0..n {
        for k in 0..d {
            let (c0, c1) = (values[i][k], values[i + 1][k]);
            if (c0 < 0.0) != (c1 < 0.0) {
                crossings.push((i, k, false));
            }
            if (c0 > 1.0) != (c1 > 1.0) {
                crossings.push((i, k, true));
            }
        }
    }
    let width = opts.tol / (crossings.len().max(1) as f64);
    let mut cuts = vec![a, b];
    for (i, k, upper) in crossings {
        let face = |t: f64| -> Result<f64> {
            let c = coords(t)?[k];
            Ok(if upper { c - 1.0 } else { c })
        };
        // Bisect on the same predicate that detected the crossing.
        let outside = |v: f64| if upper { v > 0.0 } else { v < 0.0 };
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let side_lo = outside(face(lo)?);
        let mut iters = 0;
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            let f_mid = face(mid)?;
            if !f_mid.is_finite() {
                return Err(LabError::Numerical(format!("constraint not finite at t = {mid}")));
            }
            if outside(f_mid) == side_lo {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
            if iters > 200 {
                return Err(LabError::Numerical(format!("bracketing did not converge near t = {lo}")));
            }
        }
        cuts.push(0.5 * (lo + hi));
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let mid = coords(0.5 * (w[0] + w[1]))?;
            if mid.iter().all(|&c| (0.0..=1.0).contains(&c)) {
                total += w[1] - w[0];
            }
        }
    }
    Ok(total)
}

/// B_est = sup over the family of λ_γ(E)/m_d(E)^α.
pub fn estimate_alpha_b(curve: &dyn Curve, family: &[Parallelepiped], alpha: f64, opts: &LambdaOptions) -> Result<CheckReport> {
    if family.is_empty() {
        return validation("the parallelepiped family is empty");
    }
    let d = curve.dim();
    check_alpha(d, alpha)?;
    let lambdas = family.par_iter().map(|e| lambda_measure(curve, e, opts)).collect::<Result<Vec<_>>>()?;
    let mut series = Series::new("lambda-vs-volume", &["volume", "lambda", "ratio"]).with_kind("measure-vs-scale");
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, (e, l)) in family.iter().zip(&lambdas).enumerate() {
        let ratio = l / e.volume().powf(alpha);
        series.push(vec![e.volume(), *l, ratio]);
        if ratio > best.1 {
            best = (i, ratio);
        }
    }
    let slope = loglog_slope(family.iter().map(|e| e.volume()).zip(lambdas.iter().copied()));
    let e = &family[best.0];
    let mut witness = e.base().to_vec();
    witness.extend(e.edges().iter().flatten());
    let mut r = CheckReport::unbounded(
        "measure.alpha-b",
        json!({"d": d, "alpha": alpha, "family_size": family.len(), "tol": opts.tol}),
        best.1,
        best.1.is_finite(),
    )
    .with_witness("maximising parallelepiped (base, edges…)", witness)
    .with_series(series);
    if let Some(s) = slope {
        r = r.with_witness("log-log slope of lambda against volume", vec![s]);
    }
    Ok(r)
}

/// Least-squares slope of ln y against ln x over positive pairs.
pub fn loglog_slope(pairs: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pairs
        .into_iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Parallelepipeds around γ(t_0) spanned by 2·inflate·r^j γ^(j)(t_0)/j!, one per radius.
///
/// At a point of nonvanishing torsion these contain the arc |t − t_0| ≤ r for
/// small r, so λ ≈ 2r while m_d ∝ r^{d(d+1)/2}.
pub fn osculating_family(curve: &SimpleCurve, t0: f64, radii: &[f64], inflate: f64) -> Result<Vec<Parallelepiped>> {
    let d = curve.dimension();
    let center = evaluate_curve(curve, t0, 0)?;
    let derivs = (1..=d).map(|j| evaluate_curve(curve, t0, j)).collect::<Result<Vec<_>>>()?;
    radii
        .iter()
        .map(|&r| {
            let edges: Vec<Vec<f64>> = derivs
                .iter()
                .enumerate()
                .map(|(j, g)| g.iter().map(|x| 2.0 * inflate * r.powi(j as i32 + 1) / factorial(j + 1) * x).collect())
                .collect();
            let mut base = center.clone();
            for e in &edges {
                for (b, x) in base.iter_mut().zip(e) {
                    *b -= 0.5 * x;
                }
            }
            Parallelepiped::new(base, edges)
        })
        .collect()
}

/// One link E_{d−k} ⊂ ℝ^k of the chain, with its independently computed volume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainLink {
    pub k: usize,
    pub set: Parallelepiped,
    pub volume: f64,
    /// h^{(k²+k−2)/2}·(φ^(d−1)(t+h) − φ^(d−1)(t)).
    pub bound: f64,
    /// Largest edge-coordinate excursion outside [0, 1] over the samples.
    pub containment_excess: f64,
}

/// Result of [`lemma1_chain`].
#[derive(Debug, Clone)]
pub struct Lemma1Chain {
    pub rho: f64,
    pub links: Vec<ChainLink>,
    pub report: CheckReport,
}

impl Lemma1Chain {
    /// E_0 ⊂ ℝ^d.
    pub fn last(&self) -> &Parallelepiped {
        &self.links.last().expect("chain has at least one link").set
    }
}

/// Builds E_{d−2}, …, E_0 for γ on [t, t + h] and verifies ρ ≥ 0, sampled
/// containment, the volume bound and the exact volume recursion.
///
/// E_{d−2} is the parallelogram with vertices P_1 = (t, φ^(d−2)(t)),
/// P_2 = P_1 − ρe_2, P_3 = (t+h, φ^(d−2)(t+h)), P_4 = P_3 + ρe_2. Given
/// E_{d−k+1} = b + box(e_j), the lift Ẽ has base (1, b), edges (0, e_j) and
/// −(1, x_0) with x_0 the barycenter, and E_{d−k} = p_k(t) + h·Ẽ.
pub fn lemma1_chain(curve: &SimpleCurve, t: f64, h: f64, samples: usize) -> Result<Lemma1Chain> {
    let d = curve.dimension();
    if !(h > 0.0) {
        return validation("h must be positive");
    }
    let (a, b) = curve.bounds();
    if t < a || t + h > b {
        return Err(LabError::Domain(format!("[{t}, {}] leaves ({a}, {b})", t + h)));
    }
    let samples = samples.max(2);
    let phi = |s: f64, k: usize| curve.phi_derivative(s, k);
    let rho = h * phi(t + h, d - 1)? + phi(t, d - 2)? - phi(t + h, d - 2)?;
    let jump = phi(t + h, d - 1)? - phi(t, d - 1)?;
    let bound_for = |k: usize| h.powi(((k * k + k - 2) / 2) as i32) * jump;

    let p1 = vec![t, phi(t, d - 2)?];
    let base2 = vec![p1[0], p1[1] - rho];
    let set2 = Parallelepiped::possibly_degenerate(base2, vec![vec![0.0, rho], vec![h, h * phi(t + h, d - 1)?]])?;
    let mut sets = vec![set2];
    for k in 3..=d {
        let prev = sets.last().expect("nonempty");
        let x0 = prev.barycenter();
        let mut base = vec![1.0];
        base.extend_from_slice(prev.base());
        let mut edges: Vec<Vec<f64>> = prev
            .edges()
            .iter()
            .map(|e| {
                let mut v = vec![0.0];
                v.extend_from_slice(e);
                v
            })
            .collect();
        let mut shear = vec![-1.0];
        shear.extend(x0.iter().map(|x| -x));
        edges.push(shear);
        // p_k(t) = (t, …, t^{k−1}/(k−1)!, φ^(d−k)(t)).
        let mut pk: Vec<f64> = (1..k).map(|j| t.powi(j as i32) / factorial(j)).collect();
        pk.push(phi(t, d - k)?);
        let base: Vec<f64> = pk.iter().zip(&base).map(|(p, x)| p + h * x).collect();
        let edges = edges.into_iter().map(|e| e.into_iter().map(|x| h * x).collect()).collect();
        sets.push(Parallelepiped::possibly_degenerate(base, edges)?);
    }

    let mut links = Vec::new();
    let mut max_excess: f64 = 0.0;
    let mut worst_point: Option<Vec<f64>> = None;
    let mut recursion_err: f64 = 0.0;
    let mut bound_ok = true;
    for (i, set) in sets.iter().enumerate() {
        let k = i + 2;
        let volume = determinant_of_columns(set.edges()).abs();
        let mut excess: f64 = 0.0;
        if !set.is_degenerate() {
            for j in 0..samples {
                let s = t + h * j as f64 / (samples - 1) as f64;
                let g = evaluate_curve(curve, s, d - k)?;
                // Leading d − k coordinates must be e_{d−k}.
                let lead = &g[..d - k];
                let lead_err = lead
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (x - if i + 1 == d - k { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max);
                let c = set.coordinates(&g[d - k..]).expect("nondegenerate");
                let out = c.iter().map(|&v| (-v).max(v - 1.0)).fold(lead_err, f64::max);
                if out > excess {
                    excess = out;
                    if out > max_excess {
                        worst_point = Some(vec![k as f64, s]);
                    }
                }
            }
        }
        max_excess = max_excess.max(excess);
        if i > 0 {
            let want = h.powi(k as i32) * links.last().map(|l: &ChainLink| l.volume).unwrap_or(0.0);
            let err = if want == 0.0 && volume == 0.0 { 0.0 } else { (volume - want).abs() / want.abs().max(volume) };
            recursion_err = recursion_err.max(err);
        }
        let bound = bound_for(k);
        bound_ok &= volume <= bound * (1.0 + 1e-12) + 1e-300;
        links.push(ChainLink { k, set: set.clone(), volume, bound, containment_excess: excess });
    }

    let degenerate = sets[0].is_degenerate();
    let mut report = CheckReport::judged(
        "measure.lemma1-chain",
        json!({"d": d, "t": t, "h": h, "samples": samples, "phi": curve.phi().label()}),
        max_excess,
        0.0,
        Relation::AtMost,
        MEMBERSHIP_SLACK,
    )
    .with_witness("rho", vec![rho])
    .with_witness("volumes m_k for k = 2..d", links.iter().map(|l| l.volume).collect())
    .with_witness("bounds h^((k²+k−2)/2)·jump for k = 2..d", links.iter().map(|l| l.bound).collect())
    .with_witness("max relative error of m_k = h^k m_(k−1)", vec![recursion_err]);
    if let Some(w) = worst_point {
        report = report.with_witness("largest containment excess at (k, s)", w);
    }
    if degenerate {
        report = report.with_note("ρ = 0: the parallelogram collapses to the chord band; containment not sampled");
    }
    if rho < -1e-14 * (1.0 + jump.abs()) {
        report = report.fail_with(format!("ρ = {rho} is negative"));
    }
    if recursion_err > 1e-12 {
        report = report.fail_with(format!("volume recursion off by {recursion_err:e}"));
    }
    if !bound_ok {
        report = report.fail_with("a volume exceeds h^((k²+k−2)/2)·(φ^(d−1)(t+h) − φ^(d−1)(t))");
    }
    Ok(Lemma1Chain { rho, links, report })
}

/// Checks B^{−1/α}(s−t)^{1/α+1−d(d+1)/2} ≤ φ^(d−1)(s) − φ^(d−1)(t) at the
/// samples, together with λ(E_0) ≥ h and h ≤ B·m_d(E_0)^α for each chain.
///
/// Without `b` the constant is the sup of λ(E_0)/m_d(E_0)^α over the chains'
/// own E_0.
pub fn lemma1_conclusion(
    curve: &SimpleCurve,
    samples: &[(f64, f64)],
    alpha: f64,
    b: Option<f64>,
    opts: &LambdaOptions,
) -> Result<CheckReport> {
    let d = curve.dimension();
    check_alpha(d, alpha)?;
    if samples.iter().any(|(t, s)| !(s > t)) {
        return validation("samples must satisfy t < s");
    }
    let rows = samples
        .par_iter()
        .map(|&(t, s)| -> Result<(f64, f64, f64, f64)> {
            let chain = lemma1_chain(curve, t, s - t, 64)?;
            let e0 = chain.last();
            let lambda = lambda_measure(curve, e0, opts)?;
            let jump = curve.phi_derivative(s, d - 1)? - curve.phi_derivative(t, d - 1)?;
            Ok((s - t, lambda, e0.volume(), jump))
        })
        .collect::<Result<Vec<_>>>()?;
    let b_used = b.unwrap_or_else(|| {
        rows.iter().map(|(_, l, m, _)| l / m.powf(alpha)).filter(|x| x.is_finite()).fold(0.0, f64::max)
    });
    let rho = gap_exponent(d, alpha);
    let mut worst = f64::INFINITY;
    let mut lambda_short: f64 = 0.0;
    let mut chain_gap: f64 = 0.0;
    for (h, lambda, m, jump) in &rows {
        let lhs = b_used.powf(-1.0 / alpha) * h.powf(rho);
        if lhs > 0.0 {
            worst = worst.min(jump / lhs);
        }
        lambda_short = lambda_short.max((h - lambda) / h);
        chain_gap = chain_gap.max((h - b_used * m.powf(alpha)) / h);
    }
    let mut r = CheckReport::judged(
        "measure.lemma1-conclusion",
        json!({"d": d, "alpha": alpha, "samples": samples.len(), "B": b_used}),
        worst,
        1.0,
        Relation::AtLeast,
        1e-9,
    )
    .with_witness("max relative shortfall of lambda(E_0) below h", vec![lambda_short])
    .with_witness("max relative excess of h over B m(E_0)^alpha", vec![chain_gap]);
    if lambda_short > 1e-8 {
        r = r.fail_with("λ(E_0) < h for some chain");
    }
    if chain_gap > 1e-8 {
        r = r.fail_with("h > B·m(E_0)^α for some chain");
    }
    Ok(r)
}

/// u(h) = ∏_{i<j≤d} |h_i − h_j| with h_d = 0.
pub fn u_of(h: &[f64]) -> f64 {
    let mut all = h.to_vec();
    all.push(0.0);
    let mut acc = 1.0;
    for j in 1..all.len() {
        for i in 0..j {
            acc *= (all[j] - all[i]).abs();
        }
    }
    acc
}

/// K(h) = u(h)·(max |h_i − h_j|)^{1/α − d(d+1)/2}, homogeneous of degree 1/α − d.
pub fn k_of(h: &[f64], alpha: f64) -> f64 {
    let d = h.len() + 1;
    let u = u_of(h);
    if u == 0.0 {
        return 0.0;
    }
    let lo = h.iter().fold(0.0_f64, |m, x| m.min(*x));
    let hi = h.iter().fold(0.0_f64, |m, x| m.max(*x));
    u * (hi - lo).powf(1.0 / alpha - (d * (d + 1)) as f64 / 2.0)
}

/// Result of [`k_u_geometry`].
#[derive(Debug, Clone)]
pub struct KuGeometry {
    pub u: f64,
    pub k: f64,
    pub report: CheckReport,
}

/// u(h), K(h) and a check of K(λh) = λ^{1/α−d}K(h) for λ ∈ {2, 10}.
pub fn k_u_geometry(h: &[f64], alpha: f64) -> Result<KuGeometry> {
    let d = h.len() + 1;
    check_alpha(d, alpha)?;
    let u = u_of(h);
    let k = k_of(h, alpha);
    let degree = 1.0 / alpha - d as f64;
    let mut worst: f64 = 0.0;
    for lambda in [2.0, 10.0] {
        let scaled: Vec<f64> = h.iter().map(|x| lambda * x).collect();
        let want = lambda.powf(degree) * k;
        let got = k_of(&scaled, alpha);
        let err = if want == 0.0 && got == 0.0 { 0.0 } else { (got - want).abs() / want.abs().max(got.abs()) };
        worst = worst.max(err);
    }
    let report = CheckReport::judged(
        "measure.k-homogeneity",
        json!({"h": h, "alpha": alpha, "degree": degree}),
        worst,
        0.0,
        Relation::AtMost,
        1e-12,
    )
    .with_witness("(u, K)", vec![u, k]);
    Ok(KuGeometry { u, k, report })
}

/// Monte Carlo settings for [`sm_measure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmSampling {
    pub samples: usize,
    pub seed: u64,
    /// Samples y ∈ [−y_max, y_max]^{d−1}, h = sinh(y); the box is |h_i| ≤ sinh(y_max).
    pub y_max: f64,
    /// Allowed relative deviation of consecutive ratios from the predicted one.
    pub ratio_tolerance: f64,
}

impl Default for SmSampling {
    fn default() -> Self {
        SmSampling { samples: 4_000_000, seed: 0, y_max: 5.0, ratio_tolerance: 0.2 }
    }
}

const SM_CHUNK: usize = 1 << 16;

/// Monte Carlo m_{d−1}(S_m ∩ box) for S_m = {h: 2^{−m−1} < K(h) ≤ 2^{−m}},
/// for each m in `ms`; checks that consecutive ratios are within the
/// tolerance of 2^{−(d−1)α/(1−dα)}.
pub fn sm_measure(d: usize, alpha: f64, ms: &[usize], sampling: &SmSampling) -> Result<CheckReport> {
    if d < 2 {
        return validation("d must be at least 2");
    }
    if !(alpha > 0.0 && alpha < 1.0 / d as f64) {
        return validation(format!("S_m needs 0 < α < 1/d, got α = {alpha}"));
    }
    if ms.is_empty() {
        return validation("no shells requested");
    }
    let dim = d - 1;
    let top = ms.iter().copied().max().unwrap_or(0);
    let chunks = sampling.samples.div_ceil(SM_CHUNK);
    let ymax = sampling.y_max;
    let cell = (2.0 * ymax).powi(dim as i32);
    // Per chunk: Σw and Σw² for every shell 0..=top.
    let sums: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            use rand::Rng;
            let mut rng = substream(sampling.seed, c as u64);
            let n = SM_CHUNK.min(sampling.samples - c * SM_CHUNK);
            let mut s1 = vec![0.0; top + 1];
            let mut s2 = vec![0.0; top + 1];
            let mut h = vec![0.0; dim];
            for _ in 0..n {
                let mut w = cell;
                for x in h.iter_mut() {
                    let y = ymax * (2.0 * rng.gen::<f64>() - 1.0);
                    *x = y.sinh();
                    w *= y.cosh();
                }
                let k = k_of(&h, alpha);
                if k > 0.0 && k <= 1.0 {
                    let m = (-k.log2()).ceil() as i64 - 1;
                    // 2^{−m−1} < K ≤ 2^{−m}  ⇔  m = ⌈−log2 K⌉ − 1 (K = 2^{−m} lands in m).
                    let m = if k == 2f64.powi(-(m as i32 + 1)) { m + 1 } else { m };
                    if m >= 0 && (m as usize) <= top {
                        s1[m as usize] += w;
                        s2[m as usize] += w * w;
                    }
                }
            }
            (s1, s2)
        })
        .collect();
    let n = sampling.samples as f64;
    let mut est = vec![0.0; top + 1];
    let mut err = vec![0.0; top + 1];
    for m in 0..=top {
        let s1: f64 = sums.iter().map(|s| s.0[m]).sum();
        let s2: f64 = sums.iter().map(|s| s.1[m]).sum();
        est[m] = s1 / n;
        err[m] = ((s2 / n - est[m] * est[m]).max(0.0) / n).sqrt();
    }
    let expo = (d - 1) as f64 * alpha / (1.0 - d as f64 * alpha);
    let predicted = 2f64.powf(-expo);
    let mut series = Series::new("sm-shells", &["m", "measure", "std_error", "fitted_C"]).with_kind("measure-vs-scale");
    let mut sorted: Vec<usize> = ms.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &m in &sorted {
        series.push(vec![m as f64, est[m], err[m], est[m] * 2f64.powf(m as f64 * expo)]);
    }
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    for w in sorted.windows(2) {
        if w[1] == w[0] + 1 && est[w[0]] > 0.0 {
            let r = est[w[1]] / est[w[0]];
            ratios.push(r);
            worst = worst.max((r / predicted - 1.0).abs());
        }
    }
    let mut report = CheckReport::judged(
        "measure.sm-shells",
        json!({"d": d, "alpha": alpha, "m": sorted, "samples": sampling.samples, "seed": sampling.seed, "y_max": ymax}),
        worst,
        0.0,
        Relation::AtMost,
        sampling.ratio_tolerance,
    )
    .with_witness("consecutive ratios", ratios)
    .with_witness("predicted ratio", vec![predicted])
    .with_series(series);
    for &m in &sorted {
        if est[m] > 0.0 && err[m] > 0.05 * est[m] {
            report = report.with_note(format!("shell m = {m}: relative standard error {:.3}", err[m] / est[m]));
        }
    }
    if d == 2 {
        // K(h) = |h|^{1/α − 2}: each shell is a pair of intervals.
        let e = 1.0 / alpha - 2.0;
        let exact: Vec<f64> = sorted
            .iter()
            .map(|&m| 2.0 * (2f64.powf(-(m as f64) / e) - 2f64.powf(-(m as f64 + 1.0) / e)))
            .collect();
        report = report.with_witness("analytic shell measures (d = 2)", exact);
    }
    Ok(report)
}

/// J at the nondecreasing rearrangement t_j of {s + h_j} (h_d = 0), compared
/// with σ^{−1/α}K(h); c_est = inf J/(σ^{−1/α}K(h)) must be positive.
pub fn check_j_geq_k(curve: &SimpleCurve, sigma: f64, alpha: f64, samples: &[(f64, Vec<f64>)]) -> Result<CheckReport> {
    let d = curve.dimension();
    check_alpha(d, alpha)?;
    if let Some((_, h)) = samples.iter().find(|(_, h)| h.len() + 1 != d) {
        return validation(format!("expected {} entries in h, got {}", d - 1, h.len()));
    }
    let rows = samples
        .par_iter()
        .map(|(s, h)| -> Result<Option<(f64, f64)>> {
            let mut t: Vec<f64> = h.iter().map(|x| s + x).collect();
            t.push(*s);
            t.sort_by(f64::total_cmp);
            let k = k_of(h, alpha);
            let gaps: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
            if k == 0.0 || gaps.iter().any(|g| *g == 0.0) {
                return Ok(None);
            }
            let j = jacobian_simplex(curve, t[0], &GapVector::new(gaps)?, 8)?;
            Ok(Some((j, k)))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = sigma.powf(-1.0 / alpha);
    let mut c_est = f64::INFINITY;
    let mut collided = 0;
    let mut series = Series::new("j-over-k", &["K", "J", "ratio"]).with_kind("ratio-vs-parameter");
    for r in &rows {
        match r {
            Some((j, k)) => {
                let ratio = j / (scale * k);
                series.push(vec![*k, *j, ratio]);
                c_est = c_est.min(ratio);
            }
            None => collided += 1,
        }
    }
    let params = json!({"d": d, "sigma": sigma, "alpha": alpha, "samples": samples.len()});
    if !c_est.is_finite() {
        return Ok(CheckReport::unbounded("measure.j-geq-k", params, f64::NAN, false)
            .inconclusive("every sample had collided offsets"));
    }
    let r = CheckReport::judged("measure.j-geq-k", params, c_est, 0.0, Relation::AtLeast, 0.0)
        .with_series(series)
        .with_note(format!("{collided} samples with collided offsets (both sides 0) skipped"));
    Ok(if c_est > 0.0 { r } else { r.fail_with("empirical constant is not positive") })
}
