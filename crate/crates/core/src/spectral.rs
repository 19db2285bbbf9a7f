//! Test functions with closed-form transforms, restriction and extension
//! operators, discrete Lorentz norms, and the scaling identities.
//!
//! Transforms use ĝ(ξ) = ∫ g(x) e^{−2πi⟨x,ξ⟩} dx. The extension operator
//! keeps the phase e^{−i⟨x,γ(t)⟩}.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conditions::p_d;
use crate::curve::{affine_weight, factorial, Curve, HomogeneousCurve, SimpleCurve};
use crate::error::{validation, LabError, Result};
use crate::linalg::{inverse, mat_vec, norm2};
use crate::measure::{lambda_measure, LambdaOptions, Parallelepiped};
use crate::quadrature::{adaptive, AdaptiveOptions, GaussLegendre, TGrid};
use crate::report::{CheckReport, Relation, Series};

/// A function on ℝ^d whose transform is known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestFunction {
    /// amplitude·exp(−½ Σ (x_i − c_i)²/σ_i²).
    Gaussian {
        center: Vec<f64>,
        scales: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Indicator of the box with the given center and side lengths.
    BoxBump { center: Vec<f64>, sides: Vec<f64> },
    /// e^{2πi⟨ω,x⟩} times a Gaussian.
    ModulatedGaussian {
        center: Vec<f64>,
        scales: Vec<f64>,
        frequency: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// ∥A·exp(−½Σ x_i²/τ_i²)∥_{L^P(ℝ^d)}.
fn gaussian_norm(amplitude: f64, scales: &[f64], p: f64) -> f64 {
    let d = scales.len() as f64;
    amplitude.abs() * scales.iter().product::<f64>().powf(1.0 / p) * (2.0 * PI / p).powf(d / (2.0 * p))
}

impl TestFunction {
    pub fn gaussian(center: Vec<f64>, scales: Vec<f64>) -> Self {
        TestFunction::Gaussian { center, scales, amplitude: 1.0 }
    }

    /// Unit-scale Gaussian centered at 0 in ℝ^d.
    pub fn standard_gaussian(d: usize) -> Self {
        Self::gaussian(vec![0.0; d], vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Gaussian { center, .. }
            | TestFunction::BoxBump { center, .. }
            | TestFunction::ModulatedGaussian { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let (widths, extra): (&[f64], Option<&[f64]>) = match self {
            TestFunction::Gaussian { scales, .. } => (scales, None),
            TestFunction::BoxBump { sides, .. } => (sides, None),
            TestFunction::ModulatedGaussian { scales, frequency, .. } => (scales, Some(frequency)),
        };
        if d == 0 || widths.len() != d || extra.is_some_and(|f| f.len() != d) {
            return validation("test-function vectors must share one nonzero length");
        }
        if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return validation("test-function widths must be positive");
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        match self {
            TestFunction::Gaussian { center, scales, amplitude } => Complex64::from(gauss(*amplitude, center, scales, x)),
            TestFunction::BoxBump { center, sides } => {
                let inside = x.iter().zip(center).zip(sides).all(|((x, c), s)| (x - c).abs() <= 0.5 * s);
                Complex64::from(if inside { 1.0 } else { 0.0 })
            }
            TestFunction::ModulatedGaussian { center, scales, frequency, amplitude } => {
                let phase = 2.0 * PI * dot(frequency, x);
                Complex64::from_polar(gauss(*amplitude, center, scales, x), phase)
            }
        }
    }

    /// ĝ(ξ) in closed form.
    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        match self {
            TestFunction::Gaussian { center, scales, amplitude } => gaussian_hat(*amplitude, center, scales, xi),
            TestFunction::BoxBump { center, sides } => {
                let mag: f64 = sides.iter().zip(xi).map(|(s, x)| s * sinc(PI * s * x)).product();
                Complex64::from_polar(mag, -2.0 * PI * dot(center, xi))
            }
            TestFunction::ModulatedGaussian { center, scales, frequency, amplitude } => {
                let shifted: Vec<f64> = xi.iter().zip(frequency).map(|(x, w)| x - w).collect();
                gaussian_hat(*amplitude, center, scales, &shifted)
            }
        }
    }

    /// ∥g∥_{L^P(ℝ^d)} in closed form.
    pub fn lp_norm(&self, p: f64) -> f64 {
        match self {
            TestFunction::Gaussian { scales, amplitude, .. } | TestFunction::ModulatedGaussian { scales, amplitude, .. } => {
                gaussian_norm(*amplitude, scales, p)
            }
            TestFunction::BoxBump { sides, .. } => sides.iter().product::<f64>().powf(1.0 / p),
        }
    }

    /// ∥ĝ∥_{L^P(ℝ^d)} in closed form (Gaussian kinds only).
    pub fn fourier_lp_norm(&self, p: f64) -> Result<f64> {
        match self {
            TestFunction::Gaussian { scales, amplitude, .. } | TestFunction::ModulatedGaussian { scales, amplitude, .. } => {
                let (amp, tau) = hat_parameters(*amplitude, scales);
                Ok(gaussian_norm(amp, &tau, p))
            }
            TestFunction::BoxBump { .. } => {
                Err(LabError::Unsupported("no closed-form L^P norm for the transform of a box".into()))
            }
        }
    }

    /// inf of |g| over [0, 1]^d.
    pub fn min_on_unit_cube(&self) -> f64 {
        match self {
            TestFunction::Gaussian { center, scales, amplitude } | TestFunction::ModulatedGaussian { center, scales, amplitude, .. } => {
                let far: Vec<f64> = center.iter().map(|c| if *c > 0.5 { 0.0 } else { 1.0 }).collect();
                gauss(*amplitude, center, scales, &far)
            }
            TestFunction::BoxBump { center, sides } => {
                let covers = center.iter().zip(sides).all(|(c, s)| c - 0.5 * s <= 0.0 && c + 0.5 * s >= 1.0);
                if covers {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gauss(amplitude: f64, center: &[f64], scales: &[f64], x: &[f64]) -> f64 {
    let q: f64 = x.iter().zip(center).zip(scales).map(|((x, c), s)| ((x - c) / s).powi(2)).sum();
    amplitude * (-0.5 * q).exp()
}

/// Amplitude and scales of the Gaussian |ĝ|.
fn hat_parameters(amplitude: f64, scales: &[f64]) -> (f64, Vec<f64>) {
    let amp = amplitude * scales.iter().map(|s| s * (2.0 * PI).sqrt()).product::<f64>();
    (amp, scales.iter().map(|s| 1.0 / (2.0 * PI * s)).collect())
}

fn gaussian_hat(amplitude: f64, center: &[f64], scales: &[f64], xi: &[f64]) -> Complex64 {
    let (amp, tau) = hat_parameters(amplitude, scales);
    let mag = gauss(amp, &vec![0.0; xi.len()], &tau, xi);
    Complex64::from_polar(mag, -2.0 * PI * dot(center, xi))
}

/// Values on a grid with a positive quadrature measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    points: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(points: Vec<f64>, weights: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != weights.len() || points.len() != values.len() {
            return validation("points, weights and values must have equal length");
        }
        if points.windows(2).any(|w| w[0] > w[1]) {
            return validation("sample points must be sorted");
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return validation("sample weights must be positive");
        }
        Ok(SampledFunction { points, weights, values })
    }

    pub fn from_fn(grid: &TGrid, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let values = grid.points.iter().map(|&t| f(t)).collect();
        Self::new(grid.points.clone(), grid.weights.clone(), values)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// (Σ |f|^q w)^{1/q}.
    pub fn lq_norm(&self, q: f64) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v.norm().powf(q) * w).sum::<f64>().powf(1.0 / q)
    }

    /// Pointwise product with a real function of t (e.g. a weight).
    pub fn scaled_by(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let values = self.points.iter().zip(&self.values).map(|(&t, v)| v * f(t)).collect();
        SampledFunction { points: self.points.clone(), weights: self.weights.clone(), values }
    }

    /// Σ f(t_i) w(t_i) e^{−iλ⟨x,γ(t_i)⟩} μ_i on the stored measure; accurate
    /// only when the grid resolves the phase.
    pub fn extension_sum(&self, curve: &dyn Curve, weighted: bool, x: &[f64], lambda: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&t, v), mu) in self.points.iter().zip(&self.values).zip(&self.weights) {
            let g = curve.point(t)?;
            let w = if weighted { curve.affine_weight(t)? } else { 1.0 };
            acc += v * Complex64::from_polar(w * mu, -lambda * dot(x, &g));
        }
        Ok(acc)
    }
}

/// ĝ(γ(t)) at the grid points.
pub fn restrict(g: &TestFunction, curve: &dyn Curve, grid: &TGrid) -> Result<SampledFunction> {
    g.validate()?;
    if g.dim() != curve.dim() {
        return validation("test function and curve dimensions differ");
    }
    let values = grid.points.iter().map(|&t| Ok(g.fourier(&curve.point(t)?))).collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid.points.clone(), grid.weights.clone(), values)
}

/// Panel layout and error target for [`extension`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtensionOptions {
    /// Error target relative to ∫|f|w.
    pub rel_tol: f64,
    /// Largest phase change per panel.
    pub phase_per_panel: f64,
    pub order: usize,
    pub max_panels: usize,
    /// Cells of the grid on which |γ'| is sampled.
    pub speed_cells: usize,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions { rel_tol: 1e-7, phase_per_panel: FRAC_PI_2, order: 12, max_panels: 1 << 20, speed_cells: 1024 }
    }
}

/// Panel edges on (a, b) with at most `phase_per_panel` of λ⟨x,γ⟩ per panel
/// (bounded through |x|·|γ'| on a fine grid with a 25% margin).
fn phase_panels(curve: &dyn Curve, x: &[f64], lambda: f64, opts: &ExtensionOptions) -> Result<Vec<f64>> {
    let (a, b) = curve.domain();
    let n = opts.speed_cells.max(16);
    let scale = lambda * norm2(x);
    let eps = 1e-12 * (b - a);
    let grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let speed = grid
        .iter()
        .map(|&t| Ok(scale * norm2(&curve.derivative(t.clamp(a + eps, b - eps), 1)?)))
        .collect::<Result<Vec<f64>>>()?;
    let mut edges = vec![a];
    let mut budget = 0.0;
    for i in 0..n {
        let width = grid[i + 1] - grid[i];
        let phase = 1.25 * speed[i].max(speed[i + 1]) * width;
        if phase > opts.phase_per_panel {
            // Fast cell: close the running panel and split the cell evenly.
            if *edges.last().expect("nonempty") < grid[i] {
                edges.push(grid[i]);
            }
            let pieces = (phase / opts.phase_per_panel).ceil() as usize;
            if edges.len() + pieces > opts.max_panels {
                return Err(LabError::Numerical(format!(
                    "extension needs more than {} panels; reduce λ|x| (now {scale:.3e})",
                    opts.max_panels
                )));
            }
            edges.extend((1..pieces).map(|k| grid[i] + width * k as f64 / pieces as f64));
            edges.push(grid[i + 1]);
            budget = 0.0;
        } else if budget + phase > opts.phase_per_panel {
            edges.push(grid[i]);
            budget = phase;
        } else {
            budget += phase;
        }
    }
    if *edges.last().expect("nonempty") < b {
        edges.push(b);
    }
    Ok(edges)
}

fn panel_sum(edges: &[f64], rule: &GaussLegendre, f: &(dyn Fn(f64) -> Result<(Complex64, f64)> + Sync)) -> Result<(Complex64, f64)> {
    edges
        .par_windows(2)
        .map(|w| {
            let mut z = Complex64::new(0.0, 0.0);
            let mut m = 0.0;
            for (t, wt) in rule.mapped(w[0], w[1]) {
                let (v, a) = f(t)?;
                z += v * wt;
                m += a * wt;
            }
            Ok((z, m))
        })
        .collect::<Result<Vec<_>>>()
        .map(|parts| parts.into_iter().fold((Complex64::new(0.0, 0.0), 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1)))
}

/// Value of the extension operator together with ∫|f|w and the error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionValue {
    pub value: Complex64,
    pub l1_mass: f64,
    pub error: f64,
    pub panels: usize,
}

/// ∫_a^b f(t) w(t) e^{−iλ⟨x,γ(t)⟩} dt (w ≡ 1 unless `weighted`).
///
/// Panels are laid out from the phase speed, then every panel is halved
/// until two successive layouts agree to `rel_tol`·∫|f|w.
pub fn extension(
    f: &(dyn Fn(f64) -> Complex64 + Sync),
    curve: &dyn Curve,
    weighted: bool,
    x: &[f64],
    lambda: f64,
    opts: &ExtensionOptions,
) -> Result<ExtensionValue> {
    if x.len() != curve.dim() {
        return validation("x and curve dimensions differ");
    }
    if !(lambda >= 1.0) {
        return validation("λ must be at least 1");
    }
    let integrand = |t: f64| -> Result<(Complex64, f64)> {
        let w = if weighted { curve.affine_weight(t)? } else { 1.0 };
        let g = curve.point(t)?;
        let fv = f(t);
        Ok((fv * Complex64::from_polar(w, -lambda * dot(x, &g)), fv.norm() * w))
    };
    let rule = GaussLegendre::get(opts.order);
    let mut edges = phase_panels(curve, x, lambda, opts)?;
    let (mut prev, _) = panel_sum(&edges, rule, &integrand)?;
    loop {
        let mut fine = Vec::with_capacity(2 * edges.len());
        for w in edges.windows(2) {
            fine.push(w[0]);
            fine.push(0.5 * (w[0] + w[1]));
        }
        fine.push(*edges.last().expect("nonempty"));
        if fine.len() > opts.max_panels {
            return Err(LabError::Numerical(format!(
                "extension did not reach tolerance within {} panels; reduce λ|x|",
                opts.max_panels
            )));
        }
        let (next, m) = panel_sum(&fine, rule, &integrand)?;
        let err = (next - prev).norm();
        let mass = m;
        edges = fine;
        prev = next;
        if err <= opts.rel_tol * mass.max(f64::MIN_POSITIVE) || err == 0.0 {
            return Ok(ExtensionValue { value: prev, l1_mass: mass, error: err, panels: edges.len() - 1 });
        }
    }
}

/// χ(x) for T_λ: the closed ball of diameter 1 around `center`.
pub fn cutoff(x: &[f64], center: &[f64]) -> bool {
    x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= 0.5
}

/// T_λ f(x) = χ(x)·∫ f(t) e^{−iλ⟨x,γ(t)⟩} dt.
pub fn truncated_extension(
    f: &(dyn Fn(f64) -> Complex64 + Sync),
    curve: &dyn Curve,
    x: &[f64],
    lambda: f64,
    center: &[f64],
    opts: &ExtensionOptions,
) -> Result<Complex64> {
    if !cutoff(x, center) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(extension(f, curve, false, x, lambda, opts)?.value)
}

/// Secondary Lorentz index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LorentzIndex {
    Finite(f64),
    /// Serialized as the string "inf".
    Infinite(InfTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

impl LorentzIndex {
    pub const INFINITY: LorentzIndex = LorentzIndex::Infinite(InfTag::Inf);
}

/// ∥f∥_{L^{q,r}} = (∫_0^∞ (s^{1/q} f*(s))^r ds/s)^{1/r}, and for r = ∞ the
/// weak functional sup_s s^{1/q} f*(s), with f* the decreasing rearrangement
/// of |f| against the stored measure.
pub fn lorentz_norm(f: &SampledFunction, q: f64, r: LorentzIndex) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return validation("q must be positive and finite");
    }
    let mut pairs: Vec<(f64, f64)> = f.values.iter().map(|v| v.norm()).zip(f.weights.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    match r {
        LorentzIndex::Infinite(_) => {
            let mut mu = 0.0;
            let mut best: f64 = 0.0;
            for (v, w) in pairs {
                mu += w;
                best = best.max(v * mu.powf(1.0 / q));
            }
            Ok(best)
        }
        LorentzIndex::Finite(r) => {
            if !(r > 0.0) {
                return validation("r must be positive");
            }
            let e = r / q;
            let mut mu: f64 = 0.0;
            let mut acc = 0.0;
            for (v, w) in pairs {
                let next = mu + w;
                // ∫_{μ}^{μ+w} s^{r/q − 1} ds = (q/r)(next^{r/q} − μ^{r/q}); for r = q it is w.
                let piece = if (e - 1.0).abs() < 1e-15 { w } else { (next.powf(e) - mu.powf(e)) / e };
                acc += v.powf(r) * piece;
                mu = next;
            }
            Ok(acc.powf(1.0 / r))
        }
    }
}

/// Sample the restriction of every test function to every curve and report
/// ∥ĝ∘γ∥_{L^Q(w dt or dt)}/∥g∥_{L^P}: the maximum per curve and the
/// max/min spread across the family. Exploratory: no bound is asserted.
pub fn empirical_ratio(
    curves: &[SimpleCurve],
    big_p: f64,
    big_q: f64,
    weighted: bool,
    tests: &[TestFunction],
    panels: usize,
) -> Result<CheckReport> {
    if curves.is_empty() || tests.is_empty() {
        return validation("need at least one curve and one test function");
    }
    if !(big_p >= 1.0 && big_q > 0.0) {
        return validation("need P ≥ 1 and Q > 0");
    }
    let rows = curves
        .par_iter()
        .map(|curve| -> Result<Vec<f64>> {
            let (a, b) = curve.bounds();
            let grid = TGrid::graded(a, b, panels.max(2), 12, 0.5_f64.powf(1.0 / 4.0));
            tests
                .iter()
                .map(|g| {
                    let sampled = restrict(g, curve, &grid)?;
                    let sampled = if weighted {
                        let w: Vec<f64> = grid.points.iter().map(|&t| affine_weight(curve, t)).collect::<Result<_>>()?;
                        let mut i = 0;
                        sampled.scaled_by(|_| {
                            // |ĝ|^Q w = |ĝ w^{1/Q}|^Q.
                            let v = w[i].powf(1.0 / big_q);
                            i += 1;
                            v
                        })
                    } else {
                        sampled
                    };
                    Ok(sampled.lq_norm(big_q) / g.lp_norm(big_p))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let maxima: Vec<f64> = rows.iter().map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    let hi = maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    let finite = rows.iter().flatten().all(|x| x.is_finite());
    let mut series = Series::new("family-ratio", &["family_index", "max_ratio"]).with_kind("ratio-vs-parameter");
    for (i, m) in maxima.iter().enumerate() {
        series.push(vec![i as f64, *m]);
    }
    let labels: Vec<String> = curves.iter().map(|c| c.phi().label()).collect();
    let mut r = CheckReport::unbounded(
        "spectral.empirical-ratio",
        json!({"P": big_p, "Q": big_q, "weighted": weighted, "curves": labels, "tests": tests, "panels": panels}),
        spread,
        finite && spread.is_finite(),
    )
    .with_witness("max ratio per curve", maxima)
    .with_series(series)
    .with_note("exploratory: observed ratios only, not an operator-norm bound");
    if !finite {
        r = r.fail_with("a ratio was not finite");
    }
    Ok(r)
}

/// Invariance of ∥ĝ∘γ∥_{L^Q(0,∞)}/∥g∥_{L^P} for the moment curve
/// γ(t) = (t, t²/2!, …, t^d/d!) under g ↦ g(δ_λ^{−1}·), δ_λ = diag(λ, …, λ^d),
/// with Q = 2/(d(d+1)(1 − 1/P)); the ratio should not drift with λ.
pub fn dilation_sweep(d: usize, big_p: f64, sigma: f64, lambdas: &[f64]) -> Result<CheckReport> {
    if d < 2 || !(big_p > 1.0 && big_p < p_d(d)) {
        return validation(format!("need d ≥ 2 and 1 < P < p_d, got d = {d}, P = {big_p}"));
    }
    let df = d as f64;
    let big_q = 2.0 / (df * (df + 1.0) * (1.0 - 1.0 / big_p));
    let ratios = lambdas
        .iter()
        .map(|&lambda| -> Result<f64> {
            let scales: Vec<f64> = (1..=d).map(|j| sigma * lambda.powi(j as i32)).collect();
            let g = TestFunction::gaussian(vec![0.0; d], scales);
            // |ĝ(γ(t))| ≤ C·exp(−2π²σ²λ²t²); stop where that is below e^{−60}.
            let t_max = (60.0 / (2.0 * PI * PI)).sqrt() / (sigma * lambda);
            let gamma = |t: f64| -> Vec<f64> { (1..=d).map(|j| t.powi(j as i32) / factorial(j)).collect() };
            let opts = AdaptiveOptions::default().with_rel_tol(1e-12).with_order(16);
            let integral = adaptive(0.0, t_max, &opts, |t| g.fourier(&gamma(t)).norm().powf(big_q))?;
            Ok(integral.value.powf(1.0 / big_q) / g.lp_norm(big_p))
        })
        .collect::<Result<Vec<_>>>()?;
    let first = ratios[0];
    let drift = ratios.iter().map(|r| (r / first - 1.0).abs()).fold(0.0, f64::max);
    let mut series = Series::new("dilation-ratio", &["lambda", "ratio"]).with_kind("ratio-vs-parameter");
    for (l, r) in lambdas.iter().zip(&ratios) {
        series.push(vec![*l, *r]);
    }
    Ok(CheckReport::judged(
        "spectral.dilation-sweep",
        json!({"d": d, "P": big_p, "Q": big_q, "sigma": sigma, "lambdas": lambdas}),
        drift,
        0.0,
        Relation::AtMost,
        0.01,
    )
    .with_series(series))
}

/// With t = 2^{−k}s: ĝ(γ(2^{−k}s)) = ĝ_k(γ(s)) where ĝ_k(ξ) = ĝ(δ_k ξ),
/// δ_k = diag(2^{−k a_i}); and ∥ĝ∘γ∥_{L^p(I_k)} = 2^{−k/p}∥ĝ_k∘γ∥_{L^p([1/2,1])}
/// with I_k = [2^{−k−1}, 2^{−k}]. The left norm uses adaptive quadrature on
/// I_k and the right a fixed Gauss–Legendre grid on [1/2, 1].
pub fn homogeneous_rescale_check(curve: &HomogeneousCurve, k: i32, g: &TestFunction, p: f64) -> Result<CheckReport> {
    g.validate()?;
    let d = curve.dim();
    if g.dim() != d {
        return validation("test function and curve dimensions differ");
    }
    if !(p >= 1.0) {
        return validation("p must be at least 1");
    }
    let scale = 2f64.powi(-k);
    let g_k = |xi: &[f64]| g.fourier(&curve.dilate(scale, xi));
    let grid = TGrid::uniform(0.5, 1.0, 32, 16);
    let mut pointwise: f64 = 0.0;
    for &s in &grid.points {
        let lhs = g.fourier(&curve.raw_derivative(scale * s, 0));
        let rhs = g_k(&curve.raw_derivative(s, 0));
        pointwise = pointwise.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300));
    }
    let opts = AdaptiveOptions::default().with_rel_tol(1e-13).with_order(14);
    let lhs = adaptive(0.5 * scale, scale, &opts, |t| g.fourier(&curve.raw_derivative(t, 0)).norm().powf(p))?
        .value
        .powf(1.0 / p);
    let rhs_inner: f64 = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(&s, w)| g_k(&curve.raw_derivative(s, 0)).norm().powf(p) * w)
        .sum();
    let rhs = scale.powf(1.0 / p) * rhs_inner.powf(1.0 / p);
    let norm_residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300);
    let dd = curve.homogeneous_dimension();
    let excess = (dd + 1.0) * (1.0 - 1.0 / p_d(d)) - 1.0;
    let mut r = CheckReport::judged(
        "spectral.homogeneous-rescale",
        json!({"exponents": curve.exponents(), "k": k, "p": p, "test": g}),
        norm_residual.max(pointwise),
        0.0,
        Relation::AtMost,
        1e-9,
    )
    .with_witness("(norm on I_k, rescaled norm)", vec![lhs, rhs])
    .with_witness("pointwise residual", vec![pointwise])
    .with_witness("(D, D_0, (D+1)(1−1/p_d)−1)", vec![dd, curve.nondegenerate_dimension(), excess]);
    if (excess > 0.0) != (dd > curve.nondegenerate_dimension()) && (dd - curve.nondegenerate_dimension()).abs() > 1e-12 {
        r = r.fail_with("sign of (D+1)(1−1/p_d)−1 disagrees with D > D_0");
    }
    Ok(r)
}

/// Lattice settings for [`converse_scaling_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeOptions {
    /// Spacing as a fraction of the narrowest Gaussian width.
    pub spacing: f64,
    /// Half-width of the lattice box in marginal standard deviations.
    pub extent: f64,
    pub max_points: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions { spacing: 0.8, extent: 9.0, max_points: 20_000_000 }
    }
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
fn top_eigenvalue(a: &[Vec<f64>]) -> f64 {
    let d = a.len();
    let mut v = vec![1.0; d];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = mat_vec(a, &v);
        let n = norm2(&w);
        if n == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|x| x / n).collect();
        if (n - lambda).abs() <= 1e-14 * n {
            return n;
        }
        lambda = n;
    }
    lambda
}

/// Trapezoidal lattice sum of exp(−yᵀAy) over ℝ^d; accurate to roughly
/// exp(−π²/(spacing²·λ_max)) since the integrand is a Gaussian.
fn gaussian_lattice_integral(a: &[Vec<f64>], opts: &LatticeOptions) -> Result<f64> {
    let d = a.len();
    let inv = inverse(a).ok_or_else(|| LabError::Numerical("lattice form is singular".into()))?;
    let lmax = top_eigenvalue(a);
    // Narrowest width of exp(−yᵀAy) in the sense of a standard deviation.
    let sigma_min = (0.5 / lmax).sqrt();
    let h = opts.spacing * sigma_min;
    let half: Vec<usize> = (0..d)
        .map(|i| ((opts.extent * (0.5 * inv[i][i]).sqrt() / h).ceil() as usize).max(1))
        .collect();
    let total: f64 = half.iter().map(|n| (2 * n + 1) as f64).product();
    if total > opts.max_points as f64 {
        return Err(LabError::Numerical(format!(
            "lattice needs {total:.0} points (cap {}); use a better-conditioned parallelepiped",
            opts.max_points
        )));
    }
    let n0 = half[0] as i64;
    let rows: Vec<f64> = (-n0..=n0)
        .into_par_iter()
        .map(|i0| {
            let mut idx: Vec<i64> = half.iter().map(|n| -(*n as i64)).collect();
            idx[0] = i0;
            let mut acc = 0.0;
            loop {
                let y: Vec<f64> = idx.iter().map(|i| *i as f64 * h).collect();
                let q: f64 = (0..d).map(|r| y[r] * dot(&a[r], &y)).sum();
                acc += (-q).exp();
                // Odometer over axes 1..d.
                let mut ax = 1;
                loop {
                    if ax == d {
                        return acc;
                    }
                    if idx[ax] < half[ax] as i64 {
                        idx[ax] += 1;
                        break;
                    }
                    idx[ax] = -(half[ax] as i64);
                    ax += 1;
                }
            }
        })
        .collect();
    // Sequential sum keeps the result independent of the thread count.
    Ok(rows.iter().sum::<f64>() * h.powi(d as i32))
}

/// For ĝ(x) = f(T^{−1}(x − x_0)) with T the linear part of E's affine map and
/// x_0 its base, checks ∥g∥_{L^P} = m_d(E)^{1/P'}∥f̂∥_{L^P}: the left side by
/// a lattice sum of |g(y)|^P = |det T|^P|f̂(−Tᵀy)|^P, the right in closed form.
/// With a curve and f ≥ 1 on [0,1]^d (so ĝ ≥ 1 on E) it also checks
/// λ_γ(E)^{1/Q} ≤ ∥ĝ∘γ∥_{L^Q(dt)}.
pub fn converse_scaling_check(
    e: &Parallelepiped,
    f: &TestFunction,
    big_p: f64,
    big_q: f64,
    alpha: f64,
    curve: Option<&dyn Curve>,
    lattice: &LatticeOptions,
) -> Result<CheckReport> {
    f.validate()?;
    let d = e.dim();
    if f.dim() != d {
        return validation("test function and parallelepiped dimensions differ");
    }
    if !(big_p > 1.0 && big_q > 0.0 && alpha > 0.0) {
        return validation("need P > 1, Q > 0 and α > 0");
    }
    let inv_p_prime = 1.0 - 1.0 / big_p;
    if (inv_p_prime - alpha / big_q).abs() > 1e-12 {
        return validation(format!("exponents violate 1/P' = α/Q: {inv_p_prime} vs {}", alpha / big_q));
    }
    if e.is_degenerate() {
        return validation("parallelepiped is degenerate");
    }
    let (scales, amplitude) = match f {
        TestFunction::Gaussian { scales, amplitude, .. } | TestFunction::ModulatedGaussian { scales, amplitude, .. } => {
            (scales.clone(), *amplitude)
        }
        TestFunction::BoxBump { .. } => {
            return Err(LabError::Unsupported("the converse check needs a Gaussian-based f".into()));
        }
    };
    let (m, x0) = e.affine_map();
    let det = e.volume();
    // |f̂(η)| = A'·exp(−½Σ η_i²/τ_i²), so |g(y)|^P = (det·A')^P·exp(−yᵀ K y),
    // K = (P/2)·T·diag(1/τ²)·Tᵀ.
    let (amp_hat, tau) = hat_parameters(amplitude, &scales);
    let form: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| 0.5 * big_p * (0..d).map(|l| m[i][l] * m[j][l] / (tau[l] * tau[l])).sum::<f64>()).collect())
        .collect();
    let integral = gaussian_lattice_integral(&form, lattice)?;
    let g_norm = det * amp_hat.abs() * integral.powf(1.0 / big_p);
    let predicted = det.powf(inv_p_prime) * f.fourier_lp_norm(big_p)?;
    let residual = (g_norm - predicted).abs() / predicted;
    let mut r = CheckReport::judged(
        "spectral.converse-identity",
        json!({"E": e, "f": f, "P": big_p, "Q": big_q, "alpha": alpha}),
        residual,
        0.0,
        Relation::AtMost,
        1e-6,
    )
    .with_witness("(lattice norm of g, m(E)^(1/P') times norm of f-hat, m(E))", vec![g_norm, predicted, det]);
    if let Some(curve) = curve {
        if f.min_on_unit_cube() >= 1.0 {
            let minv = inverse(&m).expect("nondegenerate");
            let ghat = |t: f64| -> Result<f64> {
                let y: Vec<f64> = curve.point(t)?.iter().zip(&x0).map(|(a, b)| a - b).collect();
                Ok(f.value(&mat_vec(&minv, &y)).norm())
            };
            let (a, b) = curve.domain();
            let lambda = lambda_measure(curve, e, &LambdaOptions::default())?;
            let mut failed = None;
            let opts = AdaptiveOptions::default().with_rel_tol(1e-10);
            let norm = adaptive(a, b, &opts, |t| match ghat(t) {
                Ok(v) => v.powf(big_q),
                Err(err) => {
                    failed.get_or_insert(err);
                    0.0
                }
            })?;
            if let Some(err) = failed {
                return Err(err);
            }
            let norm = norm.value.powf(1.0 / big_q);
            let lhs = lambda.powf(1.0 / big_q);
            r = r.with_witness("(λ_γ(E)^(1/Q), norm of ĝ∘γ in L^Q)", vec![lhs, norm]);
            if lhs > norm * (1.0 + 1e-9) {
                r = r.fail_with("λ_γ(E)^{1/Q} exceeds ∥ĝ∘γ∥_{L^Q}");
            }
        } else {
            r = r.with_note("monotonicity step skipped: f < 1 somewhere on the unit cube");
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Monomial, Polynomial};
    use std::sync::Arc;

    fn parabola() -> SimpleCurve {
        SimpleCurve::new(2, Arc::new(Polynomial::new(vec![0.0, 0.0, 0.5])), (0.0, 1.0)).unwrap()
    }

    #[test]
    fn extension_of_one_at_origin() {
        let v = extension(&|_| Complex64::new(1.0, 0.0), &parabola(), false, &[0.0, 0.0], 1.0, &Default::default()).unwrap();
        assert!((v.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn extension_conjugate_symmetry() {
        let c = parabola();
        let f = |t: f64| Complex64::new(1.0 + t, 0.0);
        let o = ExtensionOptions::default();
        let a = extension(&f, &c, true, &[3.0, 40.0], 2.0, &o).unwrap().value;
        let b = extension(&f, &c, true, &[-3.0, -40.0], 2.0, &o).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn extension_budget_error() {
        let o = ExtensionOptions { max_panels: 64, ..Default::default() };
        let r = extension(&|_| Complex64::new(1.0, 0.0), &parabola(), false, &[1e6, 0.0], 1.0, &o);
        assert!(matches!(r, Err(LabError::Numerical(_))));
    }

    #[test]
    fn lorentz_indicator_and_diagonal() {
        let f = SampledFunction::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.25, 1.0], vec![1.0.into(), 1.0.into(), 0.0.into()]).unwrap();
        let weak = lorentz_norm(&f, 3.0, LorentzIndex::INFINITY).unwrap();
        assert!((weak - 0.75f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let g = SampledFunction::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.25, 1.0], vec![2.0.into(), 0.5.into(), 1.5.into()]).unwrap();
        assert!((lorentz_norm(&g, 2.5, LorentzIndex::Finite(2.5)).unwrap() - g.lq_norm(2.5)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_restriction_is_positive() {
        let c = SimpleCurve::new(3, Arc::new(Monomial::new(4.0)), (0.0, 1.0)).unwrap();
        let s = restrict(&TestFunction::standard_gaussian(3), &c, &TGrid::uniform(0.0, 1.0, 4, 8)).unwrap();
        assert!(s.values().iter().all(|v| v.re > 0.0 && v.im.abs() < 1e-15));
    }

    #[test]
    fn converse_unit_cube_is_identity() {
        let e = Parallelepiped::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let f = TestFunction::gaussian(vec![0.3, 0.1], vec![0.7, 1.2]);
        let r = converse_scaling_check(&e, &f, 1.5, 1.0, 1.0 / 3.0, None, &Default::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(converse_scaling_check(&e, &f, 1.5, 1.0, 0.5, None, &Default::default()).is_err());
    }
}
