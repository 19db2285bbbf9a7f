//! Gauss–Legendre rules, adaptive bisection, and tensor-product cubature.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const MAX_CACHED_ORDER: usize = 64;

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on P_n.
    pub fn compute(n: usize) -> Self {
        assert!(n >= 1, "rule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared, lazily computed rule of order `n`.
    pub fn get(n: usize) -> &'static GaussLegendre {
        static CACHE: [OnceLock<GaussLegendre>; MAX_CACHED_ORDER + 1] =
            [const { OnceLock::new() }; MAX_CACHED_ORDER + 1];
        assert!(
            (1..=MAX_CACHED_ORDER).contains(&n),
            "Gauss–Legendre order {n} outside 1..={MAX_CACHED_ORDER}"
        );
        CACHE[n].get_or_init(|| GaussLegendre::compute(n))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Applies the rule on [a, b].
    pub fn integrate<V: QuadValue>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> V) -> V {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = V::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and budget for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            order: 10,
            rel_tol: 1e-7,
            abs_tol: 1e-14,
            max_depth: 40,
            max_panels: 200_000,
        }
    }
}

impl AdaptiveOptions {
    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub panels: usize,
}

/// Adaptive bisection with a fixed Gauss–Legendre rule per panel.
///
/// A panel is accepted once the rule on the panel and the sum over its two
/// halves agree; the acceptance threshold is shared out in proportion to
/// panel length.
pub fn adaptive<V: QuadValue>(
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
    mut f: impl FnMut(f64) -> V,
) -> Result<Estimate<V>> {
    if a == b {
        return Ok(Estimate { value: V::zero(), error: 0.0, panels: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let rule = GaussLegendre::get(opts.order);
    let whole = rule.integrate(lo, hi, &mut f);
    let mut scale = whole.magnitude();

    let mut stack = vec![(lo, hi, whole, 0u32)];
    let mut total = V::zero();
    let mut error = 0.0;
    let mut panels = 0usize;
    let length = hi - lo;
    while let Some((x0, x1, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (x0 + x1);
        let left = rule.integrate(x0, mid, &mut f);
        let right = rule.integrate(mid, x1, &mut f);
        let fine = left + right;
        let diff = (fine - coarse).magnitude();
        scale = scale.max(fine.magnitude());
        let allowed = (opts.abs_tol + opts.rel_tol * scale) * ((x1 - x0) / length);
        if diff <= allowed || depth >= opts.max_depth {
            if depth >= opts.max_depth && diff > allowed {
                error += diff;
            } else {
                error += diff * 1e-2;
            }
            total = total + fine;
            panels += 1;
            if panels > opts.max_panels {
                return Err(LabError::Numerical(format!(
                    "adaptive quadrature on [{lo}, {hi}] exceeded {} panels",
                    opts.max_panels
                )));
            }
        } else {
            stack.push((mid, x1, right, depth + 1));
            stack.push((x0, mid, left, depth + 1));
        }
    }
    Ok(Estimate { value: total * sign, error, panels })
}

/// Adaptive quadrature with forced breakpoints (kinks, discontinuities).
pub fn adaptive_with_breaks<V: QuadValue>(
    breaks: &[f64],
    opts: &AdaptiveOptions,
    mut f: impl FnMut(f64) -> V,
) -> Result<Estimate<V>> {
    let mut value = V::zero();
    let mut error = 0.0;
    let mut panels = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let e = adaptive(w[0], w[1], opts, &mut f)?;
            value = value + e.value;
            error += e.error;
            panels += e.panels;
        }
    }
    Ok(Estimate { value, error, panels })
}

/// Tensor-product Gauss–Legendre cubature over an axis-aligned box.
pub fn tensor_box(lo: &[f64], hi: &[f64], order: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let dim = lo.len();
    if dim == 0 {
        return f(&[]);
    }
    let rule = GaussLegendre::get(order);
    let mapped: Vec<Vec<(f64, f64)>> = (0..dim).map(|i| rule.mapped(lo[i], hi[i]).collect()).collect();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut acc = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..dim {
            let (xi, wi) = mapped[i][idx[i]];
            x[i] = xi;
            w *= wi;
        }
        acc += w * f(&x);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == dim {
                return acc;
            }
        }
    }
}

/// Tensor cubature with every axis cut into `panels` equal panels.
pub fn panelled_box(lo: &[f64], hi: &[f64], order: usize, panels: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let dim = lo.len();
    let panels = panels.max(1);
    let mut cell = vec![0usize; dim];
    let mut acc = 0.0;
    let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
    loop {
        for i in 0..dim {
            let step = (hi[i] - lo[i]) / panels as f64;
            a[i] = lo[i] + step * cell[i] as f64;
            b[i] = if cell[i] + 1 == panels { hi[i] } else { a[i] + step };
        }
        acc += tensor_box(&a, &b, order, &mut f);
        let mut k = 0;
        loop {
            if k == dim {
                return acc;
            }
            cell[k] += 1;
            if cell[k] < panels {
                break;
            }
            cell[k] = 0;
            k += 1;
        }
    }
}

/// Doubles the panel count per axis until two successive cubatures agree to
/// `rel_tol` (or `abs_tol`), or the evaluation budget runs out.
pub fn refined_box(
    lo: &[f64],
    hi: &[f64],
    order: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_evals: usize,
    mut f: impl FnMut(&[f64]) -> f64,
) -> Result<Estimate<f64>> {
    let dim = lo.len() as u32;
    let mut panels = 1usize;
    let mut prev = panelled_box(lo, hi, order, panels, &mut f);
    loop {
        let next_panels = panels * 2;
        let cost = (next_panels * order).pow(dim);
        if cost > max_evals {
            return Err(LabError::Numerical(format!(
                "box cubature did not reach rel. tol {rel_tol:e} within {max_evals} evaluations \
                 (last two values {prev:e} at {panels} panels per axis)"
            )));
        }
        let next = panelled_box(lo, hi, order, next_panels, &mut f);
        let diff = (next - prev).abs();
        if diff <= abs_tol + rel_tol * next.abs() {
            return Ok(Estimate { value: next, error: diff, panels: next_panels });
        }
        prev = next;
        panels = next_panels;
    }
}

/// Cubature on the standard n-simplex {w ∈ [0,1]^{n+1}: Σw = 1}, by collapsing
/// a tensor Gauss–Legendre rule. Nodes are barycentric; weights sum to 1/n!.
pub fn simplex_rule(n: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = GaussLegendre::get(order);
    let line: Vec<(f64, f64)> = rule.mapped(0.0, 1.0).collect();
    let mut out = Vec::with_capacity(order.pow(n as u32));
    let mut idx = vec![0usize; n];
    loop {
        let mut bary = Vec::with_capacity(n + 1);
        let mut rest = 1.0;
        let mut weight = 1.0;
        for (i, &k) in idx.iter().enumerate() {
            let (u, w) = line[k];
            bary.push(rest * u);
            weight *= w * (1.0 - u).powi((n - 1 - i) as i32);
            rest *= 1.0 - u;
        }
        bary.push(rest);
        out.push((bary, weight));
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A fixed composite quadrature grid on an interval: `panels` equal panels of
/// Gauss–Legendre order `order`, optionally graded geometrically towards the
/// left endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TGrid {
    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let edges: Vec<f64> = (0..=panels)
            .map(|i| a + (b - a) * i as f64 / panels as f64)
            .collect();
        Self::from_edges(&edges, order)
    }

    /// Panels whose widths shrink by `ratio` towards `a`, resolving endpoint
    /// singularities such as t^β with small β.
    pub fn graded(a: f64, b: f64, panels: usize, order: usize, ratio: f64) -> Self {
        let mut edges = vec![b];
        let mut x = b;
        for _ in 0..panels - 1 {
            x = a + (x - a) * ratio;
            edges.push(x);
        }
        edges.push(a);
        edges.reverse();
        Self::from_edges(&edges, order)
    }

    pub fn from_edges(edges: &[f64], order: usize) -> Self {
        let rule = GaussLegendre::get(order);
        let mut points = Vec::with_capacity(edges.len() * order);
        let mut weights = Vec::with_capacity(edges.len() * order);
        for w in edges.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                points.push(x);
                weights.push(wt);
            }
        }
        TGrid { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}
