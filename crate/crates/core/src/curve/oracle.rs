//! Analytic derivative stacks φ, φ', …, φ^(maxOrder) for the curve families.

use std::fmt;
use std::sync::Arc;

use crate::quadrature::GaussLegendre;

/// A real function on an open interval that answers φ^(k)(t) for k ≤ `max_order`.
///
/// Implementations evaluate analytically; finite differences only validate them.
pub trait DerivativeOracle: Send + Sync + fmt::Debug {
    fn max_order(&self) -> usize;

    /// Open interval on which the function is defined.
    fn support(&self) -> (f64, f64);

    /// φ^(k)(t). Callers have checked `k <= max_order()` and `t` against the support.
    fn derivative(&self, t: f64, k: usize) -> f64;

    /// ln φ^(k)(t), for families whose derivatives underflow long before they
    /// vanish. Non-positive values give NaN or −∞.
    fn ln_derivative(&self, t: f64, k: usize) -> f64 {
        self.derivative(t, k).ln()
    }

    /// Human-readable label used in reports.
    fn label(&self) -> String {
        format!("{self:?}")
    }
}

pub type Oracle = Arc<dyn DerivativeOracle>;

pub(crate) fn falling_factorial(beta: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (beta - i as f64))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// φ(t) = c·t^β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub beta: f64,
}

impl Monomial {
    pub fn new(beta: f64) -> Self {
        Monomial { coeff: 1.0, beta }
    }

    pub fn scaled(coeff: f64, beta: f64) -> Self {
        Monomial { coeff, beta }
    }

    fn integer_power(&self) -> Option<usize> {
        (self.beta >= 0.0 && self.beta.fract() == 0.0).then_some(self.beta as usize)
    }
}

impl DerivativeOracle for Monomial {
    fn max_order(&self) -> usize {
        64
    }

    fn support(&self) -> (f64, f64) {
        match self.integer_power() {
            Some(_) => (f64::NEG_INFINITY, f64::INFINITY),
            None => (0.0, f64::INFINITY),
        }
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        if let Some(n) = self.integer_power() {
            if k > n {
                return 0.0;
            }
            return self.coeff * falling_factorial(self.beta, k) * t.powi((n - k) as i32);
        }
        self.coeff * falling_factorial(self.beta, k) * t.powf(self.beta - k as f64)
    }

    fn ln_derivative(&self, t: f64, k: usize) -> f64 {
        let c = self.coeff * falling_factorial(self.beta, k);
        if self.integer_power().is_some_and(|n| k > n) || c <= 0.0 || t <= 0.0 {
            return self.derivative(t, k).ln();
        }
        c.ln() + (self.beta - k as f64) * t.ln()
    }
}

/// φ(t) = Σ c_i t^i.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl DerivativeOracle for Polynomial {
    fn max_order(&self) -> usize {
        64
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        if k >= self.coeffs.len() {
            return 0.0;
        }
        self.coeffs[k..]
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (j, c)| acc * t + c * falling_factorial((j + k) as f64, k))
    }
}

/// φ(t) = s·e^{rt}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub scale: f64,
    pub rate: f64,
}

impl DerivativeOracle for Exponential {
    fn max_order(&self) -> usize {
        64
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        self.scale * self.rate.powi(k as i32) * (self.rate * t).exp()
    }

    fn ln_derivative(&self, t: f64, k: usize) -> f64 {
        let c = self.scale * self.rate.powi(k as i32);
        if c <= 0.0 {
            return f64::NAN;
        }
        c.ln() + self.rate * t
    }
}

/// φ(t) = exp(−t^{−β}) on t > 0, flat to infinite order at the origin.
///
/// φ^(k)(t) = β^k e^{−t^{−β}} t^{−k(β+1)} (1 + Σ_{j=1}^{k−1} a_{j,k} t^{jβ}),
/// with a_{k,m+1} = a_{k,m} − a_{k−1,m}(m + 1 − k + m/β) and a_{0,m} = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFlat {
    pub beta: f64,
    /// coefficients[k][j] = a_{j,k}; coefficients[k][0] = 1.
    coefficients: Vec<Vec<f64>>,
}

impl ExpFlat {
    pub const MAX_ORDER: usize = 12;

    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0, "exp-flat exponent must be positive");
        let mut coefficients = vec![vec![1.0], vec![1.0]];
        for m in 1..Self::MAX_ORDER {
            let prev = &coefficients[m];
            let next: Vec<f64> = (0..=m)
                .map(|k| {
                    if k == 0 {
                        return 1.0;
                    }
                    let own = prev.get(k).copied().unwrap_or(0.0);
                    own - prev[k - 1] * ((m + 1 - k) as f64 + m as f64 / beta)
                })
                .collect();
            coefficients.push(next);
        }
        ExpFlat { beta, coefficients }
    }

    /// a_{j,k} for 0 ≤ j < k.
    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        self.coefficients[k].get(j).copied().unwrap_or(0.0)
    }

    fn bracket(&self, t: f64, k: usize) -> f64 {
        let x = t.powf(self.beta);
        self.coefficients[k].iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

impl DerivativeOracle for ExpFlat {
    fn max_order(&self) -> usize {
        Self::MAX_ORDER
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        let flat = (-t.powf(-self.beta)).exp();
        if k == 0 {
            return flat;
        }
        self.beta.powi(k as i32) * flat * t.powf(-(k as f64) * (self.beta + 1.0)) * self.bracket(t, k)
    }

    fn ln_derivative(&self, t: f64, k: usize) -> f64 {
        if k == 0 {
            return -t.powf(-self.beta);
        }
        k as f64 * self.beta.ln() - t.powf(-self.beta) - k as f64 * (self.beta + 1.0) * t.ln()
            + self.bracket(t, k).ln()
    }

    fn label(&self) -> String {
        format!("ExpFlat {{ beta: {:?} }}", self.beta)
    }
}

/// t ↦ φ(b·t); derivatives pick up b^k.
#[derive(Debug, Clone)]
pub struct Rescaled {
    pub base: Oracle,
    pub factor: f64,
}

impl DerivativeOracle for Rescaled {
    fn max_order(&self) -> usize {
        self.base.max_order()
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.base.support();
        (a / self.factor, b / self.factor)
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        self.factor.powi(k as i32) * self.base.derivative(self.factor * t, k)
    }

    fn ln_derivative(&self, t: f64, k: usize) -> f64 {
        k as f64 * self.factor.ln() + self.base.ln_derivative(self.factor * t, k)
    }
}

/// s ↦ n^{-1} Σ_i φ(s + c_i): the average of shifted copies.
#[derive(Debug, Clone)]
pub struct ShiftAverage {
    pub base: Oracle,
    pub shifts: Vec<f64>,
}

impl DerivativeOracle for ShiftAverage {
    fn max_order(&self) -> usize {
        self.base.max_order()
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.base.support();
        let lo = self.shifts.iter().fold(f64::NEG_INFINITY, |m, c| m.max(a - c));
        let hi = self.shifts.iter().fold(f64::INFINITY, |m, c| m.min(b - c));
        (lo, hi)
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        let n = self.shifts.len() as f64;
        self.shifts.iter().map(|c| self.base.derivative(t + c, k)).sum::<f64>() / n
    }
}

/// φ + p for a polynomial p.
#[derive(Debug, Clone)]
pub struct PlusPolynomial {
    pub base: Oracle,
    pub poly: Polynomial,
}

impl DerivativeOracle for PlusPolynomial {
    fn max_order(&self) -> usize {
        self.base.max_order()
    }

    fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        self.base.derivative(t, k) + self.poly.derivative(t, k)
    }
}

type OracleFn = dyn Fn(f64, usize) -> f64 + Send + Sync;

/// Derivative stack given by a closure, for experiments and tests.
#[derive(Clone)]
pub struct FnOracle {
    pub name: String,
    pub max_order: usize,
    pub support: (f64, f64),
    f: Arc<OracleFn>,
}

impl FnOracle {
    pub fn new(
        name: impl Into<String>,
        max_order: usize,
        support: (f64, f64),
        f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnOracle { name: name.into(), max_order, support, f: Arc::new(f) }
    }
}

impl fmt::Debug for FnOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnOracle({})", self.name)
    }
}

impl DerivativeOracle for FnOracle {
    fn max_order(&self) -> usize {
        self.max_order
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        (self.f)(t, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlattenVariant {
    /// ψ^(d) = (d−1)!·exp(−1/φ^(d))
    Exp,
    /// ψ^(d) = (d−1)!·log φ^(d)
    Log,
}

/// ψ(t) = ∫_{left}^t (t−u)^{d−1} g(φ^(d)(u)) du with g = exp(−1/·) or log.
///
/// ψ^(d) is evaluated analytically from the base; lower orders come from a
/// cached panel table of ψ^(d) values, integrated against (t−u)^{d−1−k}/(d−1−k)!.
#[derive(Debug, Clone)]
pub struct Flattened {
    pub base: Oracle,
    pub variant: FlattenVariant,
    pub d: usize,
    pub left: f64,
    pub right: f64,
    table: Arc<PanelTable>,
}

#[derive(Debug)]
struct PanelTable {
    edges: Vec<f64>,
    /// Per panel: (node, weight·ψ^(d)(node)).
    nodes: Vec<Vec<(f64, f64)>>,
}

const TABLE_ORDER: usize = 12;

impl Flattened {
    /// Builds the flattened stack on [left, right]; `abs_tol` bounds the
    /// quadrature error of the lower derivatives.
    pub fn new(base: Oracle, variant: FlattenVariant, d: usize, left: f64, right: f64, abs_tol: f64) -> Self {
        let mut me = Flattened {
            base,
            variant,
            d,
            left,
            right,
            table: Arc::new(PanelTable { edges: Vec::new(), nodes: Vec::new() }),
        };
        me.table = Arc::new(me.build_table(abs_tol));
        me
    }

    fn top(&self, t: f64) -> f64 {
        let fd = self.base.derivative(t, self.d);
        let c = factorial(self.d - 1);
        match self.variant {
            FlattenVariant::Exp => {
                if fd <= 0.0 {
                    0.0
                } else {
                    c * (-1.0 / fd).exp()
                }
            }
            FlattenVariant::Log => c * fd.ln(),
        }
    }

    fn build_table(&self, abs_tol: f64) -> PanelTable {
        let rule = GaussLegendre::get(TABLE_ORDER);
        let integrate = |a: f64, b: f64| rule.integrate(a, b, |u| self.top(u));
        let mut stack = vec![(self.left, self.right, integrate(self.left, self.right), 0u32)];
        let mut accepted: Vec<(f64, f64)> = Vec::new();
        let span = self.right - self.left;
        // Moments up to (t−u)^{d−1} are bounded by span^{d−1}.
        let tol = abs_tol / span.max(1.0).powi(self.d as i32 - 1);
        while let Some((a, b, coarse, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let (l, r) = (integrate(a, m), integrate(m, b));
            if (l + r - coarse).abs() <= tol * (b - a) / span || depth >= 40 {
                accepted.push((a, m));
                accepted.push((m, b));
            } else {
                stack.push((a, m, l, depth + 1));
                stack.push((m, b, r, depth + 1));
            }
        }
        accepted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut edges: Vec<f64> = accepted.iter().map(|p| p.0).collect();
        edges.push(self.right);
        let nodes = accepted
            .iter()
            .map(|&(a, b)| rule.mapped(a, b).map(|(x, w)| (x, w * self.top(x))).collect())
            .collect();
        PanelTable { edges, nodes }
    }

    fn lower(&self, t: f64, k: usize) -> f64 {
        let m = self.d - 1 - k;
        let norm = factorial(m);
        let kernel = |u: f64| (t - u).powi(m as i32) / norm;
        let t = t.clamp(self.left, self.right);
        let table = &self.table;
        let p = table.edges.partition_point(|&e| e <= t).saturating_sub(1);
        let p = p.min(table.nodes.len().saturating_sub(1));
        let mut acc = 0.0;
        for panel in &table.nodes[..p] {
            acc += panel.iter().map(|&(u, wg)| wg * kernel(u)).sum::<f64>();
        }
        let start = table.edges[p];
        if t > start {
            let rule = GaussLegendre::get(TABLE_ORDER);
            acc += rule.integrate(start, t, |u| kernel(u) * self.top(u));
        }
        acc
    }
}

impl DerivativeOracle for Flattened {
    fn max_order(&self) -> usize {
        self.d
    }

    fn support(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    fn derivative(&self, t: f64, k: usize) -> f64 {
        if k == self.d {
            self.top(t)
        } else {
            self.lower(t, k)
        }
    }

    fn ln_derivative(&self, t: f64, k: usize) -> f64 {
        if k != self.d {
            return self.derivative(t, k).ln();
        }
        let c = factorial(self.d - 1).ln();
        match self.variant {
            FlattenVariant::Exp => c - (-self.base.ln_derivative(t, self.d)).exp(),
            FlattenVariant::Log => c + self.base.ln_derivative(t, self.d).ln(),
        }
    }

    fn label(&self) -> String {
        format!("Flattened({:?}, d={}, base={})", self.variant, self.d, self.base.label())
    }
}
