//! Central finite differences with Richardson extrapolation.
//!
//! These are validation oracles for analytic derivative stacks and are never
//! used as primary evaluators.

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Order-`k` central difference with step `h` (error O(h²)).
pub fn central_difference(f: impl Fn(f64) -> f64, t: f64, k: usize, h: f64) -> f64 {
    if k == 0 {
        return f(t);
    }
    let half = k as f64 / 2.0;
    let mut acc = 0.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(k, j) * f(t + (half - j as f64) * h);
    }
    acc / h.powi(k as i32)
}

/// Richardson-extrapolated central difference over `levels` halvings of `h`.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, t: f64, k: usize, h: f64, levels: usize) -> f64 {
    let levels = levels.max(1);
    let mut table: Vec<f64> = (0..levels)
        .map(|i| central_difference(&f, t, k, h / 2f64.powi(i as i32)))
        .collect();
    // Error expansion of a central stencil is even in h.
    let mut factor = 4.0;
    for _ in 1..levels {
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    table[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_derivatives() {
        let f = |x: f64| x.sin();
        for k in 0..=4 {
            let want = match k % 4 {
                0 => 0.7f64.sin(),
                1 => 0.7f64.cos(),
                2 => -0.7f64.sin(),
                _ => -0.7f64.cos(),
            };
            let got = richardson_derivative(f, 0.7, k, 0.05, 4);
            // Roundoff grows like ε/h^k.
            let tol = if k <= 2 { 1e-8 } else { 1e-6 };
            assert!((got - want).abs() < tol * (1.0 + want.abs()), "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn central_difference_is_exact_on_matching_polynomials() {
        let f = |x: f64| x.powi(3);
        assert!((central_difference(f, 2.0, 3, 0.1) - 6.0).abs() < 1e-9);
    }
}
