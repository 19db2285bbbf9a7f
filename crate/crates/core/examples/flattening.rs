//! Mean-value constants A, the gap condition and iterated flattening of t⁴.

use restriction_lab::conditions::{build_flattened, check_expflat, check_phicond, estimate_a, MeanVariant};
use restriction_lab::curve::{validate_monotone, FlattenVariant, SimpleCurve};

pub fn run_example() -> restriction_lab::Result<()> {
    for beta in [3.0, 3.5, 6.0] {
        let c = SimpleCurve::monomial(3, beta, (0.0, 1.0))?;
        let am = estimate_a(&c, MeanVariant::Am, 32)?;
        let gm = estimate_a(&c, MeanVariant::Gm, 32)?;
        println!("t^{beta}: A_am = {:.12}, A_gm = {:.12}", am.constant, gm.constant);
    }

    let base = SimpleCurve::monomial(3, 4.0, (0.0, 1.0))?;
    let once = build_flattened(&base, FlattenVariant::Exp)?;
    println!("flattened once: monotone = {}", validate_monotone(&once, 64)?.pass);
    for t in [0.1, 0.3, 0.6, 1.0] {
        println!("  φ'''({t}) = {:.6e}", once.phi_derivative(t, 3)?);
    }
    for grid in [16, 32, 64] {
        println!("  grid {grid}: A_gm = {:.12}", estimate_a(&once, MeanVariant::Gm, grid)?.constant);
    }

    let gap = check_phicond(&SimpleCurve::monomial(3, 3.0, (0.0, 1.0))?, 1.0 / 7.0, 32)?;
    println!("gap condition for t³ at α = 1/7: inf = {:.6}, σ = {:.6}", gap.infimum.unwrap_or(f64::NAN), gap.constant);

    let fd = check_expflat(1.0, 4, &[0.3, 0.5, 0.8, 1.0])?;
    println!("exp(−1/t) derivatives vs finite differences: worst {:.2e}", fd.estimate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
