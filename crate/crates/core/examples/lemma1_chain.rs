//! Nested parallelepipeds E_{d−2} ⊂ … ⊂ E_0 around an arc, the measure
//! λ_γ(E) of the parameters whose curve points lie in E, and its α-scaling.

use restriction_lab::curve::SimpleCurve;
use restriction_lab::measure::{
    estimate_alpha_b, lambda_measure, lemma1_chain, loglog_slope, osculating_family, LambdaOptions,
};

pub fn run_example() -> restriction_lab::Result<()> {
    let c = SimpleCurve::monomial(3, 4.0, (0.0, 1.0))?;
    let chain = lemma1_chain(&c, 0.2, 0.1, 1000)?;
    println!("ρ = {:.6}", chain.rho);
    for link in &chain.links {
        println!(
            "  ℝ^{}: volume {:.6e}, bound {:.6e}, containment excess {:.1e}",
            link.k, link.volume, link.bound, link.containment_excess
        );
    }
    let opts = LambdaOptions::default();
    println!("λ(E_0) = {:.6} (arc length 0.1), pass = {}", lambda_measure(&c, chain.last(), &opts)?, chain.report.pass);

    let radii = [0.002, 0.004, 0.008, 0.016, 0.032];
    let family = osculating_family(&c, 0.5, &radii, 1.5)?;
    let pairs: Vec<(f64, f64)> = family.iter().map(|e| Ok((e.volume(), lambda_measure(&c, e, &opts)?))).collect::<restriction_lab::Result<_>>()?;
    println!("log-log slope of λ against volume: {:.4} (affine scaling 1/6)", loglog_slope(pairs).unwrap_or(f64::NAN));
    let r = estimate_alpha_b(&c, &family, 1.0 / 6.0, &opts)?;
    println!("B_est at α = 1/6: {:.6}", r.estimate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
