//! Restriction ratios ∥ĝ∘γ∥_Q/∥g∥_P across a flat family, dilation
//! invariance for the moment curve, and the converse scaling identity.

use restriction_lab::conditions::build_flattened;
use restriction_lab::curve::{FlattenVariant, SimpleCurve};
use restriction_lab::measure::Parallelepiped;
use restriction_lab::spectral::{converse_scaling_check, dilation_sweep, empirical_ratio, LatticeOptions, TestFunction};

pub fn run_example() -> restriction_lab::Result<()> {
    let phi0 = SimpleCurve::monomial(3, 4.0, (0.0, 1.0))?;
    let phi1 = build_flattened(&phi0, FlattenVariant::Exp)?;
    let phi2 = build_flattened(&phi1, FlattenVariant::Exp)?;
    let tests: Vec<TestFunction> = [0.05, 0.3, 1.0].iter().map(|&s| TestFunction::gaussian(vec![0.0; 3], vec![s; 3])).collect();
    let r = empirical_ratio(&[phi0.clone(), phi1, phi2], 9.0 / 8.0, 1.5, true, &tests, 64)?;
    for s in &r.series {
        println!("{}: {}", s.name, s.columns.join(", "));
        for row in &s.rows {
            println!("  {row:.6?}");
        }
    }
    println!("spread max/min across the family: {:.4}", r.estimate);

    let d = dilation_sweep(3, 9.0 / 8.0, 0.5, &[1.0, 2.0, 4.0, 8.0])?;
    println!("dilation sweep: relative drift {:.2e}, pass = {}", d.estimate, d.pass);

    let e = Parallelepiped::new(vec![0.1, 0.0, 0.0], vec![vec![0.5, 0.1, 0.0], vec![0.0, 0.4, 0.1], vec![0.0, 0.0, 0.3]])?;
    let f = TestFunction::Gaussian { center: vec![0.5; 3], scales: vec![1.0; 3], amplitude: 1.5 };
    let (p, alpha) = (9.0 / 8.0, 4.0 / 27.0);
    let c = converse_scaling_check(&e, &f, p, alpha * p / (p - 1.0), alpha, Some(&phi0), &LatticeOptions::default())?;
    println!("converse identity residual {:.2e}, pass = {}", c.estimate, c.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
