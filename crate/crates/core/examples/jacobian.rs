//! Offspring Jacobian J_φ(t, h): determinant, iterated integral and simplex
//! average, plus the affine decomposition of the offspring curve.

use restriction_lab::curve::SimpleCurve;
use restriction_lab::offspring::{
    check_jacobian_identity, jacobian_direct, jacobian_integral, jacobian_simplex, offspring_decomposition, superfactorial,
};
use restriction_lab::vandermonde::GapVector;

pub fn run_example() -> restriction_lab::Result<()> {
    let c = SimpleCurve::monomial(3, 4.5, (0.0, 1.0))?;
    let t = 0.2;
    println!("{:>14} {:>14} {:>14} {:>14}", "h", "det", "integral", "simplex");
    for gaps in [[0.2, 0.3], [0.05, 0.1], [1e-3, 2e-3]] {
        let h = GapVector::new(gaps.to_vec())?;
        println!(
            "{:>14} {:>14.6e} {:>14.6e} {:>14.6e}",
            format!("{gaps:?}"),
            jacobian_direct(&c, t, &h)?,
            jacobian_integral(&c, t, &h)?,
            jacobian_simplex(&c, t, &h, 10)?
        );
    }

    // For d = 3 the centred moments leave 𝔄 = I; d = 4 shows the structure.
    let c4 = SimpleCurve::monomial(4, 5.5, (0.0, 1.0))?;
    let h = GapVector::new(vec![0.1, 0.25, 0.05])?;
    let frame = offspring_decomposition(&c4, &h)?;
    println!("h̄ = {:.4}, det 𝔄 = {}, 𝔳 = {:.5?}", frame.hbar, frame.determinant(), frame.shift);
    for row in &frame.matrix {
        println!("  {row:.5?}");
    }

    let report = check_jacobian_identity(&[2, 3, 4], 20, 1)?;
    println!("identity over random polynomials: pass = {}, worst = {:.2e}", report.pass, report.estimate);
    println!("∏_(j<4) j! = {}", superfactorial(3));
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
