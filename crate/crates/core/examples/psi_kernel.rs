//! The kernel Ψ_d(·; h): values, total mass v(h)/∏ j!, and the sampled
//! lower bound of the upper-half mass ratio.

use restriction_lab::vandermonde::{check_psi_lower_bound, psi_samples, GapVector, PsiKernel, PsiSweep};

pub fn run_example() -> restriction_lab::Result<()> {
    let h = GapVector::new(vec![0.2, 0.5, 0.3])?;
    let k = PsiKernel::new(h.clone())?;
    println!("κ = {:?}, v(h) = {:.6e}", h.kappa(), h.v());
    for i in 0..=10 {
        let u = h.total() * i as f64 / 10.0;
        println!("  Ψ_4({u:.2}) = {:.6e}", k.value(u));
    }
    println!("∫Ψ_4 = {:.6e}, v/(1!2!3!) = {:.6e}", k.integral(0.0, h.total()), h.v() / 12.0);
    println!("upper-half ratio = {:.6}", k.lower_bound_ratio());

    let sweep = PsiSweep { samples: 300, ..PsiSweep::default() };
    for d in 2..=4 {
        let r = check_psi_lower_bound(d, &psi_samples(d, &sweep), sweep.refine_rounds)?;
        println!("d = {d}: sampled infimum {:.6}, pass = {}", r.estimate, r.pass);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
