//! K(h) geometry and Monte Carlo measures of the dyadic shells S_m.

use restriction_lab::measure::{k_u_geometry, sm_measure, SmSampling};

pub fn run_example() -> restriction_lab::Result<()> {
    let alpha = 1.0 / 6.0;
    let g = k_u_geometry(&[1.0, 2.5], alpha)?;
    println!("h = (1, 2.5): u = {}, K = {}, homogeneity residual {:.1e}", g.u, g.k, g.report.estimate);

    let sampling = SmSampling { samples: 2_000_000, seed: 42, ..SmSampling::default() };
    let r = sm_measure(3, alpha, &[0, 1, 2, 3, 4], &sampling)?;
    for s in &r.series {
        println!("{} ({})", s.name, s.columns.join(", "));
        for row in &s.rows {
            println!("  {row:.6?}");
        }
    }
    println!("predicted ratio 2^(−2/3) = {:.6}; worst deviation {:.4}; pass = {}", 2f64.powf(-2.0 / 3.0), r.estimate, r.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
