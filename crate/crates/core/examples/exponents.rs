//! Exponent bookkeeping: p_d, restriction Q, interpolation exponents, δ(α).

use restriction_lab::conditions::{check_exponent_identities, exponent_calculator, p_d, ExponentInput};

pub fn run_example() -> restriction_lab::Result<()> {
    for d in 2..=5 {
        println!("p_{d} = {:.6}", p_d(d));
    }
    let input: ExponentInput = serde_json::from_str(r#"{ "d": 3, "P": 1.125, "p": 1.1, "alpha": 0.125, "s": 2, "D": 7.5 }"#)?;
    let record = exponent_calculator(&input)?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    let r = check_exponent_identities(3, 100)?;
    println!("largest identity residual: {:.2e}", r.estimate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
