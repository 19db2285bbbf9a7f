//! Curves from JSON specs: derivatives, affine arclength weight, monotonicity.

use restriction_lab::curve::{evaluate_curve, validate_monotone, Curve, CurveSpec};

pub fn run_example() -> restriction_lab::Result<()> {
    let specs = [
        r#"{ "kind": "monomial", "beta": 4, "d": 3 }"#,
        // exp(−1/t) itself is not admissible in d = 3: φ''' changes sign.
        r#"{ "kind": "exp-flat", "beta": 1, "d": 3 }"#,
        r#"{ "kind": "flatten", "base": { "kind": "monomial", "beta": 4 }, "steps": 1, "variant": "exp", "d": 3 }"#,
        r#"{ "kind": "poly-phi", "coeffs": [0, 0, 0, 1, 0.5], "d": 3 }"#,
    ];
    for text in specs {
        let spec: CurveSpec = serde_json::from_str(text)?;
        let c = spec.build_simple()?;
        let mono = validate_monotone(&c, 64)?;
        println!("{}", c.phi().label());
        for t in [0.25, 0.5, 1.0] {
            let top = evaluate_curve(&c, t, c.dimension())?;
            println!("  t = {t:<4}  γ(t) = {:.5?}  φ^(d) = {:.5e}  w = {:.5e}", c.point(t)?, top[c.dimension() - 1], c.affine_weight(t)?);
        }
        println!("  monotone derivatives: {}", mono.pass);
    }
    let moment = serde_json::from_str::<CurveSpec>(r#"{ "kind": "homogeneous", "exponents": [1, 2, 3] }"#)?.build()?;
    let h = moment.as_homogeneous()?;
    println!("moment curve: D = {}, γ(0.5) = {:?}", h.homogeneous_dimension(), h.point(0.5)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
