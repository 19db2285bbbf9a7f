//! JSON curve specifications.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Curve, Exponential, ExpFlat, FlattenVariant, HomogeneousCurve, Monomial, Oracle, Polynomial, SimpleCurve};
use crate::conditions::build_flattened;
use crate::error::{validation, LabError, Result};

pub const DEFAULT_DIMENSION: usize = 3;
pub const DEFAULT_DOMAIN: [f64; 2] = [0.0, 1.0];

/// `{"kind": ..., <family fields>, "d": n, "domain": [a, b]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub kind: CurveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    /// Accept d > 5.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_high_dimension: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveKind {
    Monomial {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeff: Option<f64>,
    },
    ExpFlat {
        beta: f64,
    },
    Flatten {
        base: Box<CurveSpec>,
        steps: usize,
        variant: FlattenVariant,
    },
    PolyPhi {
        coeffs: Vec<f64>,
    },
    Exponential {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Homogeneous {
        exponents: Vec<f64>,
    },
}

/// A built curve of either family.
#[derive(Debug, Clone)]
pub enum AnyCurve {
    Simple(SimpleCurve),
    Homogeneous(HomogeneousCurve),
}

impl AnyCurve {
    pub fn as_simple(&self) -> Result<&SimpleCurve> {
        match self {
            AnyCurve::Simple(c) => Ok(c),
            AnyCurve::Homogeneous(_) => Err(LabError::Unsupported("operation needs a simple curve".into())),
        }
    }

    pub fn as_homogeneous(&self) -> Result<&HomogeneousCurve> {
        match self {
            AnyCurve::Homogeneous(c) => Ok(c),
            AnyCurve::Simple(_) => Err(LabError::Unsupported("operation needs a homogeneous curve".into())),
        }
    }

    pub fn as_dyn(&self) -> &dyn Curve {
        match self {
            AnyCurve::Simple(c) => c,
            AnyCurve::Homogeneous(c) => c,
        }
    }
}

impl CurveSpec {
    pub fn new(kind: CurveKind) -> Self {
        CurveSpec { kind, d: None, domain: None, allow_high_dimension: false }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = Some([a, b]);
        self
    }

    pub fn build(&self) -> Result<AnyCurve> {
        self.build_inheriting(None, None)
    }

    /// Builds a simple curve, rejecting homogeneous specs.
    pub fn build_simple(&self) -> Result<SimpleCurve> {
        match self.build()? {
            AnyCurve::Simple(c) => Ok(c),
            AnyCurve::Homogeneous(_) => validation("expected a simple curve, got a homogeneous one"),
        }
    }

    fn build_inheriting(&self, d: Option<usize>, domain: Option<[f64; 2]>) -> Result<AnyCurve> {
        let d = self.d.or(d).unwrap_or(DEFAULT_DIMENSION);
        let [a, b] = self.domain.or(domain).unwrap_or(DEFAULT_DOMAIN);
        let options = super::CurveOptions { allow_high_dimension: self.allow_high_dimension, ..Default::default() };
        let simple = |phi: Oracle| SimpleCurve::with_options(d, phi, (a, b), options).map(AnyCurve::Simple);
        match &self.kind {
            CurveKind::Monomial { beta, coeff } => simple(Arc::new(Monomial::scaled(coeff.unwrap_or(1.0), *beta))),
            CurveKind::ExpFlat { beta } => {
                if *beta <= 0.0 {
                    return validation("exp-flat beta must be positive");
                }
                simple(Arc::new(ExpFlat::new(*beta)))
            }
            CurveKind::PolyPhi { coeffs } => simple(Arc::new(Polynomial::new(coeffs.clone()))),
            CurveKind::Exponential { rate, scale } => {
                simple(Arc::new(Exponential { scale: scale.unwrap_or(1.0), rate: *rate }))
            }
            CurveKind::Flatten { base, steps, variant } => {
                let mut curve = match base.build_inheriting(Some(d), Some([a, b]))? {
                    AnyCurve::Simple(c) => c,
                    AnyCurve::Homogeneous(_) => return validation("cannot flatten a homogeneous curve"),
                };
                for _ in 0..*steps {
                    curve = build_flattened(&curve, *variant)?;
                }
                Ok(AnyCurve::Simple(curve))
            }
            CurveKind::Homogeneous { exponents } => {
                HomogeneousCurve::new(exponents.clone(), (a, b)).map(AnyCurve::Homogeneous)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_build_monomial() {
        let spec: CurveSpec = serde_json::from_str(r#"{"kind":"monomial","beta":4,"d":3,"domain":[0,0.5]}"#).unwrap();
        let c = spec.build_simple().unwrap();
        assert_eq!(c.bounds(), (0.0, 0.5));
        assert_eq!(c.phi_derivative(0.25, 3).unwrap(), 6.0);
    }

    #[test]
    fn flatten_inherits_dimension() {
        let spec: CurveSpec = serde_json::from_str(
            r#"{"kind":"flatten","steps":1,"variant":"exp","base":{"kind":"monomial","beta":4},"d":3}"#,
        )
        .unwrap();
        let c = spec.build_simple().unwrap();
        assert_eq!(c.dimension(), 3);
        let t: f64 = 0.5;
        let want = 2.0 * (-1.0 / (24.0 * t)).exp();
        assert!((c.phi_derivative(t, 3).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_spec() {
        let spec: CurveSpec = serde_json::from_str(r#"{"kind":"homogeneous","exponents":[1,2,3]}"#).unwrap();
        let c = spec.build().unwrap();
        assert_eq!(c.as_homogeneous().unwrap().homogeneous_dimension(), 6.0);
        assert!(spec.build_simple().is_err());
    }

    #[test]
    fn round_trip() {
        let spec = CurveSpec::new(CurveKind::ExpFlat { beta: 1.0 }).with_d(2).with_domain(0.1, 1.0);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<CurveSpec>(&s).unwrap(), spec);
    }
}
