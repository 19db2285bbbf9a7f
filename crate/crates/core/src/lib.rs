//! Numerical laboratory for Fourier restriction to curves (t, t²/2!, …,
//! t^{d−1}/(d−1)!, φ(t)) whose torsion may vanish: offspring Jacobians,
//! Ψ-kernels and Vandermonde identities, mean-value and measure conditions,
//! parallelepiped geometry, and an oscillatory extension-operator probe.
//!
//! Every check returns a [`report::CheckReport`]; [`runner`] batches them
//! from a JSON configuration.

pub mod conditions;
pub mod curve;
pub mod error;
pub mod finite_diff;
pub mod linalg;
pub mod measure;
pub mod offspring;
pub mod quadrature;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod spectral;
pub mod vandermonde;

pub use error::{LabError, Result};
pub use report::CheckReport;
