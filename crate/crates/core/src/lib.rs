//! Monte Carlo estimation of sliced-Wasserstein distances with spherical-harmonics
//! control variates, classical baselines and a benchmark harness.
//!
//! The integrand `theta -> W_p^p(theta#mu, theta#nu)` is evaluated exactly in one
//! dimension ([`wasserstein1d::Integrand`]). Estimators in [`estimators`] combine
//! integrand values at a [`sphere::DirectionSet`] with a [`harmonics::HarmonicBasis`].

pub mod bench;
pub mod error;
pub mod estimators;
pub mod gaussian_exact;
pub mod harmonics;
pub mod kernel;
pub mod measures;
pub mod numeric;
pub mod sphere;
pub mod wasserstein1d;

pub use error::{Error, Result};
pub use estimators::{EstimatorReport, Method};
pub use harmonics::{build_basis, HarmonicBasis};
pub use measures::{DiscreteMeasure, GaussianMeasure, Measure};
pub use sphere::{DirectionSet, SequenceKind};
pub use wasserstein1d::Integrand;
