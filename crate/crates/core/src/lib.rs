//! Certified lower bounds for eigenvalue distances, perturbations and spreads
//! of dense complex matrices, built from positive unital linear maps.
//!
//! The crate pairs every cheap bound with an exact reference quantity computed
//! by an in-crate eigen oracle (complex Jacobi for Hermitian input,
//! Hessenberg + shifted QR otherwise), so each inequality can be checked
//! numerically rather than trusted.
//!
//! Module map:
//! - [`matrix`], [`market`], [`classify`]: the dense matrix type, Matrix Market
//!   I/O and structural classification.
//! - [`eigen`], [`numrange`]: spectra, orderings, spectral norm, spread and the
//!   numerical range boundary.
//! - [`pulm`]: positive unital linear functionals and maps, with their
//!   canonical `tr(W A)` form and numeric validation.
//! - [`bounds`]: one estimator per inequality, each returning a [`BoundResult`].
//! - [`ensemble`], [`harness`]: seeded random ensembles, reports, the
//!   soundness sweep and the worked example.

pub mod bounds;
pub mod classify;
pub mod eigen;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod market;
pub mod matrix;
pub mod numrange;
pub mod pulm;

pub use bounds::{BoundResult, Direction};
pub use classify::{classify, MatrixClass, SpectralInterval};
pub use eigen::{OrderMode, Spectrum};
pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use pulm::{FunctionalKind, MapKind, PulFunctional, PulMap};

/// Version string embedded in every JSON document.
pub const TOOL_VERSION: &str = concat!("spectral-bounds/", env!("CARGO_PKG_VERSION"));

/// Default tolerances.
pub mod tol {
    /// Structural classification, relative to `max(1, ||A||_F)`.
    pub const CLASS: f64 = 1e-10;
    /// Eigen residual certificates, relative to `max(1, ||A||_F)`.
    pub const EIG: f64 = 1e-10;
    /// Allowed negative slack of a bound, relative to `max(1, |exact|)`.
    pub const VERIFY: f64 = 1e-8;
    /// Distance to a convex hull treated as membership.
    pub const HULL: f64 = 1e-9;
    /// Environment variable overriding [`VERIFY`].
    pub const VERIFY_ENV: &str = "SPECTRAL_BOUNDS_TOL";

    /// [`VERIFY`] unless overridden by a positive finite value in
    /// `SPECTRAL_BOUNDS_TOL`.
    pub fn verify_from_env() -> f64 {
        std::env::var(VERIFY_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(VERIFY)
    }
}
