//! Structural classification that decides which bounds apply to a matrix.

use serde::{Deserialize, Serialize};

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Tolerance-certified structure flags.
///
/// `is_pd => is_psd => is_hermitian => is_normal` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixClass {
    pub is_hermitian: bool,
    pub is_normal: bool,
    pub is_psd: bool,
    pub is_pd: bool,
    /// `||A - A*||_F`
    pub hermiticity_defect: f64,
    /// `||A A* - A* A||_F`
    pub normality_defect: f64,
}

/// Classifies `a`.
///
/// Hermiticity is accepted when the defect is at most `tol * max(1, ||A||_F)`,
/// normality when the defect is at most `tol * max(1, ||A||_F)^2` (the
/// commutator is quadratic in `A`). Semidefiniteness compares the smallest
/// Jacobi eigenvalue of the Hermitian part against `-tol * ||A||_F`, and
/// definiteness requires it to exceed `tol * ||A||_F`.
pub fn classify(a: &ComplexMatrix, tol: f64) -> MatrixClass {
    let scale = a.scale();
    let hermiticity_defect = a.hermiticity_defect();
    let normality_defect = a.normality_defect();
    let is_hermitian = hermiticity_defect <= tol * scale;
    let is_normal = is_hermitian || normality_defect <= tol * scale * scale;

    let (mut is_psd, mut is_pd) = (false, false);
    if is_hermitian {
        // a Jacobi failure here leaves both flags false
        if let Ok(e) = eigh(a) {
            let fro = a.frobenius_norm();
            is_psd = e.min() >= -tol * fro;
            is_pd = e.min() > tol * fro;
        }
    }
    MatrixClass {
        is_hermitian,
        is_normal,
        is_psd,
        is_pd,
        hermiticity_defect,
        normality_defect,
    }
}

/// Classification with [`crate::tol::CLASS`].
pub fn classify_default(a: &ComplexMatrix) -> MatrixClass {
    classify(a, crate::tol::CLASS)
}

impl MatrixClass {
    pub fn require_hermitian(&self) -> Result<()> {
        if self.is_hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                defect: self.hermiticity_defect,
            })
        }
    }

    pub fn require_normal(&self) -> Result<()> {
        if self.is_normal {
            Ok(())
        } else {
            Err(Error::NotNormal {
                defect: self.normality_defect,
            })
        }
    }
}

/// Interval `[m, M]` assumed to contain a real spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralInterval {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl SpectralInterval {
    pub fn new(m: f64, big_m: f64) -> Result<Self> {
        if !(m.is_finite() && big_m.is_finite()) || m > big_m {
            return Err(Error::invalid(format!("invalid spectral interval [{m}, {big_m}]")));
        }
        Ok(Self { m, big_m })
    }

    pub fn width(&self) -> f64 {
        self.big_m - self.m
    }

    /// Checks that `[lo, hi]` lies inside the interval up to `slack`.
    pub fn check_contains(&self, lo: f64, hi: f64, slack: f64) -> Result<()> {
        if lo < self.m - slack || hi > self.big_m + slack {
            return Err(Error::Interval {
                m: self.m,
                big_m: self.big_m,
                lo,
                hi,
            });
        }
        Ok(())
    }
}
