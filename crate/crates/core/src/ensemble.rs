//! Seeded random matrix ensembles.
//!
//! Trial `k` of a run with seed `s` draws from ChaCha20 seeded with `s` on
//! stream `k`, so any trial can be replayed on its own and the result does not
//! depend on how trials are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eigen::MAX_DIM;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Bound on `||U* U - I||_F` for sampled unitaries.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// `(G + G*) / 2`
    HermitianGaussian,
    /// `U diag(z) U*` with Haar `U` and complex Gaussian `z`.
    NormalUnitaryConjugated,
    /// `G* G`
    Psd,
    /// Circulant with complex Gaussian first row.
    Circulant,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 4] = [
        EnsembleKind::HermitianGaussian,
        EnsembleKind::NormalUnitaryConjugated,
        EnsembleKind::Psd,
        EnsembleKind::Circulant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::HermitianGaussian => "hermitian_gaussian",
            EnsembleKind::NormalUnitaryConjugated => "normal_unitary_conjugated",
            EnsembleKind::Psd => "psd",
            EnsembleKind::Circulant => "circulant",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown ensemble '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, trials: usize, seed: u64) -> Result<Self> {
        let spec = Self { kind, n, trials, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooSmall { n: self.n, min: 2 });
        }
        if self.n > MAX_DIM {
            return Err(Error::TooLarge {
                n: self.n,
                max: MAX_DIM,
            });
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        Ok(())
    }

    /// The `(A, B)` pair for one trial: two independent draws from the
    /// trial's stream.
    pub fn trial_pair(&self, trial: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let mut rng = trial_rng(self.seed, trial);
        let a = sample(self.kind, self.n, &mut rng)?;
        let b = sample(self.kind, self.n, &mut rng)?;
        Ok((a, b))
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of independent [`complex_gaussian`] entries, filled row by row.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_row_major(n, data).expect("finite Gaussian entries")
}

/// Haar-distributed unitary: the `Q` factor of a complex Gaussian matrix with
/// the diagonal of `R` made real positive.
///
/// Gram-Schmidt runs twice per column; the result is rejected if
/// `||U* U - I||_F` exceeds [`UNITARITY_TOL`].
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<ComplexMatrix> {
    let g = complex_gaussian_matrix(rng, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let (basis, target) = (&done[k], &mut rest[0]);
                let proj: Complex64 = basis.iter().zip(target.iter()).map(|(b, t)| b.conj() * t).sum();
                for (t, b) in target.iter_mut().zip(basis) {
                    *t -= proj * b;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("rank-deficient Gaussian sample"));
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let u = ComplexMatrix::from_fn(n, |i, j| cols[j][i]);
    let defect = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(n)).frobenius_norm();
    if defect > UNITARITY_TOL {
        return Err(Error::Certificate {
            solver: "haar unitary",
            residual: defect,
            limit: UNITARITY_TOL,
        });
    }
    Ok(u)
}

/// One draw from `kind` in dimension `n`.
pub fn sample<R: Rng + ?Sized>(kind: EnsembleKind, n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    Ok(match kind {
        EnsembleKind::HermitianGaussian => complex_gaussian_matrix(rng, n).hermitian_part(),
        EnsembleKind::NormalUnitaryConjugated => {
            let u = haar_unitary(rng, n)?;
            let z: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
            let ud = ComplexMatrix::from_fn(n, |i, j| u[(i, j)] * z[j]);
            &ud * &u.adjoint()
        }
        EnsembleKind::Psd => {
            let g = complex_gaussian_matrix(rng, n);
            // exact Hermitian symmetry so the classifier never sees rounding skew
            (&g.adjoint() * &g).hermitian_part()
        }
        EnsembleKind::Circulant => {
            let row: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
            ComplexMatrix::circulant(&row)
        }
    })
}

/// The `A` matrix of every trial, in trial order.
pub fn generate_ensemble(spec: &EnsembleSpec) -> Result<Vec<ComplexMatrix>> {
    spec.validate()?;
    (0..spec.trials).map(|t| spec.trial_pair(t).map(|(a, _)| a)).collect()
}

/// A random complex vector of unit length.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let mut x: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        x = vec![ZERO; n];
        x[0] = Complex64::new(1.0, 0.0);
        return x;
    }
    x.iter_mut().for_each(|z| *z /= norm);
    x
}
