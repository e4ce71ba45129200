//! Reference spectral quantities: the exact side of every bound.

mod jacobi;
mod schur;

pub use jacobi::{eigh, HermitianEigen};
pub use schur::{hessenberg, schur, SchurForm, MAX_DIM};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

/// How [`Spectrum::values`] is ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumOrdering {
    /// Real spectrum, ascending; ties keep the solver's diagonal order.
    Ascending,
    /// Lexicographic by real part descending, then imaginary part descending.
    RealPartDescending,
}

/// Eigenvalue multiset with a residual certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<Complex64>,
    max_residual: f64,
    ordering: SpectrumOrdering,
    real: bool,
}

impl Spectrum {
    /// A spectrum known to be real (e.g. from a Hermitian source).
    pub fn from_real(values: &[f64], max_residual: f64) -> Self {
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self {
            values: v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            max_residual,
            ordering: SpectrumOrdering::Ascending,
            real: true,
        }
    }

    pub fn from_complex(values: &[Complex64], max_residual: f64) -> Self {
        let mut v = values.to_vec();
        v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        Self {
            values: v,
            max_residual,
            ordering: SpectrumOrdering::RealPartDescending,
            real: false,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn ordering(&self) -> SpectrumOrdering {
        self.ordering
    }

    /// True when the spectrum is certified real.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn real_values(&self) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::ComplexSpectrum);
        }
        Ok(self.values.iter().map(|z| z.re).collect())
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

/// Real spectrum of a Hermitian matrix via Jacobi.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<Spectrum> {
    let e = eigh(a)?;
    Ok(Spectrum::from_real(&e.values, e.max_residual))
}

/// Complex spectrum via Hessenberg reduction and shifted QR (`n <= 64`).
pub fn eig_general(a: &ComplexMatrix) -> Result<Spectrum> {
    let s = schur(a)?;
    Ok(Spectrum::from_complex(&s.eigenvalues(), s.residual))
}

/// Uses the Hermitian solver when `a` is Hermitian and the QR path otherwise.
pub fn certified_spectrum(a: &ComplexMatrix) -> Result<Spectrum> {
    if a.hermiticity_defect() <= tol::CLASS * a.scale() {
        eig_hermitian(a)
    } else {
        eig_general(a)
    }
}

/// Largest singular value, `sqrt(lambda_max(A* A))`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = &a.adjoint() * a;
    let e = eigh(&gram)?;
    Ok(e.max().max(0.0).sqrt())
}

/// `max |lambda_i|` for a Hermitian matrix. Agrees with [`spectral_norm`].
pub fn spectral_norm_hermitian(a: &ComplexMatrix) -> Result<f64> {
    let e = eigh(a)?;
    Ok(e.min().abs().max(e.max().abs()))
}

fn sorted_by(s: &Spectrum, descending: bool) -> Result<Vec<f64>> {
    let mut v = s.real_values()?;
    if descending {
        v.sort_by(|a, b| b.total_cmp(a));
    } else {
        v.sort_by(f64::total_cmp);
    }
    Ok(v)
}

/// Eigenvalues in decreasing order (stable on ties).
pub fn eig_down(s: &Spectrum) -> Result<Vec<f64>> {
    sorted_by(s, true)
}

/// Eigenvalues in increasing order (stable on ties).
pub fn eig_up(s: &Spectrum) -> Result<Vec<f64>> {
    sorted_by(s, false)
}

/// Pairing used by [`ordered_eig_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderMode {
    /// Decreasing against decreasing.
    Same,
    /// Decreasing against increasing.
    Opposed,
}

fn hermitian_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(Spectrum, Spectrum)> {
    a.check_same_dim(b)?;
    Ok((eig_hermitian(a)?, eig_hermitian(b)?))
}

/// Ordered eigenvalue distance from spectra.
pub fn ordered_spectrum_distance(sa: &Spectrum, sb: &Spectrum, mode: OrderMode) -> Result<f64> {
    if sa.len() != sb.len() {
        return Err(Error::Dimension {
            expected: sa.len(),
            found: sb.len(),
        });
    }
    let da = eig_down(sa)?;
    let db = match mode {
        OrderMode::Same => eig_down(sb)?,
        OrderMode::Opposed => eig_up(sb)?,
    };
    Ok(da.iter().zip(&db).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `max_j |lambda_j^down(A) - lambda_j^down(B)|` (same) or
/// `max_j |lambda_j^down(A) - lambda_j^up(B)|` (opposed), for Hermitian `A`, `B`.
pub fn ordered_eig_distance(a: &ComplexMatrix, b: &ComplexMatrix, mode: OrderMode) -> Result<f64> {
    let (sa, sb) = hermitian_pair(a, b)?;
    ordered_spectrum_distance(&sa, &sb, mode)
}

/// Weyl's sandwich: `(same, opposed)` ordered distances, which bracket `||A - B||`.
pub fn weyl_interval(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(f64, f64)> {
    let (sa, sb) = hermitian_pair(a, b)?;
    Ok((
        ordered_spectrum_distance(&sa, &sb, OrderMode::Same)?,
        ordered_spectrum_distance(&sa, &sb, OrderMode::Opposed)?,
    ))
}

/// `max_{i,j} |lambda_i(A) - lambda_j(B)|` by enumeration.
pub fn max_pairwise_eig_distance(sa: &Spectrum, sb: &Spectrum) -> f64 {
    let mut best: f64 = 0.0;
    for x in sa.values() {
        for y in sb.values() {
            best = best.max((x - y).norm());
        }
    }
    best
}

/// Spread: the largest distance between two eigenvalues.
pub fn spread(s: &Spectrum) -> f64 {
    if s.is_real() {
        let v = s.values();
        return v[v.len() - 1].re - v[0].re;
    }
    max_pairwise_eig_distance(s, s)
}

/// Distance between two eigenvalue multisets under the best one-to-one
/// matching, i.e. `min_perm max_k |x_k - y_perm(k)|`.
///
/// Bottleneck assignment: binary search over the candidate thresholds with a
/// bipartite matching feasibility check.
pub fn matching_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let mut cand: Vec<f64> = x.iter().flat_map(|a| y.iter().map(move |b| (a - b).norm())).collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup();

    let feasible = |t: f64| -> bool {
        let mut match_y: Vec<Option<usize>> = vec![None; n];
        fn augment(
            i: usize,
            t: f64,
            x: &[Complex64],
            y: &[Complex64],
            seen: &mut [bool],
            match_y: &mut [Option<usize>],
        ) -> bool {
            for j in 0..y.len() {
                if !seen[j] && (x[i] - y[j]).norm() <= t {
                    seen[j] = true;
                    if match_y[j].is_none_or(|k| augment(k, t, x, y, seen, match_y)) {
                        match_y[j] = Some(i);
                        return true;
                    }
                }
            }
            false
        }
        (0..n).all(|i| {
            let mut seen = vec![false; n];
            augment(i, t, x, y, &mut seen, &mut match_y)
        })
    };

    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cand[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cand[lo]
}
