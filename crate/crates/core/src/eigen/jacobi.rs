//! Cyclic complex Jacobi rotations for Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unit eigenvectors, column `k` belongs to `values[k]`.
    pub vectors: ComplexMatrix,
    /// `max_k ||A v_k - lambda_k v_k||_2`.
    pub max_residual: f64,
    pub sweeps: usize,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("n >= 1")
    }

    /// Eigenvector for the largest eigenvalue.
    pub fn top_vector(&self) -> Vec<Complex64> {
        self.vectors.column(self.values.len() - 1)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Hermitian eigen-decomposition by cyclic Jacobi sweeps.
///
/// The input must be Hermitian to within `tol::CLASS * max(1, ||A||_F)`; the
/// Hermitian part is what gets diagonalized. Rotations run in row-cyclic order
/// `(0,1), (0,2), ..., (n-2,n-1)` until the off-diagonal Frobenius mass drops
/// below `1e-14 * ||A||_F`.
pub fn eigh(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let defect = a.hermiticity_defect();
    if defect > tol::CLASS * a.scale() {
        return Err(Error::NotHermitian { defect });
    }
    let h = a.hermitian_part();
    let n = h.n();
    let norm = h.frobenius_norm();
    let mut w = h.clone();
    let mut v = ComplexMatrix::identity(n);

    let mut sweeps = 0;
    loop {
        if off_diagonal_norm(&w) <= OFF_DIAGONAL_TOL * norm {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                solver: "hermitian jacobi",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| w[(x, x)].re.total_cmp(&w[(y, y)].re));
    let values: Vec<f64> = order.iter().map(|&k| w[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);

    let mut max_residual: f64 = 0.0;
    for (k, &lambda) in values.iter().enumerate() {
        let x = vectors.column(k);
        let hx = h.matvec(&x);
        let r = hx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(r);
    }
    let limit = tol::EIG * h.scale();
    if max_residual > limit {
        return Err(Error::Certificate {
            solver: "hermitian jacobi",
            residual: max_residual,
            limit,
        });
    }

    Ok(HermitianEigen {
        values,
        vectors,
        max_residual,
        sweeps,
    })
}

/// Annihilates `w[p][q]` with `w <- G* w G`, `v <- v G`.
///
/// `G = diag(1, e^{-i phi}) R` where `e^{i phi}` is the phase of `w[p][q]` and
/// `R` is the real symmetric Jacobi rotation for the phase-stripped block.
fn rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = w.n();
    for k in 0..n {
        let (x, y) = (w[(k, p)], w[(k, q)]);
        w[(k, p)] = x * gpp + y * gqp;
        w[(k, q)] = x * gpq + y * gqq;
    }
    for k in 0..n {
        let (x, y) = (w[(p, k)], w[(q, k)]);
        w[(p, k)] = gpp.conj() * x + gqp.conj() * y;
        w[(q, k)] = gpq.conj() * x + gqq.conj() * y;
    }
    w[(p, q)] = Complex64::new(0.0, 0.0);
    w[(q, p)] = Complex64::new(0.0, 0.0);
    w[(p, p)] = Complex64::new(app - t * r, 0.0);
    w[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * gpp + y * gqp;
        v[(k, q)] = x * gpq + y * gqq;
    }
}
