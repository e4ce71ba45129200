//! Complex Schur form by Householder reduction to Hessenberg form followed by
//! single-shift QR iteration with Givens rotations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::tol;

/// Largest dimension the dense QR path accepts.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct SchurForm {
    /// Upper triangular `T` with `A = Q T Q*`.
    pub t: ComplexMatrix,
    pub q: ComplexMatrix,
    /// `||A Q - Q T||_F`.
    pub residual: f64,
    pub iterations: usize,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal()
    }
}

/// Unitary reduction `A = Q H Q*` with `H` upper Hessenberg.
pub fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.n();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);

    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2 v v*) H
        for j in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(l, vl)| vl.conj() * h[(k + 1 + l, j)]).sum();
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= vl * s * 2.0;
            }
        }
        // H <- H (I - 2 v v*), Q <- Q (I - 2 v v*)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: Complex64 = v.iter().enumerate().map(|(l, vl)| m[(i, k + 1 + l)] * vl).sum();
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= s * vl.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// `(c, s)` with `c` real such that `[[c, s], [-conj(s), c]] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (m1, m2) = (mid + disc, mid - disc);
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Complex Schur decomposition for `n <= 64`.
///
/// Fails with [`Error::NoConvergence`] if more than `100 n` QR steps pass
/// without a deflation.
pub fn schur(a: &ComplexMatrix) -> Result<SchurForm> {
    let n = a.n();
    if n > MAX_DIM {
        return Err(Error::TooLarge { n, max: MAX_DIM });
    }
    let (mut h, mut q) = hessenberg(a);
    let hnorm = h.frobenius_norm();
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut iterations = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        since_deflation += 1;
        iterations += 1;
        if since_deflation > 100 * n {
            return Err(Error::NoConvergence {
                solver: "hessenberg qr",
                iterations,
            });
        }

        let mu = if since_deflation.is_multiple_of(10) {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            for i in 0..=hi {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let (x, y) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }

    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    let residual = (&(a * &q) - &(&q * &h)).frobenius_norm();
    let limit = tol::EIG * a.scale();
    if residual > limit {
        return Err(Error::Certificate {
            solver: "hessenberg qr",
            residual,
            limit,
        });
    }
    Ok(SchurForm {
        t: h,
        q,
        residual,
        iterations,
    })
}
