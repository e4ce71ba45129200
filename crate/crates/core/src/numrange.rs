//! Support-function sweep of the numerical range `W(A) = {<x, A x> : |x| = 1}`.
//!
//! For an angle `t`, the Hermitian matrix `H(t) = (e^{it} A + e^{-it} A*) / 2`
//! satisfies `Re(e^{it} z) <= lambda_max(H(t))` on `W(A)`, with equality at
//! `z = <x, A x>` for a top eigenvector `x`. Sweeping `t` therefore walks the
//! boundary of `W(A)` clockwise.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Sweep resolution used when the caller has no preference.
pub const DEFAULT_ANGLES: usize = 720;
const MIN_ANGLES: usize = 8;
const REFINE_STEPS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalRangeBoundary {
    /// Boundary points, clockwise.
    pub points: Vec<Complex64>,
    /// Angle `t_k` in `[0, 2 pi)` that produced `points[k]`.
    pub support_angles: Vec<f64>,
}

impl NumericalRangeBoundary {
    /// True when every turn along the closed polygon is clockwise up to `tol`
    /// (repeated points count as straight).
    pub fn is_convex(&self, tol: f64) -> bool {
        let p = &self.points;
        let m = p.len();
        (0..m).all(|k| {
            let e1 = p[(k + 1) % m] - p[k];
            let e2 = p[(k + 2) % m] - p[(k + 1) % m];
            e1.re * e2.im - e1.im * e2.re <= tol
        })
    }
}

/// Boundary point of `W(A)` in direction `t`, together with the support value
/// `lambda_max(H(t))`.
pub fn support_point(a: &ComplexMatrix, angle: f64) -> Result<(Complex64, f64)> {
    let rot = Complex64::from_polar(1.0, angle);
    let h = (&a.scaled(rot) + &a.adjoint().scaled(rot.conj())).scaled_real(0.5);
    let e = eigh(&h)?;
    let x = e.top_vector();
    Ok((a.quadratic_form(&x), e.max()))
}

/// Samples `num_angles` equally spaced support directions.
pub fn numerical_range_boundary(a: &ComplexMatrix, num_angles: usize) -> Result<NumericalRangeBoundary> {
    if num_angles < MIN_ANGLES {
        return Err(Error::invalid(format!(
            "num_angles must be at least {MIN_ANGLES} (got {num_angles})"
        )));
    }
    let mut points = Vec::with_capacity(num_angles);
    let mut support_angles = Vec::with_capacity(num_angles);
    for k in 0..num_angles {
        let t = 2.0 * PI * k as f64 / num_angles as f64;
        points.push(support_point(a, t)?.0);
        support_angles.push(t);
    }
    Ok(NumericalRangeBoundary {
        points,
        support_angles,
    })
}

fn farthest_pair(pa: &[Complex64], pb: &[Complex64]) -> (f64, Complex64) {
    let mut best = (0.0, Complex64::new(1.0, 0.0));
    for x in pa {
        for y in pb {
            let d = x - y;
            let r = d.norm();
            if r > best.0 {
                best = (r, d);
            }
        }
    }
    best
}

/// `s(W(A), W(B))`: the largest distance between a point of `W(A)` and a point
/// of `W(B)`.
///
/// The maximum is taken over the sampled boundary points, then refined by a
/// golden-section search on `t -> |a(t) - b(t + pi)|` around the direction of
/// the best sampled pair. Every candidate is a genuine pair of points of the
/// two ranges, so the result never exceeds the true value beyond eigensolver
/// rounding.
pub fn s_numerical_range(a: &ComplexMatrix, b: &ComplexMatrix, num_angles: usize) -> Result<f64> {
    a.check_same_dim(b)?;
    let ba = numerical_range_boundary(a, num_angles)?;
    let bb = if a == b {
        ba.clone()
    } else {
        numerical_range_boundary(b, num_angles)?
    };
    refine_from_boundaries(a, b, &ba, &bb, num_angles)
}

/// `diam W(A)`, i.e. `s(W(A), W(A))`.
pub fn diam_numerical_range(a: &ComplexMatrix, num_angles: usize) -> Result<f64> {
    s_numerical_range(a, a, num_angles)
}

fn refine_from_boundaries(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    ba: &NumericalRangeBoundary,
    bb: &NumericalRangeBoundary,
    num_angles: usize,
) -> Result<f64> {
    let (mut best, dir) = farthest_pair(&ba.points, &bb.points);
    if best == 0.0 {
        return Ok(0.0);
    }
    // the pair (a, b) is extremal in direction conj(e^{it}) for t = -arg(a - b)
    let center = -dir.arg();
    let gap = |t: f64| -> Result<f64> {
        let (pa, _) = support_point(a, t)?;
        let (pb, _) = support_point(b, t + PI)?;
        Ok((pa - pb).norm())
    };
    let step = 2.0 * PI / num_angles as f64;
    let (mut lo, mut hi) = (center - step, center + step);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = gap(x1)?;
    let mut f2 = gap(x2)?;
    best = best.max(f1).max(f2).max(gap(center)?);
    for _ in 0..REFINE_STEPS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = gap(x2)?;
            best = best.max(f2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = gap(x1)?;
            best = best.max(f1);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{example_matrix, ONE, ZERO};

    #[test]
    fn scalar_matrix_collapses_to_a_point() {
        let c = Complex64::new(1.5, -2.0);
        let b = numerical_range_boundary(&ComplexMatrix::scalar(3, c), 16).unwrap();
        for p in &b.points {
            assert!((p - c).norm() < 1e-14);
        }
        let s = s_numerical_range(&ComplexMatrix::zeros(3), &ComplexMatrix::scalar(3, c), 16).unwrap();
        assert!((s - c.norm()).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_range_is_half_disc() {
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let b = numerical_range_boundary(&a, 64).unwrap();
        for (p, t) in b.points.iter().zip(&b.support_angles) {
            assert!((p.norm() - 0.5).abs() < 1e-12);
            let (_, support) = support_point(&a, *t).unwrap();
            assert!((support - 0.5).abs() < 1e-12);
        }
        assert!(b.is_convex(1e-12));
        let d = diam_numerical_range(&a, 64).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn normal_matrix_range_is_eigen_hull() {
        let a3 = example_matrix();
        let d = diam_numerical_range(&a3, DEFAULT_ANGLES).unwrap();
        assert!((d - 4.561552812808830).abs() < 1e-9);
        let s = s_numerical_range(&a3, &a3.diagonal_part(), DEFAULT_ANGLES).unwrap();
        assert!((s - 3.561552812808830).abs() < 1e-9);
    }

    #[test]
    fn too_few_angles() {
        assert!(numerical_range_boundary(&ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, ONE]]), 4).is_err());
    }
}
