//! Lower bounds on the spread of a normal matrix, and on the distance between
//! its spectrum and its diagonal.

use num_complex::Complex64;

use super::{BoundResult, Pair};
use crate::eigen::{max_pairwise_eig_distance, spectral_norm, spread, Spectrum};
use crate::error::{Error, Result};
use crate::pulm::PulFunctional;

fn diagonal_spectrum(pair: &Pair<'_>) -> Spectrum {
    Spectrum::from_complex(&pair.a().diagonal(), 0.0)
}

fn spread_a(pair: &Pair<'_>) -> Result<f64> {
    Ok(spread(pair.spectrum_a()?))
}

fn single_normal(pair: &Pair<'_>) -> Result<()> {
    pair.require_n(2)?;
    pair.class_a().require_normal()
}

/// `max_ij |lambda_i(A) - a_jj|` against `spd(A)`, for normal `A`.
///
/// The `diag_spread` extra holds `max_ij |a_ii - a_jj|`, which in turn is at
/// most the bound.
pub fn diag_hull_spread(pair: &Pair<'_>) -> Result<BoundResult> {
    pair.class_a().require_normal()?;
    let sa = pair.spectrum_a()?;
    let bound = max_pairwise_eig_distance(sa, &diagonal_spectrum(pair));
    let d = pair.a().diagonal();
    let diag_spread = d
        .iter()
        .flat_map(|x| d.iter().map(move |y| (x - y).norm()))
        .fold(0.0, f64::max);
    Ok(pair
        .result("diag_hull_spread", String::new(), bound, spread(sa))?
        .with("diag_spread", diag_spread))
}

/// `max_{i != j} (|a_ij| + |a_ji|) / 2` against `max_ij |lambda_i(A) - a_jj|`,
/// for normal `A`.
pub fn offdiag_modulus(pair: &Pair<'_>) -> Result<BoundResult> {
    single_normal(pair)?;
    let a = pair.a();
    let n = a.n();
    let mut bound: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            bound = bound.max(0.5 * (a[(i, j)].norm() + a[(j, i)].norm()));
        }
    }
    let exact = max_pairwise_eig_distance(pair.spectrum_a()?, &diagonal_spectrum(pair));
    pair.result("offdiag_modulus", String::new(), bound, exact)
}

/// `max_{p != q} |mean_all(A) - (a_pp + a_qq)/2|` against
/// `max_ij |lambda_i(A) - a_jj|`, for normal `A`.
pub fn mean_vs_pairdiag(pair: &Pair<'_>) -> Result<BoundResult> {
    single_normal(pair)?;
    let a = pair.a();
    let n = a.n();
    let mean = a.entry_sum() / n as f64;
    let mut bound: f64 = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            bound = bound.max((mean - (a[(p, p)] + a[(q, q)]) * 0.5).norm());
        }
    }
    let exact = max_pairwise_eig_distance(pair.spectrum_a()?, &diagonal_spectrum(pair));
    pair.result("mean_vs_pairdiag", String::new(), bound, exact)
}

/// `n/(n-1) ||A - tr(A)/n I||` against `spd(A)`, for normal `A`.
pub fn spread_centered_norm(pair: &Pair<'_>) -> Result<BoundResult> {
    single_normal(pair)?;
    let n = pair.n() as f64;
    let bound = n / (n - 1.0) * spectral_norm(&pair.a().centered())?;
    pair.result("spread_centered_norm", String::new(), bound, spread_a(pair)?)
}

/// `n/(n-1) |phi(A) - tr(A)/n|` against `spd(A)`, for normal `A`.
pub fn spread_functional(pair: &Pair<'_>, phi: &PulFunctional) -> Result<BoundResult> {
    if phi.n != pair.n() {
        return Err(Error::Dimension {
            expected: pair.n(),
            found: phi.n,
        });
    }
    single_normal(pair)?;
    let a = pair.a();
    let n = pair.n() as f64;
    let bound = n / (n - 1.0) * (phi.apply(a)? - a.trace() / n).norm();
    pair.result("spread_functional", phi.to_string(), bound, spread_a(pair)?)
}

/// `max_ij |lambda_i - (1/(n-1)) sum_{k != j} lambda_k|`.
fn complement_average_gap(values: &[Complex64]) -> f64 {
    let n = values.len() as f64;
    let total: Complex64 = values.iter().sum();
    let mut best: f64 = 0.0;
    for x in values {
        for y in values {
            best = best.max((x - (total - y) / (n - 1.0)).norm());
        }
    }
    best
}

/// `|sum_{i != j} a_ij| / (n-1)`.
fn offdiag_average(pair: &Pair<'_>) -> f64 {
    pair.a().off_diagonal_sum().norm() / (pair.n() as f64 - 1.0)
}

/// The complement-average eigenvalue gap against `spd(A)`, for normal `A`.
/// The `offdiag_bound` extra holds `|sum_{i != j} a_ij| / (n-1)`, which is in
/// turn at most the bound.
pub fn spread_complement_average(pair: &Pair<'_>) -> Result<BoundResult> {
    single_normal(pair)?;
    let sa = pair.spectrum_a()?;
    let middle = complement_average_gap(sa.values());
    Ok(pair
        .result("spread_complement_average", String::new(), middle, spread(sa))?
        .with("offdiag_bound", offdiag_average(pair)))
}

/// `|sum_{i != j} a_ij| / (n-1)` against the complement-average eigenvalue
/// gap, for normal `A`.
pub fn spread_complement_offdiag(pair: &Pair<'_>) -> Result<BoundResult> {
    single_normal(pair)?;
    let middle = complement_average_gap(pair.spectrum_a()?.values());
    pair.result("spread_complement_offdiag", String::new(), offdiag_average(pair), middle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{example_matrix, ComplexMatrix};

    const SPD: f64 = 4.561552812808830;

    fn close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    #[test]
    fn centered_norm_examples() {
        let a3 = example_matrix();
        let r = spread_centered_norm(&Pair::single(&a3)).unwrap();
        close(r.bound, 4.342329219, 1e-8);
        close(r.exact, SPD, 1e-12);
        let c = ComplexMatrix::scalar(4, Complex64::new(2.0, -1.0));
        let r = spread_centered_norm(&Pair::single(&c)).unwrap();
        assert_eq!((r.bound, r.exact), (0.0, 0.0));
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let r = spread_centered_norm(&Pair::single(&d)).unwrap();
        close(r.bound, 2.0, 1e-14);
        close(r.exact, 2.0, 1e-14);
        let one = ComplexMatrix::identity(1);
        assert!(matches!(spread_centered_norm(&Pair::single(&one)), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn functional_examples() {
        let a3 = example_matrix();
        let p = Pair::single(&a3);
        close(spread_functional(&p, &PulFunctional::mean_all(3).unwrap()).unwrap().bound, 4.0, 1e-14);
        close(spread_functional(&p, &PulFunctional::diag(3, 1).unwrap()).unwrap().bound, 0.5, 1e-14);
        let w = ComplexMatrix::identity(3).scaled_real(1.0 / 3.0);
        let r = spread_functional(&p, &PulFunctional::custom(&w).unwrap()).unwrap();
        close(r.bound, 0.0, 1e-14);
    }

    #[test]
    fn complement_average_examples() {
        let a3 = example_matrix();
        let p = Pair::single(&a3);
        let r = spread_complement_average(&p).unwrap();
        close(r.bound, 4.342329219, 1e-8);
        close(r.extra["offdiag_bound"], 4.0, 1e-14);
        close(r.exact, SPD, 1e-12);
        let r = spread_complement_offdiag(&p).unwrap();
        close(r.bound, 4.0, 1e-14);
        close(r.exact, 4.342329219, 1e-8);

        let c = ComplexMatrix::identity(3).scaled_real(7.0);
        let r = spread_complement_average(&Pair::single(&c)).unwrap();
        close(r.bound, 0.0, 1e-14);
        close(r.extra["offdiag_bound"], 0.0, 0.0);

        let d = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let r = spread_complement_average(&Pair::single(&d)).unwrap();
        close(r.bound, 2.0, 1e-14);
        assert_eq!(r.extra["offdiag_bound"], 0.0);
    }

    #[test]
    fn diagonal_examples() {
        let a3 = example_matrix();
        let p = Pair::single(&a3);
        let r = mean_vs_pairdiag(&p).unwrap();
        close(r.bound, 17.0 / 6.0, 1e-14);
        close(r.exact, 3.561552812808830, 1e-12);
        let r = offdiag_modulus(&p).unwrap();
        close(r.bound, 2.0, 0.0);
        let r = diag_hull_spread(&p).unwrap();
        close(r.bound, 3.561552812808830, 1e-12);
        assert_eq!(r.extra["diag_spread"], 1.0);
        let d = ComplexMatrix::from_real_diagonal(&[0.0, 2.0]);
        assert_eq!(mean_vs_pairdiag(&Pair::single(&d)).unwrap().bound, 0.0);
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(mean_vs_pairdiag(&Pair::single(&i3)).unwrap().bound, 0.0);
    }
}
