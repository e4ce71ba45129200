//! Bounds on distances between the spectra or numerical ranges of `A` and `B`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BoundResult, Pair};
use crate::eigen::{ordered_spectrum_distance, spectral_norm_hermitian, OrderMode};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pulm::{PulFunctional, PulMap};

/// Grid size of the phase search in [`theta_pair`].
pub const THETA_GRID: usize = 1024;
const GOLDEN_STEPS: usize = 80;
const REFINED_PEAKS: usize = 4;

fn opposed(pair: &Pair<'_>) -> Result<f64> {
    ordered_spectrum_distance(pair.spectrum_a()?, pair.spectrum_b()?, OrderMode::Opposed)
}

fn hermitian_difference_norm(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    spectral_norm_hermitian(&(x - y))
}

fn check_indices(pair: &Pair<'_>, i: usize, j: usize) -> Result<()> {
    let n = pair.n();
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::invalid(format!("indices ({i}, {j}) out of range 1..={n}")));
    }
    if i == j {
        return Err(Error::invalid(format!("indices must differ (got {i}, {j})")));
    }
    Ok(())
}

fn check_functional(pair: &Pair<'_>, phi: &PulFunctional) -> Result<()> {
    if phi.n != pair.n() {
        return Err(Error::Dimension {
            expected: pair.n(),
            found: phi.n,
        });
    }
    Ok(())
}

/// `||A - B|| <= ||Eig_down(A) - Eig_up(B)||` for Hermitian `A`, `B`.
pub fn weyl_lower(pair: &Pair<'_>) -> Result<BoundResult> {
    pair.require_hermitian()?;
    let norm = hermitian_difference_norm(pair.a(), pair.b())?;
    pair.result("weyl_lower", String::new(), norm, opposed(pair)?)
}

/// `||Eig_down(A) - Eig_down(B)|| <= ||A - B||` for Hermitian `A`, `B`.
pub fn weyl_upper(pair: &Pair<'_>) -> Result<BoundResult> {
    pair.require_hermitian()?;
    let norm = hermitian_difference_norm(pair.a(), pair.b())?;
    let same = ordered_spectrum_distance(pair.spectrum_a()?, pair.spectrum_b()?, OrderMode::Same)?;
    pair.result("weyl_upper", String::new(), norm, same)
}

/// `|phi1(A) - phi2(B)|` against `s(W(A), W(B))`.
pub fn functional_gap(pair: &Pair<'_>, phi1: &PulFunctional, phi2: &PulFunctional) -> Result<BoundResult> {
    check_functional(pair, phi1)?;
    check_functional(pair, phi2)?;
    let bound = (phi1.apply(pair.a())? - phi2.apply(pair.b())?).norm();
    pair.result(
        "functional_gap",
        format!("{phi1}; {phi2}"),
        bound,
        pair.range_gap()?,
    )
}

/// `max_ij |a_ii - b_jj|` against `s(W(A), W(B))`.
pub fn diag_pair(pair: &Pair<'_>) -> Result<BoundResult> {
    let da = pair.a().diagonal();
    let db = pair.b().diagonal();
    let bound = da
        .iter()
        .flat_map(|x| db.iter().map(move |y| (x - y).norm()))
        .fold(0.0, f64::max);
    pair.result("diag_pair", String::new(), bound, pair.range_gap()?)
}

/// `||Phi1(A) - Phi2(B)||` against the opposed ordered eigenvalue distance,
/// for Hermitian `A`, `B` and maps with equal output size.
pub fn map_gap(pair: &Pair<'_>, phi1: &PulMap, phi2: &PulMap) -> Result<BoundResult> {
    if phi1.n_in() != pair.n() || phi2.n_in() != pair.n() {
        return Err(Error::Dimension {
            expected: pair.n(),
            found: if phi1.n_in() != pair.n() {
                phi1.n_in()
            } else {
                phi2.n_in()
            },
        });
    }
    if phi1.n_out() != phi2.n_out() {
        return Err(Error::invalid(format!(
            "map outputs differ in size ({} vs {})",
            phi1.n_out(),
            phi2.n_out()
        )));
    }
    pair.require_hermitian()?;
    let bound = hermitian_difference_norm(&phi1.apply(pair.a())?, &phi2.apply(pair.b())?)?;
    pair.result("map_gap", format!("{phi1}; {phi2}"), bound, opposed(pair)?)
}

/// `||A - B + n(B - tr(A)/n I)|| / (n - 1)` against the opposed ordered
/// eigenvalue distance.
///
/// Equal to `||(tr(A) I - A)/(n-1) - B||`; the `weyl_norm` extra holds
/// `||A - B||` for comparison.
pub fn trace_complement_gap(pair: &Pair<'_>) -> Result<BoundResult> {
    pair.require_n(2)?;
    pair.require_hermitian()?;
    let n = pair.n() as f64;
    let (a, b) = (pair.a(), pair.b());
    let centered_b = b.shifted(-a.trace() / n);
    let inner = &(a - b) + &centered_b.scaled_real(n);
    let bound = spectral_norm_hermitian(&inner)? / (n - 1.0);
    let weyl = hermitian_difference_norm(a, b)?;
    Ok(pair
        .result("trace_complement_gap", String::new(), bound, opposed(pair)?)?
        .with("weyl_norm", weyl))
}

/// Closed-form norm of `[[alpha, c], [conj c, beta]]` with
/// `alpha = a_ii - b_jj`, `beta = a_jj - b_ii`, `c = a_ij + b_ij`, against the
/// opposed ordered eigenvalue distance. Indices are 1-based.
pub fn mirsky_pair(pair: &Pair<'_>, i: usize, j: usize) -> Result<BoundResult> {
    check_indices(pair, i, j)?;
    pair.require_hermitian()?;
    let (a, b) = (pair.a(), pair.b());
    let (p, q) = (i - 1, j - 1);
    let alpha = a[(p, p)].re - b[(q, q)].re;
    let beta = a[(q, q)].re - b[(p, p)].re;
    let c = (a[(p, q)] + b[(p, q)]).norm();
    let root = ((alpha - beta).powi(2) + 4.0 * c * c).sqrt();
    let bound = 0.5 * (alpha + beta + root).abs().max((alpha + beta - root).abs());
    pair.result("mirsky_pair", format!("i={i}, j={j}"), bound, opposed(pair)?)
}

/// Index-set family for [`index_sets`]. Sets are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexFamily {
    /// Singletons, pairs and the full set.
    Default,
    /// Every nonempty subset; limited to `n <= 12`.
    PowerSet,
    Sets(Vec<Vec<usize>>),
}

/// Largest size accepted by [`IndexFamily::PowerSet`].
pub const POWER_SET_MAX_N: usize = 12;

impl IndexFamily {
    pub fn sets(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        Ok(match self {
            IndexFamily::Default => {
                let mut out: Vec<Vec<usize>> = (1..=n).map(|i| vec![i]).collect();
                out.extend(super::index_pairs(n).map(|(i, j)| vec![i, j]));
                if n > 2 {
                    out.push((1..=n).collect());
                }
                out
            }
            IndexFamily::PowerSet => {
                if n > POWER_SET_MAX_N {
                    return Err(Error::invalid(format!(
                        "power-set family is limited to n <= {POWER_SET_MAX_N} (got {n})"
                    )));
                }
                (1u32..(1 << n))
                    .map(|mask| (1..=n).filter(|k| mask & (1 << (k - 1)) != 0).collect())
                    .collect()
            }
            IndexFamily::Sets(sets) => {
                if sets.is_empty() {
                    return Err(Error::invalid("index-set family must be nonempty"));
                }
                sets.clone()
            }
        })
    }
}

/// `max_{I,J} |avg_I(A) - avg_J(B)|` against the largest eigenvalue distance,
/// for normal `A`, `B`.
pub fn index_sets(pair: &Pair<'_>, family: &IndexFamily) -> Result<BoundResult> {
    let n = pair.n();
    let sets = family.sets(n)?;
    pair.require_normal()?;
    let mut va = Vec::with_capacity(sets.len());
    let mut vb = Vec::with_capacity(sets.len());
    for s in sets {
        let phi = PulFunctional::index_avg(n, s)?;
        va.push(phi.apply(pair.a())?);
        vb.push(phi.apply(pair.b())?);
    }
    let bound = va
        .iter()
        .flat_map(|x| vb.iter().map(move |y| (x - y).norm()))
        .fold(0.0, f64::max);
    let label = match family {
        IndexFamily::Default => "default",
        IndexFamily::PowerSet => "power_set",
        IndexFamily::Sets(_) => "custom",
    };
    pair.result("index_sets", label.into(), bound, pair.range_gap()?)
}

/// `|mean_all(B) - offdiag_complement(A)|` against the largest eigenvalue
/// distance, for normal `A`, `B`.
pub fn offdiag_sum(pair: &Pair<'_>) -> Result<BoundResult> {
    pair.require_n(2)?;
    pair.require_normal()?;
    let n = pair.n();
    let bound = (PulFunctional::mean_all(n)?.apply(pair.b())?
        - PulFunctional::offdiag_complement(n)?.apply(pair.a())?)
    .norm();
    pair.result("offdiag_sum", String::new(), bound, pair.range_gap()?)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (f1, x1)
    } else {
        (f2, x2)
    }
}

/// Maximizes `f` over a periodic grid of [`THETA_GRID`] angles, then refines
/// the best few local maxima by golden-section search. Returns `(value, angle)`.
fn maximize_periodic(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = 2.0 * PI / THETA_GRID as f64;
    let values: Vec<f64> = (0..THETA_GRID).map(|k| f(k as f64 * step)).collect();
    let mut peaks: Vec<usize> = (0..THETA_GRID)
        .filter(|&k| {
            let prev = values[(k + THETA_GRID - 1) % THETA_GRID];
            let next = values[(k + 1) % THETA_GRID];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    peaks.truncate(REFINED_PEAKS);
    let mut best = (values[peaks[0]], peaks[0] as f64 * step);
    for k in peaks {
        let center = k as f64 * step;
        let (v, t) = golden_max(&f, center - step, center + step);
        if v > best.0 {
            best = (v, t);
        }
    }
    best
}

/// `|theta_pair_{i,j,t}(A) - half_trace_pair_{i,j}(B)|` against the largest
/// eigenvalue distance, for normal `A`, `B`. When `theta` is `None` the angle
/// is optimized; the chosen angle is reported in the `theta` extra.
pub fn theta_pair(pair: &Pair<'_>, i: usize, j: usize, theta: Option<f64>) -> Result<BoundResult> {
    check_indices(pair, i, j)?;
    if let Some(t) = theta {
        if !t.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
    }
    pair.require_normal()?;
    let (a, b) = (pair.a(), pair.b());
    let (p, q) = (i - 1, j - 1);
    let center = (a[(p, p)] - b[(p, p)] + a[(q, q)] - b[(q, q)]) * 0.5;
    let (up, down) = (a[(p, q)] * 0.5, a[(q, p)] * 0.5);
    let f = |t: f64| {
        let e = Complex64::from_polar(1.0, t);
        (center + up * e + down * e.conj()).norm()
    };
    let (bound, angle) = match theta {
        Some(t) => (f(t), t),
        None => maximize_periodic(f),
    };
    Ok(pair
        .result("theta_pair", format!("i={i}, j={j}"), bound, pair.range_gap()?)?
        .with("theta", angle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::example_matrix;

    const SPD: f64 = 4.561552812808830;
    const SPD_VS_DIAG: f64 = 3.561552812808830;

    fn close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    #[test]
    fn functional_gap_examples() {
        let a3 = example_matrix();
        let d = ComplexMatrix::from_real_diagonal(&[2.0, 2.0, 1.0]);
        let same = Pair::single(&a3);
        let d1 = PulFunctional::diag(3, 1).unwrap();
        let d3 = PulFunctional::diag(3, 3).unwrap();
        let r = functional_gap(&same, &d1, &d1).unwrap();
        assert_eq!(r.bound, 0.0);
        close(r.exact, SPD, 1e-12);

        let with_d = Pair::new(&a3, &d).unwrap();
        let r = functional_gap(&with_d, &d3, &d1).unwrap();
        close(r.bound, 1.0, 1e-15);
        close(r.exact, SPD_VS_DIAG, 1e-12);

        let r = functional_gap(&same, &PulFunctional::mean_all(3).unwrap(), &d3).unwrap();
        close(r.bound, 10.0 / 3.0, 1e-14);
    }

    #[test]
    fn diag_pair_examples() {
        let a3 = example_matrix();
        close(diag_pair(&Pair::single(&a3)).unwrap().bound, 1.0, 0.0);
        let i3 = ComplexMatrix::identity(3);
        let r = diag_pair(&Pair::single(&i3)).unwrap();
        assert_eq!((r.bound, r.exact), (0.0, 0.0));
        let d = a3.diagonal_part();
        let r = diag_pair(&Pair::new(&a3, &d).unwrap()).unwrap();
        close(r.bound, 1.0, 0.0);
        close(r.exact, SPD_VS_DIAG, 1e-12);
    }

    #[test]
    fn map_gap_examples() {
        let a3 = example_matrix();
        let same = Pair::single(&a3);
        let tc = PulMap::trace_complement(3).unwrap();
        let id = PulMap::identity(3);
        let r = map_gap(&same, &tc, &id).unwrap();
        close(r.bound, 1.5 * 2.894886146, 1e-8);
        close(r.exact, SPD, 1e-12);

        let s = ComplexMatrix::scalar(3, a3.trace() / 3.0);
        let r = map_gap(&Pair::new(&a3, &s).unwrap(), &id, &id).unwrap();
        close(r.bound, 2.894886146, 1e-8);
        close(r.exact, r.bound, 1e-12);

        assert_eq!(map_gap(&same, &id, &id).unwrap().bound, 0.0);
        let c = PulMap::compression(3, 1, 2).unwrap();
        assert!(map_gap(&same, &id, &c).is_err());
    }

    #[test]
    fn trace_complement_examples() {
        let a3 = example_matrix();
        close(trace_complement_gap(&Pair::single(&a3)).unwrap().bound, 4.342329219, 1e-8);
        let s = ComplexMatrix::scalar(3, a3.trace() / 3.0);
        let r = trace_complement_gap(&Pair::new(&a3, &s).unwrap()).unwrap();
        close(r.bound, 1.447443073, 1e-8);
        close(r.extra["weyl_norm"], 2.894886146, 1e-8);
        let i3 = ComplexMatrix::identity(3);
        let r = trace_complement_gap(&Pair::single(&i3)).unwrap();
        close(r.bound, 0.0, 1e-15);
        assert_eq!(r.exact, 0.0);
        let one = ComplexMatrix::identity(1);
        assert!(matches!(trace_complement_gap(&Pair::single(&one)), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn mirsky_examples() {
        let a3 = example_matrix();
        let p = Pair::single(&a3);
        close(mirsky_pair(&p, 1, 2).unwrap().bound, 4.0, 1e-15);
        close(mirsky_pair(&p, 1, 3).unwrap().bound, 5f64.sqrt(), 1e-15);
        let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let r = mirsky_pair(&Pair::single(&x), 1, 2).unwrap();
        close(r.bound, 2.0, 1e-15);
        close(r.exact, 2.0, 1e-12);
        assert!(mirsky_pair(&p, 2, 2).is_err());
    }

    #[test]
    fn index_set_examples() {
        let a3 = example_matrix();
        let p = Pair::single(&a3);
        let singles = IndexFamily::Sets(vec![vec![1], vec![2], vec![3]]);
        close(index_sets(&p, &singles).unwrap().bound, 1.0, 1e-15);
        let full = IndexFamily::Sets(vec![vec![1, 2, 3]]);
        assert_eq!(index_sets(&p, &full).unwrap().bound, 0.0);
        let mixed = IndexFamily::Sets(vec![vec![1], vec![2], vec![3], vec![1, 2, 3]]);
        close(index_sets(&p, &mixed).unwrap().bound, 10.0 / 3.0, 1e-14);
        assert!(index_sets(&p, &IndexFamily::Sets(vec![vec![]])).is_err());
        assert!(index_sets(&p, &IndexFamily::Sets(vec![])).is_err());
        assert_eq!(IndexFamily::PowerSet.sets(3).unwrap().len(), 7);
        assert_eq!(IndexFamily::Default.sets(4).unwrap().len(), 4 + 6 + 1);
    }

    #[test]
    fn offdiag_sum_examples() {
        let a3 = example_matrix();
        close(offdiag_sum(&Pair::single(&a3)).unwrap().bound, 4.0, 1e-14);
        let d = a3.diagonal_part();
        close(offdiag_sum(&Pair::new(&d, &a3).unwrap()).unwrap().bound, 8.0 / 3.0, 1e-14);
        let i3 = ComplexMatrix::identity(3);
        close(offdiag_sum(&Pair::single(&i3)).unwrap().bound, 0.0, 1e-15);
    }

    #[test]
    fn theta_pair_examples() {
        let a3 = example_matrix();
        let d = a3.diagonal_part();
        let r = theta_pair(&Pair::new(&a3, &d).unwrap(), 1, 2, None).unwrap();
        close(r.bound, 2.0, 1e-12);
        close(r.exact, SPD_VS_DIAG, 1e-12);
        let r = theta_pair(&Pair::single(&a3), 1, 2, Some(0.0)).unwrap();
        close(r.bound, 2.0, 1e-15);
        assert!(theta_pair(&Pair::single(&a3), 1, 1, None).is_err());
    }

    #[test]
    fn theta_search_finds_phase_alignment() {
        let a = ComplexMatrix::from_rows(&[
            [Complex64::new(1.0, 0.0), Complex64::new(0.3, 2.0)],
            [Complex64::new(-1.5, 0.2), Complex64::new(0.0, 1.0)],
        ]);
        let d = a.diagonal_part();
        let pair = Pair::new(&a, &d).unwrap();
        // non-normal inputs are rejected; check the search directly instead
        assert!(theta_pair(&pair, 1, 2, None).is_err());
        let (best, _) = maximize_periodic(|t| {
            let e = Complex64::from_polar(1.0, t);
            (a[(0, 1)] * e + a[(1, 0)] * e.conj()).norm() * 0.5
        });
        close(best, 0.5 * (a[(0, 1)].norm() + a[(1, 0)].norm()), 1e-12);
    }
}
