//! Interval bounds for Hermitian matrices with spectrum in `[m, M]`: variance
//! inequalities under positive unital maps and the determinant ratio bound.

use num_complex::Complex64;

use super::{BoundResult, Pair};
use crate::classify::SpectralInterval;
use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pulm::{MatrixMap, PulFunctional};

fn check_dimension(pair: &Pair<'_>, map: &dyn MatrixMap) -> Result<()> {
    if map.n_in() != pair.n() {
        return Err(Error::Dimension {
            expected: pair.n(),
            found: map.n_in(),
        });
    }
    Ok(())
}

/// `Phi(A)` and `Phi(A^2)`.
struct Moments {
    first: ComplexMatrix,
    second: ComplexMatrix,
}

impl Moments {
    fn new(pair: &Pair<'_>, map: &dyn MatrixMap) -> Result<Self> {
        check_dimension(pair, map)?;
        Ok(Self {
            first: map.map(pair.a())?,
            second: map.map(pair.a_squared())?,
        })
    }

    /// Moments of `A - c I` with `c = tr(A)/n`, returned with `c`. Unitality
    /// makes the variance shift invariant, and centering keeps `Phi(A^2)` and
    /// `Phi(A)^2` from cancelling catastrophically when `A` is far from 0.
    fn centered(pair: &Pair<'_>, map: &dyn MatrixMap) -> Result<(Self, f64)> {
        check_dimension(pair, map)?;
        let c = pair.a().trace().re / pair.n() as f64;
        let shifted = pair.a().shifted(Complex64::new(-c, 0.0));
        let square = &shifted * &shifted;
        Ok((
            Self {
                first: map.map(&shifted)?,
                second: map.map(&square)?,
            },
            c,
        ))
    }

    fn is_scalar(&self) -> bool {
        self.first.n() == 1
    }

    fn scalars(&self) -> (f64, f64) {
        (self.first[(0, 0)].re, self.second[(0, 0)].re)
    }

    /// `Phi(A^2) - Phi(A)^2`
    fn variance(&self) -> ComplexMatrix {
        &self.second - &(&self.first * &self.first)
    }

    /// Rounding error budget of [`Moments::variance`] and its eigenvalues.
    fn variance_noise(&self) -> f64 {
        let k = self.first.n() as f64;
        let f = self.first.frobenius_norm();
        8.0 * (k + 1.0) * f64::EPSILON * (self.second.frobenius_norm() + f * f)
    }

    /// `2 sqrt(v)` with `v` first reduced by the rounding budget, so that a
    /// variance that is zero up to roundoff gives 0 rather than `sqrt(eps)`.
    fn spread_from_variance(&self, v: f64) -> f64 {
        2.0 * (v - self.variance_noise()).max(0.0).sqrt()
    }
}

fn min_eig(x: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(x)?.min())
}

fn max_eig(x: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(x)?.max())
}

fn require_psd(pair: &Pair<'_>) -> Result<()> {
    if pair.class_a().is_psd {
        return Ok(());
    }
    pair.class_a().require_hermitian()?;
    let v = pair.spectrum_a()?.real_values()?;
    Err(Error::NotPositiveSemidefinite { min_eigenvalue: v[0] })
}

/// `Phi(A^2) - Phi(A)^2 <= (M - Phi(A))(Phi(A) - m)` for Hermitian `A`.
///
/// For functionals the bound is the right side and the exact value the left
/// side. For maps the bound is `lambda_min` of the difference and the exact
/// value is 0.
pub fn bhatia_davis_interval(
    pair: &Pair<'_>,
    map: &dyn MatrixMap,
    interval: Option<SpectralInterval>,
) -> Result<BoundResult> {
    let iv = pair.interval(interval)?;
    let (mo, c) = Moments::centered(pair, map)?;
    let (m, big_m) = (iv.m - c, iv.big_m - c);
    let (bound, exact) = if mo.is_scalar() {
        let (p, q) = mo.scalars();
        ((big_m - p) * (p - m), q - p * p)
    } else {
        // (M - P)(P - m) - (Q - P^2) = (M + m) P - m M - Q
        let k = mo.first.n();
        let diff = &(&mo.first.scaled_real(m + big_m) - &ComplexMatrix::identity(k).scaled_real(m * big_m))
            - &mo.second;
        (min_eig(&diff)?, 0.0)
    };
    pair.result("bhatia_davis_interval", map.label(), bound, exact)
}

/// `Phi(A^2) - Phi(A)^2 <= (M - m)^2 / 4` for Hermitian `A`; the exact value
/// is `lambda_max` of the left side.
pub fn bhatia_davis(pair: &Pair<'_>, map: &dyn MatrixMap, interval: Option<SpectralInterval>) -> Result<BoundResult> {
    let iv = pair.interval(interval)?;
    let (mo, _) = Moments::centered(pair, map)?;
    let var = max_eig(&mo.variance())?;
    pair.result("bhatia_davis", map.label(), iv.width().powi(2) / 4.0, var)
}

/// `2 sqrt(lambda_max(Phi(A^2) - Phi(A)^2)) <= M - m` for Hermitian `A`.
pub fn variance_spread(
    pair: &Pair<'_>,
    map: &dyn MatrixMap,
    interval: Option<SpectralInterval>,
) -> Result<BoundResult> {
    let iv = pair.interval(interval)?;
    let (mo, _) = Moments::centered(pair, map)?;
    let var = max_eig(&mo.variance())?;
    Ok(pair
        .result("variance_spread", map.label(), mo.spread_from_variance(var), iv.width())?
        .with("variance", var))
}

/// Margin of the premise `Phi(A^2) >= 2 Phi(A)^2, Phi(A) > 0`: the pair
/// `(lambda_min(Phi(A^2) - 2 Phi(A)^2), lambda_min(Phi(A)))`.
fn premise(mo: &Moments) -> Result<(f64, f64)> {
    let gap = &mo.second - &(&mo.first * &mo.first).scaled_real(2.0);
    Ok((min_eig(&gap)?, min_eig(&mo.first)?))
}

fn premise_failure(pair: &Pair<'_>, name: &'static str, label: String, margin: (f64, f64)) -> BoundResult {
    let reason = format!(
        "premise fails: lambda_min(Phi(A^2) - 2 Phi(A)^2) = {:e}, lambda_min(Phi(A)) = {:e}",
        margin.0, margin.1
    );
    pair.inapplicable(name, label, reason)
        .with("premise_gap", margin.0)
        .with("premise_first", margin.1)
}

/// `Phi(A^2) <= (M - m) Phi(A)` for psd `A`, whenever `Phi(A^2) >= 2 Phi(A)^2`
/// and `Phi(A) > 0`. When the premise fails the result is inapplicable.
///
/// Functionals report the two sides as bound and exact; maps report
/// `lambda_min((M - m) Phi(A) - Phi(A^2))` against 0.
pub fn variance_ratio(
    pair: &Pair<'_>,
    map: &dyn MatrixMap,
    interval: Option<SpectralInterval>,
) -> Result<BoundResult> {
    require_psd(pair)?;
    let iv = pair.interval(interval)?;
    let mo = Moments::new(pair, map)?;
    let margin = premise(&mo)?;
    if !(margin.0 >= 0.0 && margin.1 > 0.0) {
        return Ok(premise_failure(pair, "variance_ratio", map.label(), margin));
    }
    let (bound, exact) = if mo.is_scalar() {
        let (p, q) = mo.scalars();
        (iv.width() * p, q)
    } else {
        (min_eig(&(&mo.first.scaled_real(iv.width()) - &mo.second))?, 0.0)
    };
    pair.result("variance_ratio", map.label(), bound, exact)
}

/// `phi(A^2) / phi(A) <= M - m` for psd `A`, whenever `phi(A^2) >= 2 phi(A)^2`
/// and `phi(A) > 0`.
///
/// Extras: `baseline = 2 sqrt(phi(A^2) - phi(A)^2)`, `variance`,
/// `refined_variance = (phi(A^2) / (2 phi(A)))^2` and
/// `half_width_sq = (M - m)^2 / 4`, which satisfy
/// `variance <= refined_variance <= half_width_sq` and `baseline <= bound`.
pub fn variance_refined(
    pair: &Pair<'_>,
    phi: &PulFunctional,
    interval: Option<SpectralInterval>,
) -> Result<BoundResult> {
    require_psd(pair)?;
    let iv = pair.interval(interval)?;
    let mo = Moments::new(pair, phi)?;
    let margin = premise(&mo)?;
    let label = phi.to_string();
    if !(margin.0 >= 0.0 && margin.1 > 0.0) {
        return Ok(premise_failure(pair, "variance_refined", label, margin));
    }
    let (p, q) = mo.scalars();
    let variance = q - p * p;
    let refined = q / p;
    Ok(pair
        .result("variance_refined", label, refined, iv.width())?
        .with("baseline", 2.0 * variance.max(0.0).sqrt())
        .with("variance", variance)
        .with("refined_variance", (refined / 2.0).powi(2))
        .with("half_width_sq", iv.width().powi(2) / 4.0))
}

/// Determinant ratio bounds for positive definite `A` with spectrum in
/// `[m, M]`, `m > 0`:
///
/// `(m/M)^((n-1)/n) I <= det(A)^(-1/n) Phi(A) <= (M/m)^((n-1)/n) I`.
///
/// Returns the lower relation, the upper relation, and the condition number
/// bound obtained by solving the upper relation for `M/m`, namely
/// `max(1, (det(A)^(-1/n) lambda_max(Phi(A)))^(n/(n-1)))` against the oracle
/// ratio `lambda_max(A) / lambda_min(A)`.
pub fn det_ratio(
    pair: &Pair<'_>,
    map: &dyn MatrixMap,
    interval: Option<SpectralInterval>,
) -> Result<[BoundResult; 3]> {
    pair.require_n(2)?;
    let iv = pair.interval(interval)?;
    let values = pair.spectrum_a()?.real_values()?;
    if !pair.class_a().is_pd {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: values[0],
        });
    }
    if iv.m <= 0.0 {
        return Err(Error::invalid(format!("interval lower end must be positive (got {})", iv.m)));
    }
    check_dimension(pair, map)?;
    let n = pair.n() as f64;
    let log_det: f64 = values.iter().map(|v| v.ln()).sum();
    let scale = (-log_det / n).exp();
    let image = eigh(&map.map(pair.a())?)?;
    let (lo, hi) = (scale * image.min(), scale * image.max());
    let power = (n - 1.0) / n;
    let ratio = iv.big_m / iv.m;
    let label = map.label();
    let raw = hi.powf(1.0 / power);
    let condition = values[values.len() - 1] / values[0];
    Ok([
        pair.result("det_ratio_lower", label.clone(), ratio.recip().powf(power), lo)?,
        pair.result("det_ratio_upper", label.clone(), ratio.powf(power), hi)?,
        pair.result("condition_lower", label, raw.max(1.0), condition)?
            .with("raw", raw),
    ])
}
