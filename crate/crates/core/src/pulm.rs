//! Positive unital linear functionals `M(n) -> C` and maps `M(n) -> M(k)`.
//!
//! Every functional in the catalog has a canonical form `phi(A) = tr(W A)`
//! with `W` positive semidefinite and `tr W = 1`; positivity and unitality of
//! the functional are exactly those two properties of `W`. Maps are checked
//! numerically by [`validate_pulm`].
//!
//! Indices in descriptors are 1-based, matching matrix notation `a_ij`.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::eigh;
use crate::ensemble::{complex_gaussian, complex_gaussian_matrix};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ONE, ZERO};

/// Descriptor of a positive unital linear functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalKind {
    /// `a_ii`
    Diag { i: usize },
    /// `<x, A x>` for a unit vector `x` (entries as `[re, im]`).
    VectorState { x: Vec<Complex64> },
    /// `(1/|I|) sum_{i,j in I} a_ij`
    IndexAvg { set: Vec<usize> },
    /// `(1/n) sum_{i,j} a_ij`
    MeanAll,
    /// `(1/n) (tr A - (1/(n-1)) sum_{i != j} a_ij)`
    OffdiagComplement,
    /// `(1/2) (a_ii + a_jj + a_ij e^{i theta} + a_ji e^{-i theta})`
    ThetaPair { i: usize, j: usize, theta: f64 },
    /// `(1/2) (a_ii + a_jj)`
    HalfTracePair { i: usize, j: usize },
    /// `tr(W A)` for a psd `W` with unit trace, rows of `[re, im]` entries.
    Custom { weight: Vec<Vec<Complex64>> },
}

/// A functional bound to a dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulFunctional {
    pub n: usize,
    #[serde(flatten)]
    pub kind: FunctionalKind,
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::invalid(format!("index {i} out of range 1..={n}")));
    }
    Ok(())
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    check_index(i, n)?;
    check_index(j, n)?;
    if i == j {
        return Err(Error::invalid(format!("pair indices must differ (got {i}, {j})")));
    }
    Ok(())
}

impl PulFunctional {
    /// Validates `kind` against dimension `n`.
    pub fn new(kind: FunctionalKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooSmall { n, min: 1 });
        }
        match &kind {
            FunctionalKind::Diag { i } => check_index(*i, n)?,
            FunctionalKind::VectorState { x } => {
                if x.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        found: x.len(),
                    });
                }
                let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(format!("state vector must have unit norm (got {norm})")));
                }
            }
            FunctionalKind::IndexAvg { set } => {
                if set.is_empty() {
                    return Err(Error::invalid("index set must be nonempty"));
                }
                for &i in set {
                    check_index(i, n)?;
                }
                let mut s = set.clone();
                s.sort_unstable();
                s.dedup();
                if s.len() != set.len() {
                    return Err(Error::invalid("index set has repeated entries"));
                }
            }
            FunctionalKind::MeanAll => {}
            FunctionalKind::OffdiagComplement => {
                if n < 2 {
                    return Err(Error::TooSmall { n, min: 2 });
                }
            }
            FunctionalKind::ThetaPair { i, j, theta } => {
                check_pair(*i, *j, n)?;
                if !theta.is_finite() {
                    return Err(Error::invalid("theta must be finite"));
                }
            }
            FunctionalKind::HalfTracePair { i, j } => check_pair(*i, *j, n)?,
            FunctionalKind::Custom { weight } => {
                if weight.len() != n || weight.iter().any(|r| r.len() != n) {
                    return Err(Error::invalid(format!("weight must be {n}x{n}")));
                }
                let w = ComplexMatrix::from_row_major(n, weight.concat())?;
                let tr = w.trace();
                if (tr - ONE).norm() > 1e-12 {
                    return Err(Error::invalid(format!("weight trace must be 1 (got {tr})")));
                }
                let e = eigh(&w).map_err(|_| Error::invalid("weight must be Hermitian"))?;
                if e.min() < -1e-12 {
                    return Err(Error::invalid(format!(
                        "weight must be positive semidefinite (min eigenvalue {})",
                        e.min()
                    )));
                }
            }
        }
        Ok(Self { n, kind })
    }

    pub fn diag(n: usize, i: usize) -> Result<Self> {
        Self::new(FunctionalKind::Diag { i }, n)
    }

    pub fn mean_all(n: usize) -> Result<Self> {
        Self::new(FunctionalKind::MeanAll, n)
    }

    pub fn offdiag_complement(n: usize) -> Result<Self> {
        Self::new(FunctionalKind::OffdiagComplement, n)
    }

    pub fn index_avg(n: usize, set: Vec<usize>) -> Result<Self> {
        Self::new(FunctionalKind::IndexAvg { set }, n)
    }

    pub fn theta_pair(n: usize, i: usize, j: usize, theta: f64) -> Result<Self> {
        Self::new(FunctionalKind::ThetaPair { i, j, theta }, n)
    }

    pub fn half_trace_pair(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(FunctionalKind::HalfTracePair { i, j }, n)
    }

    pub fn vector_state(x: Vec<Complex64>) -> Result<Self> {
        let n = x.len();
        Self::new(FunctionalKind::VectorState { x }, n)
    }

    pub fn custom(weight: &ComplexMatrix) -> Result<Self> {
        let n = weight.n();
        let rows = (0..n).map(|i| (0..n).map(|j| weight[(i, j)]).collect()).collect();
        Self::new(FunctionalKind::Custom { weight: rows }, n)
    }

    /// `phi(A)`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<Complex64> {
        if a.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: a.n(),
            });
        }
        let n = self.n;
        let nf = n as f64;
        Ok(match &self.kind {
            FunctionalKind::Diag { i } => a[(i - 1, i - 1)],
            FunctionalKind::VectorState { x } => a.quadratic_form(x),
            FunctionalKind::IndexAvg { set } => {
                let mut acc = ZERO;
                for &i in set {
                    for &j in set {
                        acc += a[(i - 1, j - 1)];
                    }
                }
                acc / set.len() as f64
            }
            FunctionalKind::MeanAll => a.entry_sum() / nf,
            FunctionalKind::OffdiagComplement => (a.trace() - a.off_diagonal_sum() / (nf - 1.0)) / nf,
            FunctionalKind::ThetaPair { i, j, theta } => {
                let (i, j) = (i - 1, j - 1);
                let e = Complex64::from_polar(1.0, *theta);
                (a[(i, i)] + a[(j, j)] + a[(i, j)] * e + a[(j, i)] * e.conj()) * 0.5
            }
            FunctionalKind::HalfTracePair { i, j } => (a[(i - 1, i - 1)] + a[(j - 1, j - 1)]) * 0.5,
            FunctionalKind::Custom { weight } => {
                let mut acc = ZERO;
                for (p, row) in weight.iter().enumerate() {
                    for (q, w) in row.iter().enumerate() {
                        acc += w * a[(q, p)];
                    }
                }
                acc
            }
        })
    }

    /// Psd `W` with unit trace such that `phi(A) = tr(W A)`.
    pub fn canonical_weight(&self) -> ComplexMatrix {
        let n = self.n;
        let rank_one = |u: &[Complex64]| ComplexMatrix::from_fn(n, |p, q| u[p] * u[q].conj());
        match &self.kind {
            FunctionalKind::Diag { i } => {
                let mut w = ComplexMatrix::zeros(n);
                w[(i - 1, i - 1)] = ONE;
                w
            }
            FunctionalKind::VectorState { x } => rank_one(x),
            FunctionalKind::IndexAvg { set } => {
                let c = Complex64::new(1.0 / (set.len() as f64).sqrt(), 0.0);
                let mut u = vec![ZERO; n];
                for &i in set {
                    u[i - 1] = c;
                }
                rank_one(&u)
            }
            FunctionalKind::MeanAll => rank_one(&vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]),
            FunctionalKind::OffdiagComplement => {
                // (I - v v*) / (n - 1) with v = ones / sqrt(n)
                let nf = n as f64;
                ComplexMatrix::from_fn(n, |p, q| {
                    let delta = if p == q { 1.0 } else { 0.0 };
                    Complex64::new((delta - 1.0 / nf) / (nf - 1.0), 0.0)
                })
            }
            FunctionalKind::ThetaPair { i, j, theta } => {
                // x = (e_i + e^{i theta} e_j) / sqrt 2
                let mut u = vec![ZERO; n];
                let r = std::f64::consts::FRAC_1_SQRT_2;
                u[i - 1] = Complex64::new(r, 0.0);
                u[j - 1] = Complex64::from_polar(r, *theta);
                rank_one(&u)
            }
            FunctionalKind::HalfTracePair { i, j } => {
                let mut w = ComplexMatrix::zeros(n);
                w[(i - 1, i - 1)] = Complex64::new(0.5, 0.0);
                w[(j - 1, j - 1)] = Complex64::new(0.5, 0.0);
                w
            }
            FunctionalKind::Custom { weight } => ComplexMatrix::from_fn(n, |p, q| weight[p][q]),
        }
    }

    /// Functionals used by default in reports and sweeps.
    pub fn catalog(n: usize) -> Vec<PulFunctional> {
        let mut out = vec![
            Self::diag(n, 1).expect("valid"),
            Self::mean_all(n).expect("valid"),
            Self::index_avg(n, (1..=n.min(2)).collect()).expect("valid"),
        ];
        let norm = (1..=n).map(|k| (k * k) as f64).sum::<f64>().sqrt();
        let x = (1..=n)
            .map(|k| Complex64::from_polar(k as f64 / norm, 0.5 * k as f64))
            .collect();
        out.push(Self::vector_state(x).expect("unit vector"));
        if n >= 2 {
            out.push(Self::diag(n, n).expect("valid"));
            out.push(Self::offdiag_complement(n).expect("valid"));
            out.push(Self::theta_pair(n, 1, 2, 0.7).expect("valid"));
            out.push(Self::half_trace_pair(n, 1, n).expect("valid"));
            // (I + u u*) / (n + 1) with u a unit vector
            let u: Vec<Complex64> = (0..n)
                .map(|k| Complex64::from_polar(1.0 / (n as f64).sqrt(), k as f64))
                .collect();
            let w = ComplexMatrix::from_fn(n, |p, q| {
                let delta = if p == q { ONE } else { ZERO };
                (delta + u[p] * u[q].conj()) / (n as f64 + 1.0)
            });
            out.push(Self::custom(&w).expect("psd unit-trace weight"));
        }
        out
    }
}

impl fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalKind::Diag { i } => write!(f, "diag({i})"),
            FunctionalKind::VectorState { .. } => write!(f, "vector_state"),
            FunctionalKind::IndexAvg { set } => write!(f, "index_avg({set:?})"),
            FunctionalKind::MeanAll => write!(f, "mean_all"),
            FunctionalKind::OffdiagComplement => write!(f, "offdiag_complement"),
            FunctionalKind::ThetaPair { i, j, theta } => write!(f, "theta_pair({i},{j},{theta})"),
            FunctionalKind::HalfTracePair { i, j } => write!(f, "half_trace_pair({i},{j})"),
            FunctionalKind::Custom { .. } => write!(f, "custom"),
        }
    }
}

impl fmt::Display for PulFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Descriptor of a positive unital linear map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    /// `A -> (tr A I - A) / (n - 1)`
    TraceComplement,
    /// `A -> [[a_ii, a_ij], [a_ji, a_jj]]`
    #[serde(rename = "compression_2x2")]
    Compression2x2 { i: usize, j: usize },
    /// `B -> [[b_jj, -b_ij], [-b_ji, b_ii]]`
    #[serde(rename = "flip_compression_2x2")]
    FlipCompression2x2 { i: usize, j: usize },
    /// `A -> diag(a_11, ..., a_nn)`
    DiagonalRestriction,
    /// `A -> [[phi(A)]]`
    FunctionalLift { phi: FunctionalKind },
}

/// A map bound to its input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulMap {
    pub n: usize,
    #[serde(flatten)]
    pub kind: MapKind,
}

impl PulMap {
    pub fn new(kind: MapKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooSmall { n, min: 1 });
        }
        match &kind {
            MapKind::Identity | MapKind::DiagonalRestriction => {}
            MapKind::TraceComplement => {
                if n < 2 {
                    return Err(Error::TooSmall { n, min: 2 });
                }
            }
            MapKind::Compression2x2 { i, j } | MapKind::FlipCompression2x2 { i, j } => check_pair(*i, *j, n)?,
            MapKind::FunctionalLift { phi } => {
                PulFunctional::new(phi.clone(), n)?;
            }
        }
        Ok(Self { n, kind })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(MapKind::Identity, n).expect("n >= 1")
    }

    pub fn trace_complement(n: usize) -> Result<Self> {
        Self::new(MapKind::TraceComplement, n)
    }

    pub fn compression(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(MapKind::Compression2x2 { i, j }, n)
    }

    pub fn flip_compression(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(MapKind::FlipCompression2x2 { i, j }, n)
    }

    pub fn diagonal_restriction(n: usize) -> Self {
        Self::new(MapKind::DiagonalRestriction, n).expect("n >= 1")
    }

    pub fn functional_lift(phi: &PulFunctional) -> Self {
        Self {
            n: phi.n,
            kind: MapKind::FunctionalLift { phi: phi.kind.clone() },
        }
    }

    pub fn n_in(&self) -> usize {
        self.n
    }

    pub fn n_out(&self) -> usize {
        match self.kind {
            MapKind::Compression2x2 { .. } | MapKind::FlipCompression2x2 { .. } => 2,
            MapKind::FunctionalLift { .. } => 1,
            _ => self.n,
        }
    }

    /// `Phi(A)`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: a.n(),
            });
        }
        Ok(match &self.kind {
            MapKind::Identity => a.clone(),
            MapKind::TraceComplement => {
                let n = self.n;
                let tr = a.trace();
                ComplexMatrix::from_fn(n, |p, q| {
                    let d = if p == q { tr } else { ZERO };
                    (d - a[(p, q)]) / (n as f64 - 1.0)
                })
            }
            MapKind::Compression2x2 { i, j } => {
                let (i, j) = (i - 1, j - 1);
                ComplexMatrix::from_rows(&[[a[(i, i)], a[(i, j)]], [a[(j, i)], a[(j, j)]]])
            }
            MapKind::FlipCompression2x2 { i, j } => {
                let (i, j) = (i - 1, j - 1);
                ComplexMatrix::from_rows(&[[a[(j, j)], -a[(i, j)]], [-a[(j, i)], a[(i, i)]]])
            }
            MapKind::DiagonalRestriction => a.diagonal_part(),
            MapKind::FunctionalLift { phi } => {
                let phi = PulFunctional {
                    n: self.n,
                    kind: phi.clone(),
                };
                ComplexMatrix::from_rows(&[[phi.apply(a)?]])
            }
        })
    }

    /// Maps used by default in reports and sweeps.
    pub fn catalog(n: usize) -> Vec<PulMap> {
        let mut out = vec![Self::identity(n), Self::diagonal_restriction(n)];
        if n >= 2 {
            out.push(Self::trace_complement(n).expect("n >= 2"));
            out.push(Self::compression(n, 1, 2).expect("valid"));
            out.push(Self::flip_compression(n, 1, 2).expect("valid"));
        }
        out.push(Self::functional_lift(&PulFunctional::mean_all(n).expect("valid")));
        out
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Identity => write!(f, "identity"),
            MapKind::TraceComplement => write!(f, "trace_complement"),
            MapKind::Compression2x2 { i, j } => write!(f, "compression_2x2({i},{j})"),
            MapKind::FlipCompression2x2 { i, j } => write!(f, "flip_compression_2x2({i},{j})"),
            MapKind::DiagonalRestriction => write!(f, "diagonal_restriction"),
            MapKind::FunctionalLift { phi } => write!(f, "lift[{phi}]"),
        }
    }
}

impl fmt::Display for PulMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Anything that maps `n x n` matrices to `k x k` matrices linearly.
pub trait MatrixMap {
    fn n_in(&self) -> usize;
    fn n_out(&self) -> usize;
    fn map(&self, a: &ComplexMatrix) -> Result<ComplexMatrix>;
    fn label(&self) -> String;
}

impl MatrixMap for PulMap {
    fn n_in(&self) -> usize {
        self.n
    }

    fn n_out(&self) -> usize {
        PulMap::n_out(self)
    }

    fn map(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(a)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl MatrixMap for PulFunctional {
    fn n_in(&self) -> usize {
        self.n
    }

    fn n_out(&self) -> usize {
        1
    }

    fn map(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::from_rows(&[[self.apply(a)?]]))
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// Wraps a closure as a [`MatrixMap`], e.g. for negative controls.
pub struct FnMap<F> {
    pub n_in: usize,
    pub n_out: usize,
    pub label: String,
    pub f: F,
}

impl<F: Fn(&ComplexMatrix) -> ComplexMatrix> MatrixMap for FnMap<F> {
    fn n_in(&self) -> usize {
        self.n_in
    }

    fn n_out(&self) -> usize {
        self.n_out
    }

    fn map(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok((self.f)(a))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Outcome of [`validate_pulm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub label: String,
    pub n_in: usize,
    pub n_out: usize,
    pub trials: usize,
    /// `||Phi(I) - I||_F`
    pub unitality_defect: f64,
    /// Worst `(max(0, -lambda_min(Phi(P))) + ||Phi(P) - Phi(P)*||_F) / ||P||_F`
    /// over random psd `P`.
    pub positivity_violation: f64,
    /// Worst `||Phi(aX + bY) - a Phi(X) - b Phi(Y)||_F / max(1, |a| ||X||_F + |b| ||Y||_F)`.
    pub linearity_defect: f64,
    pub pass: bool,
}

/// Threshold applied to every defect in [`ValidationReport::pass`].
pub const VALIDATION_TOL: f64 = 1e-10;

/// Checks unitality, positivity on `trials` random psd inputs `G* G`, and
/// linearity on `trials` random pairs. Deterministic in `seed`.
pub fn validate_pulm<M: MatrixMap + ?Sized>(map: &M, trials: usize, seed: u64) -> Result<ValidationReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let n = map.n_in();
    let k = map.n_out();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    let image = map.map(&ComplexMatrix::identity(n))?;
    if image.n() != k {
        return Err(Error::Dimension {
            expected: k,
            found: image.n(),
        });
    }
    let unitality_defect = (&image - &ComplexMatrix::identity(k)).frobenius_norm();

    let mut positivity_violation: f64 = 0.0;
    for _ in 0..trials {
        let g = complex_gaussian_matrix(&mut rng, n);
        let p = &g.adjoint() * &g;
        let y = map.map(&p)?;
        let h = y.hermitian_part();
        let lmin = eigh(&h)?.min();
        let v = ((-lmin).max(0.0) + y.hermiticity_defect()) / p.frobenius_norm().max(f64::MIN_POSITIVE);
        positivity_violation = positivity_violation.max(v);
    }

    let mut linearity_defect: f64 = 0.0;
    for _ in 0..trials {
        let x = complex_gaussian_matrix(&mut rng, n);
        let y = complex_gaussian_matrix(&mut rng, n);
        let alpha = complex_gaussian(&mut rng);
        let beta = complex_gaussian(&mut rng);
        let lhs = map.map(&(&x.scaled(alpha) + &y.scaled(beta)))?;
        let rhs = &map.map(&x)?.scaled(alpha) + &map.map(&y)?.scaled(beta);
        let scale = (alpha.norm() * x.frobenius_norm() + beta.norm() * y.frobenius_norm()).max(1.0);
        linearity_defect = linearity_defect.max((&lhs - &rhs).frobenius_norm() / scale);
    }

    let pass = unitality_defect <= VALIDATION_TOL
        && positivity_violation <= VALIDATION_TOL
        && linearity_defect <= VALIDATION_TOL;
    Ok(ValidationReport {
        label: map.label(),
        n_in: n,
        n_out: k,
        trials,
        unitality_defect,
        positivity_violation,
        linearity_defect,
        pass,
    })
}
