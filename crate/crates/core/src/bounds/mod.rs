//! Bound estimators.
//!
//! Each operation evaluates one inequality on a [`Pair`] of matrices and
//! returns a [`BoundResult`] holding the cheap bound next to the exact oracle
//! value of the quantity it bounds. The table [`BOUNDS`] lists every result
//! name; names are part of the JSON output and stay stable across versions.

mod distance;
mod spread;
mod variance;

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use distance::{
    diag_pair, functional_gap, index_sets, map_gap, mirsky_pair, offdiag_sum, theta_pair, trace_complement_gap,
    weyl_lower, weyl_upper, IndexFamily, THETA_GRID,
};
pub use spread::{
    diag_hull_spread, mean_vs_pairdiag, offdiag_modulus, spread_centered_norm, spread_complement_average,
    spread_complement_offdiag, spread_functional,
};
pub use variance::{
    bhatia_davis, bhatia_davis_interval, det_ratio, variance_ratio, variance_refined, variance_spread,
};

use crate::classify::{classify, MatrixClass, SpectralInterval};
use crate::eigen::{certified_spectrum, Spectrum};
use crate::error::{Error, Result};
use crate::matrix::{digest_of, ComplexMatrix};
use crate::numrange::{s_numerical_range, DEFAULT_ANGLES};
use crate::pulm::{MatrixMap, PulFunctional, PulMap};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `bound <= exact`
    Lower,
    /// `exact <= bound`
    Upper,
}

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub name: String,
    pub bound: f64,
    pub exact: f64,
    /// `exact - bound` for lower bounds, `bound - exact` for upper bounds.
    pub slack: f64,
    pub direction: Direction,
    pub applicable: bool,
    pub citation: String,
    pub inputs_digest: String,
    /// Parameters distinguishing results that share a name.
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl BoundResult {
    /// Negative slack tolerated before the result counts as a violation.
    pub fn allowance(&self, tol: f64) -> f64 {
        tol * self.exact.abs().max(1.0)
    }

    pub fn holds(&self, tol: f64) -> bool {
        !self.applicable || self.slack >= -self.allowance(tol)
    }

    pub fn violated(&self, tol: f64) -> bool {
        !self.holds(tol)
    }

    /// `slack / max(1, |exact|)`.
    pub fn slack_ratio(&self) -> f64 {
        self.slack / self.exact.abs().max(1.0)
    }

    pub(crate) fn with(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

/// Which matrices a bound reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Reads both `A` and `B`.
    Pair,
    /// Reads `A` only.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundInfo {
    pub name: &'static str,
    pub scope: Scope,
    pub direction: Direction,
    pub citation: &'static str,
}

const fn info(name: &'static str, scope: Scope, direction: Direction, citation: &'static str) -> BoundInfo {
    BoundInfo {
        name,
        scope,
        direction,
        citation,
    }
}

use Direction::{Lower, Upper};
use Scope::{Pair as P, Single as S};

/// Every result name, in evaluation order.
pub const BOUNDS: &[BoundInfo] = &[
    info("weyl_lower", P, Lower, "||A - B|| <= ||Eig_down(A) - Eig_up(B)||"),
    info("weyl_upper", P, Upper, "||Eig_down(A) - Eig_down(B)|| <= ||A - B||"),
    info("functional_gap", P, Lower, "|phi1(A) - phi2(B)| <= s(W(A), W(B))"),
    info("diag_pair", P, Lower, "max_ij |a_ii - b_jj| <= s(W(A), W(B))"),
    info("map_gap", P, Lower, "||Phi1(A) - Phi2(B)|| <= ||Eig_down(A) - Eig_up(B)||"),
    info(
        "trace_complement_gap",
        P,
        Lower,
        "||A - B + n(B - tr(A)/n I)|| / (n-1) <= ||Eig_down(A) - Eig_up(B)||",
    ),
    info(
        "mirsky_pair",
        P,
        Lower,
        "|alpha + beta +- sqrt((alpha - beta)^2 + 4|a_ij + b_ij|^2)| / 2 <= ||Eig_down(A) - Eig_up(B)||",
    ),
    info("index_sets", P, Lower, "|avg_I(A) - avg_J(B)| <= max_ij |lambda_i(A) - lambda_j(B)|"),
    info(
        "offdiag_sum",
        P,
        Lower,
        "|sum_{i!=j} a_ij / (n-1) + sum_ij (b_ij - a_ij) / n| <= max_ij |lambda_i(A) - lambda_j(B)|",
    ),
    info(
        "theta_pair",
        P,
        Lower,
        "|a_ii - b_ii + a_jj - b_jj + a_ij e^{it} + a_ji e^{-it}| / 2 <= max_ij |lambda_i(A) - lambda_j(B)|",
    ),
    info("diag_hull_spread", S, Lower, "max_ij |lambda_i(A) - a_jj| <= spd(A)"),
    info(
        "offdiag_modulus",
        S,
        Lower,
        "max_{i!=j} (|a_ij| + |a_ji|) / 2 <= max_ij |lambda_i(A) - a_jj|",
    ),
    info(
        "mean_vs_pairdiag",
        S,
        Lower,
        "max_{p!=q} |sum_ij a_ij / n - (a_pp + a_qq) / 2| <= max_ij |lambda_i(A) - a_jj|",
    ),
    info("spread_centered_norm", S, Lower, "n/(n-1) ||A - tr(A)/n I|| <= spd(A)"),
    info("spread_functional", S, Lower, "n/(n-1) |phi(A) - tr(A)/n| <= spd(A)"),
    info(
        "spread_complement_average",
        S,
        Lower,
        "max_ij |lambda_i - sum_{k!=j} lambda_k / (n-1)| <= spd(A)",
    ),
    info(
        "spread_complement_offdiag",
        S,
        Lower,
        "|sum_{i!=j} a_ij| / (n-1) <= max_ij |lambda_i - sum_{k!=j} lambda_k / (n-1)|",
    ),
    info(
        "det_ratio_lower",
        S,
        Lower,
        "(m/M)^((n-1)/n) <= lambda_min(det(A)^(-1/n) Phi(A))",
    ),
    info(
        "det_ratio_upper",
        S,
        Upper,
        "lambda_max(det(A)^(-1/n) Phi(A)) <= (M/m)^((n-1)/n)",
    ),
    info(
        "condition_lower",
        S,
        Lower,
        "(det(A)^(-1/n) lambda_max(Phi(A)))^(n/(n-1)) <= lambda_max(A) / lambda_min(A)",
    ),
    info(
        "bhatia_davis_interval",
        S,
        Upper,
        "Phi(A^2) - Phi(A)^2 <= (M - Phi(A))(Phi(A) - m)",
    ),
    info("bhatia_davis", S, Upper, "Phi(A^2) - Phi(A)^2 <= (M - m)^2 / 4"),
    info("variance_spread", S, Lower, "2 sqrt(lambda_max(Phi(A^2) - Phi(A)^2)) <= M - m"),
    info(
        "variance_ratio",
        S,
        Upper,
        "Phi(A^2) >= 2 Phi(A)^2, Phi(A) > 0 => Phi(A^2) <= (M - m) Phi(A)",
    ),
    info(
        "variance_refined",
        S,
        Lower,
        "phi(A^2) >= 2 phi(A)^2, phi(A) > 0 => phi(A^2) / phi(A) <= M - m",
    ),
];

/// Looks up a name in [`BOUNDS`].
pub fn bound_info(name: &str) -> Option<&'static BoundInfo> {
    BOUNDS.iter().find(|b| b.name == name)
}

/// A set of bound names to evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    names: Vec<&'static str>,
}

impl Selection {
    pub fn all() -> Self {
        Self {
            names: BOUNDS.iter().map(|b| b.name).collect(),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(&name)
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }
}

impl FromStr for Selection {
    type Err = Error;

    /// `"all"` or a comma-separated list of names from [`BOUNDS`].
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        let mut wanted = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let b = bound_info(part).ok_or_else(|| Error::invalid(format!("unknown bound '{part}'")))?;
            wanted.push(b.name);
        }
        if wanted.is_empty() {
            return Err(Error::invalid("empty bound selection"));
        }
        // keep table order so output does not depend on how the list was typed
        let names = BOUNDS
            .iter()
            .map(|b| b.name)
            .filter(|n| wanted.contains(n))
            .collect();
        Ok(Self { names })
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names.join(","))
    }
}

/// Two matrices of equal size with their classification and certified
/// spectra, shared by every bound evaluated on them.
pub struct Pair<'a> {
    a: &'a ComplexMatrix,
    b: &'a ComplexMatrix,
    class_a: MatrixClass,
    class_b: MatrixClass,
    spectrum_a: Result<Spectrum>,
    spectrum_b: Result<Spectrum>,
    a_digest: String,
    pair_digest: String,
    a_squared: OnceCell<ComplexMatrix>,
    range_gap: OnceCell<Result<f64>>,
}

impl<'a> Pair<'a> {
    pub fn new(a: &'a ComplexMatrix, b: &'a ComplexMatrix) -> Result<Self> {
        a.check_same_dim(b)?;
        let class_a = classify(a, tol::CLASS);
        let spectrum_a = certified_spectrum(a);
        let (class_b, spectrum_b) = if a == b {
            (class_a, spectrum_a.clone())
        } else {
            (classify(b, tol::CLASS), certified_spectrum(b))
        };
        Ok(Self {
            a,
            b,
            class_a,
            class_b,
            spectrum_a,
            spectrum_b,
            a_digest: a.digest(),
            pair_digest: digest_of(&[a, b]),
            a_squared: OnceCell::new(),
            range_gap: OnceCell::new(),
        })
    }

    /// The pair `(A, A)`.
    pub fn single(a: &'a ComplexMatrix) -> Self {
        Self::new(a, a).expect("same dimension")
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &ComplexMatrix {
        self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        self.b
    }

    pub fn class_a(&self) -> &MatrixClass {
        &self.class_a
    }

    pub fn class_b(&self) -> &MatrixClass {
        &self.class_b
    }

    pub fn spectrum_a(&self) -> Result<&Spectrum> {
        self.spectrum_a.as_ref().map_err(Clone::clone)
    }

    pub fn spectrum_b(&self) -> Result<&Spectrum> {
        self.spectrum_b.as_ref().map_err(Clone::clone)
    }

    /// Digest carried by results of the given scope.
    pub fn digest(&self, scope: Scope) -> &str {
        match scope {
            Scope::Pair => &self.pair_digest,
            Scope::Single => &self.a_digest,
        }
    }

    pub(crate) fn a_squared(&self) -> &ComplexMatrix {
        self.a_squared.get_or_init(|| self.a * self.a)
    }

    /// `s(W(A), W(B))`: the largest eigenvalue distance when both matrices are
    /// normal, the numerical range sweep otherwise.
    pub fn range_gap(&self) -> Result<f64> {
        self.range_gap
            .get_or_init(|| {
                if self.class_a.is_normal && self.class_b.is_normal {
                    Ok(crate::eigen::max_pairwise_eig_distance(
                        self.spectrum_a()?,
                        self.spectrum_b()?,
                    ))
                } else {
                    s_numerical_range(self.a, self.b, DEFAULT_ANGLES)
                }
            })
            .clone()
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        self.class_a.require_hermitian()?;
        self.class_b.require_hermitian()
    }

    pub(crate) fn require_normal(&self) -> Result<()> {
        self.class_a.require_normal()?;
        self.class_b.require_normal()
    }

    pub(crate) fn require_n(&self, min: usize) -> Result<()> {
        if self.n() < min {
            return Err(Error::TooSmall { n: self.n(), min });
        }
        Ok(())
    }

    /// Default interval `[lambda_min(A), lambda_max(A)]`, or the given one
    /// after checking that it contains the spectrum of `A`.
    pub fn interval(&self, given: Option<SpectralInterval>) -> Result<SpectralInterval> {
        self.class_a.require_hermitian()?;
        let v = self.spectrum_a()?.real_values()?;
        let (lo, hi) = (v[0], v[v.len() - 1]);
        match given {
            None => SpectralInterval::new(lo, hi),
            Some(iv) => {
                iv.check_contains(lo, hi, tol::CLASS * self.a.scale())?;
                Ok(iv)
            }
        }
    }

    pub(crate) fn result(&self, name: &'static str, variant: String, bound: f64, exact: f64) -> Result<BoundResult> {
        let info = bound_info(name).expect("name listed in BOUNDS");
        if !bound.is_finite() || !exact.is_finite() {
            return Err(Error::invalid(format!("{name} produced a non-finite value")));
        }
        let slack = match info.direction {
            Direction::Lower => exact - bound,
            Direction::Upper => bound - exact,
        };
        Ok(BoundResult {
            name: name.to_string(),
            bound,
            exact,
            slack,
            direction: info.direction,
            applicable: true,
            citation: info.citation.to_string(),
            inputs_digest: self.digest(info.scope).to_string(),
            variant,
            reason: None,
            extra: BTreeMap::new(),
        })
    }

    pub fn inapplicable(&self, name: &'static str, variant: String, reason: String) -> BoundResult {
        let info = bound_info(name).expect("name listed in BOUNDS");
        BoundResult {
            name: name.to_string(),
            bound: 0.0,
            exact: 0.0,
            slack: 0.0,
            direction: info.direction,
            applicable: false,
            citation: info.citation.to_string(),
            inputs_digest: self.digest(info.scope).to_string(),
            variant,
            reason: Some(reason),
            extra: BTreeMap::new(),
        }
    }
}

/// Collects results, turning precondition failures into inapplicable entries
/// and propagating every other error.
struct Collector<'p, 'a> {
    pair: &'p Pair<'a>,
    out: Vec<BoundResult>,
}

impl Collector<'_, '_> {
    fn push(&mut self, name: &'static str, variant: String, r: Result<BoundResult>) -> Result<()> {
        match r {
            Ok(r) => self.out.push(r),
            Err(e) if e.is_precondition() => self.out.push(self.pair.inapplicable(name, variant, e.to_string())),
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

fn pair_label(first: &str, second: &str) -> String {
    format!("{first}; {second}")
}

/// Evaluates the selected bounds of the given scope on `pair`, drawing
/// functionals and maps from the default catalogs. Interval bounds use
/// `interval` or the oracle spectrum of `A`.
pub fn evaluate(
    pair: &Pair<'_>,
    selection: &Selection,
    scope: Scope,
    interval: Option<SpectralInterval>,
) -> Result<Vec<BoundResult>> {
    let n = pair.n();
    let functionals = PulFunctional::catalog(n);
    let maps = PulMap::catalog(n);
    let mut c = Collector {
        pair,
        out: Vec::new(),
    };
    let wants = |name: &str| selection.contains(name) && bound_info(name).map(|b| b.scope) == Some(scope);

    if wants("weyl_lower") {
        c.push("weyl_lower", String::new(), weyl_lower(pair))?;
    }
    if wants("weyl_upper") {
        c.push("weyl_upper", String::new(), weyl_upper(pair))?;
    }
    if wants("functional_gap") {
        for f in &functionals {
            for g in &functionals {
                c.push(
                    "functional_gap",
                    pair_label(&f.to_string(), &g.to_string()),
                    functional_gap(pair, f, g),
                )?;
            }
        }
    }
    if wants("diag_pair") {
        c.push("diag_pair", String::new(), diag_pair(pair))?;
    }
    if wants("map_gap") {
        for f in &maps {
            for g in maps.iter().filter(|g| g.n_out() == f.n_out()) {
                c.push("map_gap", pair_label(&f.to_string(), &g.to_string()), map_gap(pair, f, g))?;
            }
        }
    }
    if wants("trace_complement_gap") {
        c.push("trace_complement_gap", String::new(), trace_complement_gap(pair))?;
    }
    if wants("mirsky_pair") {
        for (i, j) in index_pairs(n) {
            c.push("mirsky_pair", format!("i={i}, j={j}"), mirsky_pair(pair, i, j))?;
        }
    }
    if wants("index_sets") {
        c.push("index_sets", "default".into(), index_sets(pair, &IndexFamily::Default))?;
    }
    if wants("offdiag_sum") {
        c.push("offdiag_sum", String::new(), offdiag_sum(pair))?;
    }
    if wants("theta_pair") {
        for (i, j) in index_pairs(n) {
            c.push("theta_pair", format!("i={i}, j={j}"), theta_pair(pair, i, j, None))?;
        }
    }
    if wants("diag_hull_spread") {
        c.push("diag_hull_spread", String::new(), diag_hull_spread(pair))?;
    }
    if wants("offdiag_modulus") {
        c.push("offdiag_modulus", String::new(), offdiag_modulus(pair))?;
    }
    if wants("mean_vs_pairdiag") {
        c.push("mean_vs_pairdiag", String::new(), mean_vs_pairdiag(pair))?;
    }
    if wants("spread_centered_norm") {
        c.push("spread_centered_norm", String::new(), spread_centered_norm(pair))?;
    }
    if wants("spread_functional") {
        for f in &functionals {
            c.push("spread_functional", f.to_string(), spread_functional(pair, f))?;
        }
    }
    if wants("spread_complement_average") {
        c.push("spread_complement_average", String::new(), spread_complement_average(pair))?;
    }
    if wants("spread_complement_offdiag") {
        c.push("spread_complement_offdiag", String::new(), spread_complement_offdiag(pair))?;
    }

    let det_names = ["det_ratio_lower", "det_ratio_upper", "condition_lower"];
    if det_names.iter().any(|n| wants(n)) {
        for m in &maps {
            match det_ratio(pair, m, interval) {
                Ok(rs) => c.out.extend(rs.into_iter().filter(|r| wants(&r.name))),
                Err(e) if e.is_precondition() => {
                    for name in det_names.into_iter().filter(|n| wants(n)) {
                        c.out.push(pair.inapplicable(name, m.to_string(), e.to_string()));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }

    let interval_maps: Vec<&dyn MatrixMap> = functionals
        .iter()
        .map(|f| f as &dyn MatrixMap)
        .chain(maps.iter().map(|m| m as &dyn MatrixMap))
        .collect();
    type MapOp = fn(&Pair<'_>, &dyn MatrixMap, Option<SpectralInterval>) -> Result<BoundResult>;
    let map_ops: [(&'static str, MapOp); 4] = [
        ("bhatia_davis_interval", bhatia_davis_interval),
        ("bhatia_davis", bhatia_davis),
        ("variance_spread", variance_spread),
        ("variance_ratio", variance_ratio),
    ];
    for (name, op) in map_ops {
        if wants(name) {
            for m in &interval_maps {
                c.push(name, m.label(), op(pair, *m, interval))?;
            }
        }
    }
    if wants("variance_refined") {
        for f in &functionals {
            c.push("variance_refined", f.to_string(), variance_refined(pair, f, interval))?;
        }
    }
    Ok(c.out)
}

/// `(i, j)` with `1 <= i < j <= n`.
pub fn index_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        for (k, b) in BOUNDS.iter().enumerate() {
            assert!(BOUNDS[k + 1..].iter().all(|o| o.name != b.name), "{}", b.name);
        }
    }

    #[test]
    fn selection_parsing() {
        assert_eq!("all".parse::<Selection>().unwrap(), Selection::all());
        let s: Selection = "mirsky_pair, weyl_lower".parse().unwrap();
        assert_eq!(s.names(), &["weyl_lower", "mirsky_pair"]);
        assert!("mirsky".parse::<Selection>().is_err());
        assert!(" , ".parse::<Selection>().is_err());
    }

    #[test]
    fn slack_sign_follows_direction() {
        let a = crate::matrix::example_matrix();
        let p = Pair::single(&a);
        let lo = p.result("spread_centered_norm", String::new(), 1.0, 3.0).unwrap();
        assert_eq!(lo.slack, 2.0);
        let up = p.result("bhatia_davis", String::new(), 1.0, 3.0).unwrap();
        assert_eq!(up.slack, -2.0);
        assert!(up.violated(1e-8));
        assert!(p.result("bhatia_davis", String::new(), f64::NAN, 0.0).is_err());
    }

    #[test]
    fn index_pairs_upper_triangle() {
        assert_eq!(index_pairs(3).collect::<Vec<_>>(), vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(index_pairs(1).count(), 0);
    }
}
