//! Reports, the randomized soundness sweep and the worked 3x3 example.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundResult, Pair, Scope, Selection, BOUNDS};
use crate::classify::{MatrixClass, SpectralInterval};
use crate::eigen::{spread, Spectrum};
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::matrix::{example_matrix, ComplexMatrix};
use crate::pulm::PulFunctional;
use crate::TOOL_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPair {
    pub a: MatrixClass,
    pub b: MatrixClass,
}

/// Oracle quantities behind the exact side of the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub spectrum_a: Option<Spectrum>,
    pub spectrum_b: Option<Spectrum>,
    /// `spd(A)`, when the spectrum of `A` is available.
    pub spread_a: Option<f64>,
    /// `s(W(A), W(B))`.
    pub range_gap: Option<f64>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub matrix_a_digest: String,
    pub matrix_b_digest: String,
    /// Digest of `(A, B)`, carried by two-matrix results. One-matrix results
    /// carry `matrix_a_digest`.
    pub pair_digest: String,
    pub classes: ClassPair,
    pub results: Vec<BoundResult>,
    pub oracle_summary: OracleSummary,
    pub tool_version: String,
}

impl BoundReport {
    pub fn violations(&self, tol: f64) -> usize {
        self.results.iter().filter(|r| r.violated(tol)).count()
    }
}

/// Evaluates the selected bounds on `(A, B)`, with `B = A` when absent.
pub fn run_report(
    a: &ComplexMatrix,
    b: Option<&ComplexMatrix>,
    selection: &Selection,
    interval: Option<SpectralInterval>,
) -> Result<BoundReport> {
    let b = b.unwrap_or(a);
    let pair = Pair::new(a, b)?;
    let mut results = bounds::evaluate(&pair, selection, Scope::Pair, interval)?;
    results.extend(bounds::evaluate(&pair, selection, Scope::Single, interval)?);

    let mut errors = Vec::new();
    let mut keep = |r: Result<&Spectrum>, label: &str| match r {
        Ok(s) => Some(s.clone()),
        Err(e) => {
            errors.push(format!("{label}: {e}"));
            None
        }
    };
    let spectrum_a = keep(pair.spectrum_a(), "spectrum_a");
    let spectrum_b = keep(pair.spectrum_b(), "spectrum_b");
    let range_gap = match pair.range_gap() {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("range_gap: {e}"));
            None
        }
    };
    Ok(BoundReport {
        matrix_a_digest: pair.digest(Scope::Single).to_string(),
        matrix_b_digest: b.digest(),
        pair_digest: pair.digest(Scope::Pair).to_string(),
        classes: ClassPair {
            a: *pair.class_a(),
            b: *pair.class_b(),
        },
        results,
        oracle_summary: OracleSummary {
            spread_a: spectrum_a.as_ref().map(spread),
            spectrum_a,
            spectrum_b,
            range_gap,
            errors,
        },
        tool_version: TOOL_VERSION.to_string(),
    })
}

/// One row per result.
pub fn results_to_csv(results: &[BoundResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "name",
        "variant",
        "bound",
        "exact",
        "slack",
        "direction",
        "applicable",
        "citation",
        "inputs_digest",
        "reason",
    ])
    .map_err(io)?;
    for r in results {
        let direction = match r.direction {
            bounds::Direction::Lower => "lower",
            bounds::Direction::Upper => "upper",
        };
        w.write_record([
            r.name.as_str(),
            r.variant.as_str(),
            &r.bound.to_string(),
            &r.exact.to_string(),
            &r.slack.to_string(),
            direction,
            if r.applicable { "true" } else { "false" },
            r.citation.as_str(),
            r.inputs_digest.as_str(),
            r.reason.as_deref().unwrap_or(""),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Which pair of a trial produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialPair {
    /// Two independent draws.
    AB,
    /// `A` against itself.
    AA,
    /// `A` against its diagonal part.
    AD,
    /// One-matrix bounds on `A`.
    A,
}

/// Per-name aggregate over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStats {
    pub name: String,
    pub count: usize,
    pub applicable_count: usize,
    pub violations: usize,
    /// `max(0, -min slack)` over applicable results.
    pub max_negative_slack: f64,
    /// Mean of `slack / max(1, |exact|)` over applicable results.
    pub mean_slack_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub pair: TrialPair,
    pub name: String,
    pub variant: String,
    pub bound: f64,
    pub exact: f64,
    pub slack: f64,
}

/// Most violations listed individually in a summary.
pub const MAX_LISTED_VIOLATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub tool_version: String,
    pub ensemble: EnsembleSpec,
    pub selection: Vec<String>,
    pub tolerance: f64,
    pub total_results: usize,
    pub total_violations: usize,
    pub bounds: Vec<BoundStats>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Default)]
struct Partial {
    count: usize,
    applicable: usize,
    violations: usize,
    min_slack: f64,
    ratio_sum: f64,
}

struct TrialOutcome {
    partials: Vec<Partial>,
    violations: Vec<Violation>,
}

fn run_trial(spec: &EnsembleSpec, trial: usize, selection: &Selection, tol: f64) -> Result<TrialOutcome> {
    let (a, b) = spec.trial_pair(trial)?;
    let d = a.diagonal_part();
    let mut partials = vec![Partial::default(); BOUNDS.len()];
    let mut violations = Vec::new();
    let mut absorb = |tag: TrialPair, results: Vec<BoundResult>| {
        for r in results {
            let k = BOUNDS.iter().position(|b| b.name == r.name).expect("known name");
            let p = &mut partials[k];
            p.count += 1;
            if !r.applicable {
                continue;
            }
            p.applicable += 1;
            p.min_slack = p.min_slack.min(r.slack);
            p.ratio_sum += r.slack_ratio();
            if r.violated(tol) {
                p.violations += 1;
                violations.push(Violation {
                    trial,
                    pair: tag,
                    name: r.name,
                    variant: r.variant,
                    bound: r.bound,
                    exact: r.exact,
                    slack: r.slack,
                });
            }
        }
    };
    let single = Pair::single(&a);
    absorb(TrialPair::A, bounds::evaluate(&single, selection, Scope::Single, None)?);
    absorb(TrialPair::AA, bounds::evaluate(&single, selection, Scope::Pair, None)?);
    let ab = Pair::new(&a, &b)?;
    absorb(TrialPair::AB, bounds::evaluate(&ab, selection, Scope::Pair, None)?);
    let ad = Pair::new(&a, &d)?;
    absorb(TrialPair::AD, bounds::evaluate(&ad, selection, Scope::Pair, None)?);
    Ok(TrialOutcome { partials, violations })
}

/// Runs every trial of `spec` on the pairs `(A, B)`, `(A, A)` and `(A, D)`
/// plus the one-matrix bounds on `A`, in parallel on the current rayon pool.
///
/// Trials are merged in index order, so the summary is identical for any
/// number of threads.
pub fn verify(spec: &EnsembleSpec, selection: &Selection, tol: f64) -> Result<VerifySummary> {
    spec.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t, selection, tol))
        .collect::<Result<_>>()?;

    let mut totals = vec![Partial::default(); BOUNDS.len()];
    let mut violations = Vec::new();
    let mut total_violations = 0;
    for o in outcomes {
        for (t, p) in totals.iter_mut().zip(&o.partials) {
            t.count += p.count;
            t.applicable += p.applicable;
            t.violations += p.violations;
            t.min_slack = t.min_slack.min(p.min_slack);
            t.ratio_sum += p.ratio_sum;
        }
        total_violations += o.violations.len();
        let room = MAX_LISTED_VIOLATIONS.saturating_sub(violations.len());
        violations.extend(o.violations.into_iter().take(room));
    }
    let stats: Vec<BoundStats> = BOUNDS
        .iter()
        .zip(&totals)
        .filter(|(b, _)| selection.contains(b.name))
        .map(|(b, t)| BoundStats {
            name: b.name.to_string(),
            count: t.count,
            applicable_count: t.applicable,
            violations: t.violations,
            max_negative_slack: (-t.min_slack).max(0.0),
            mean_slack_ratio: if t.applicable == 0 {
                0.0
            } else {
                t.ratio_sum / t.applicable as f64
            },
        })
        .collect();
    Ok(VerifySummary {
        tool_version: TOOL_VERSION.to_string(),
        ensemble: *spec,
        selection: selection.names().iter().map(|s| s.to_string()).collect(),
        tolerance: tol,
        total_results: stats.iter().map(|s| s.count).sum(),
        total_violations,
        bounds: stats,
        violations,
    })
}

/// [`verify`] on a dedicated pool of `threads` workers.
pub fn verify_with_threads(
    spec: &EnsembleSpec,
    selection: &Selection,
    tol: f64,
    threads: usize,
) -> Result<VerifySummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| verify(spec, selection, tol))
}

/// Tolerance of the worked-example checks.
pub const EXAMPLE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleCheck {
    pub label: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// The worked example on `A = [[2,2,1],[2,2,1],[1,1,1]]` with `phi = diag(1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkedExample {
    pub matrix: Vec<Vec<f64>>,
    pub square: Vec<Vec<f64>>,
    pub square_matches: bool,
    pub premise_holds: bool,
    pub checks: Vec<ExampleCheck>,
    pub pass: bool,
    pub tool_version: String,
}

fn real_rows(a: &ComplexMatrix) -> Vec<Vec<f64>> {
    (0..a.n()).map(|i| (0..a.n()).map(|j| a[(i, j)].re).collect()).collect()
}

/// Recomputes the three lower bounds on `M - m` for the example matrix: the
/// variance route `2 sqrt(phi(A^2) - phi(A)^2)`, the refined route
/// `phi(A^2) / phi(A)`, and the oracle spread.
pub fn worked_example() -> Result<WorkedExample> {
    let a = example_matrix();
    let square = &a * &a;
    let printed = ComplexMatrix::from_real_rows(&[[9.0, 9.0, 5.0], [9.0, 9.0, 5.0], [5.0, 5.0, 3.0]]);
    let pair = Pair::single(&a);
    let phi = PulFunctional::diag(3, 1)?;
    let refined = bounds::variance_refined(&pair, &phi, None)?;
    let variance_route = bounds::variance_spread(&pair, &phi, None)?;
    let oracle = spread(pair.spectrum_a()?);

    let check = |label: &str, value: f64, expected: f64| ExampleCheck {
        label: label.to_string(),
        value,
        expected,
        tolerance: EXAMPLE_TOL,
        pass: (value - expected).abs() <= EXAMPLE_TOL,
    };
    let checks = vec![
        check("variance route 2 sqrt(phi(A^2) - phi(A)^2)", variance_route.bound, 4.4721),
        check("refined route phi(A^2) / phi(A)", refined.bound, 4.5),
        check("oracle spread", oracle, 4.5616),
    ];
    let square_matches = square == printed;
    let premise_holds = refined.applicable;
    let pass = square_matches && premise_holds && checks.iter().all(|c| c.pass);
    Ok(WorkedExample {
        matrix: real_rows(&a),
        square: real_rows(&square),
        square_matches,
        premise_holds,
        checks,
        pass,
        tool_version: TOOL_VERSION.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EnsembleKind;

    #[test]
    fn example_passes() {
        let ex = worked_example().unwrap();
        assert!(ex.pass, "{ex:#?}");
        assert!(ex.square_matches);
        let v: Vec<f64> = ex.checks.iter().map(|c| c.value).collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
    }

    #[test]
    fn report_on_example() {
        let a = example_matrix();
        let r = run_report(&a, None, &Selection::all(), None).unwrap();
        assert_eq!(r.violations(crate::tol::VERIFY), 0);
        assert_eq!(r.matrix_a_digest, r.matrix_b_digest);
        for res in &r.results {
            assert!(res.inputs_digest == r.matrix_a_digest || res.inputs_digest == r.pair_digest);
        }
        let find = |name: &str| r.results.iter().find(|x| x.name == name).unwrap();
        assert!((find("spread_centered_norm").bound - 4.342329219).abs() < 1e-8);
        assert!((find("offdiag_sum").bound - 4.0).abs() < 1e-12);
        assert!((r.oracle_summary.spread_a.unwrap() - 4.561552812808830).abs() < 1e-12);
    }

    #[test]
    fn identity_report_is_all_zero() {
        let i = ComplexMatrix::identity(3);
        let r = run_report(&i, None, &Selection::all(), None).unwrap();
        assert_eq!(r.violations(crate::tol::VERIFY), 0);
        for res in r.results.iter().filter(|x| x.applicable) {
            if res.name == "det_ratio_lower"
                || res.name == "det_ratio_upper"
                || res.name == "condition_lower"
                || res.name == "variance_ratio"
                || res.name == "variance_refined"
            {
                continue;
            }
            assert!(res.bound.abs() < 1e-12, "{} {}", res.name, res.bound);
            assert!(res.exact.abs() < 1e-12, "{} {}", res.name, res.exact);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let a = example_matrix();
        let sel: Selection = "mirsky_pair".parse().unwrap();
        let r = run_report(&a, None, &sel, None).unwrap();
        let text = results_to_csv(&r.results).unwrap();
        assert_eq!(text.lines().count(), 1 + 3);
        assert!(text.starts_with("name,variant,bound"));
    }

    #[test]
    fn small_sweep_is_clean_and_deterministic() {
        let spec = EnsembleSpec::new(EnsembleKind::HermitianGaussian, 3, 4, 42).unwrap();
        let s1 = verify(&spec, &Selection::all(), crate::tol::VERIFY).unwrap();
        let s2 = verify_with_threads(&spec, &Selection::all(), crate::tol::VERIFY, 2).unwrap();
        assert_eq!(s1.total_violations, 0, "{:#?}", s1.violations);
        assert_eq!(serde_json::to_string(&s1).unwrap(), serde_json::to_string(&s2).unwrap());
    }
}
