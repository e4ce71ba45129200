//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use spectral_bounds::bounds::{self, trace_complement_gap, weyl_lower, Pair, Selection};
use spectral_bounds::eigen::{
    eig_general, eig_hermitian, eigh, matching_distance, max_pairwise_eig_distance, spectral_norm,
    weyl_interval,
};
use spectral_bounds::ensemble::{sample, trial_rng, EnsembleKind, EnsembleSpec};
use spectral_bounds::harness::{verify, verify_with_threads, worked_example};
use spectral_bounds::market::read_matrix_market;
use spectral_bounds::numrange::s_numerical_range;
use spectral_bounds::pulm::{validate_pulm, FnMap, MatrixMap, PulFunctional, PulMap};
use spectral_bounds::{tol, ComplexMatrix};

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn example_reproduction() -> Result<String, String> {
    let start = Instant::now();
    let ex = worked_example().map_err(err)?;
    let elapsed = start.elapsed();
    ensure(ex.square_matches, || "A^2 differs from the printed matrix".into())?;
    for c in &ex.checks {
        ensure(c.pass && (c.value - c.expected).abs() <= 1e-3, || {
            format!("{}: {} vs {}", c.label, c.value, c.expected)
        })?;
    }
    within(elapsed, Duration::from_secs(1))?;
    let v: Vec<String> = ex.checks.iter().map(|c| format!("{:.4}", c.value)).collect();
    Ok(format!("{} in {elapsed:.2?}", v.join(" <= ")))
}

fn soundness_sweep() -> Result<String, String> {
    let start = Instant::now();
    let all = Selection::all();
    let mut results = 0;
    let mut violations = Vec::new();
    for kind in EnsembleKind::ALL {
        for n in 2..=12 {
            let spec = EnsembleSpec::new(kind, n, 250, 20_240_601 + n as u64).map_err(err)?;
            let s = verify(&spec, &all, tol::VERIFY).map_err(err)?;
            results += s.total_results;
            if s.total_violations > 0 {
                violations.push(format!("{kind} n={n}: {} ({:?})", s.total_violations, s.violations.first()));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(violations.is_empty(), || violations.join("; "))?;
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("{results} results, 0 violations in {elapsed:.2?}"))
}

fn oracle_certification() -> Result<String, String> {
    let mut worst_residual: f64 = 0.0;
    let mut worst_match: f64 = 0.0;
    for k in 0..1000 {
        let n = 1 + k % 32;
        let a = sample(EnsembleKind::HermitianGaussian, n, &mut trial_rng(31, k)).map_err(err)?;
        let e = eigh(&a).map_err(err)?;
        let residual = e.max_residual / a.scale();
        ensure(residual <= 1e-10, || format!("residual {residual:e} at trial {k}"))?;
        let h = eig_hermitian(&a).map_err(err)?;
        let g = eig_general(&a).map_err(err)?;
        let m = matching_distance(h.values(), g.values()) / a.frobenius_norm().max(1.0);
        ensure(m <= 1e-8, || format!("Jacobi/QR mismatch {m:e} at trial {k}"))?;
        worst_residual = worst_residual.max(residual);
        worst_match = worst_match.max(m);
    }
    for k in 0..1000 {
        let n = 1 + k % 32;
        let mut rng = trial_rng(32, k);
        let a = sample(EnsembleKind::HermitianGaussian, n, &mut rng).map_err(err)?;
        let b = sample(EnsembleKind::HermitianGaussian, n, &mut rng).map_err(err)?;
        let (lo, hi) = weyl_interval(&a, &b).map_err(err)?;
        let norm = spectral_norm(&(&a - &b)).map_err(err)?;
        ensure(lo <= norm + 1e-9 && norm <= hi + 1e-9, || {
            format!("Weyl sandwich {lo} <= {norm} <= {hi} fails at pair {k}")
        })?;
    }
    Ok(format!(
        "max relative residual {worst_residual:.1e}, max matching {worst_match:.1e}, 1000 Weyl pairs"
    ))
}

fn normal_geometry() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = 1 + k % 8;
        let mut rng = trial_rng(41, k);
        let a = sample(EnsembleKind::NormalUnitaryConjugated, n, &mut rng).map_err(err)?;
        let b = sample(EnsembleKind::NormalUnitaryConjugated, n, &mut rng).map_err(err)?;
        let s = s_numerical_range(&a, &b, 720).map_err(err)?;
        let exact = max_pairwise_eig_distance(&eig_general(&a).map_err(err)?, &eig_general(&b).map_err(err)?);
        let scale = 1f64.max(spectral_norm(&a).map_err(err)? + spectral_norm(&b).map_err(err)?);
        let gap = (s - exact).abs() / scale;
        ensure(gap <= 1e-3, || format!("range gap {s} vs {exact} at pair {k}"))?;
        worst = worst.max(gap);
    }
    Ok(format!("200 pairs, max scaled gap {worst:.1e}"))
}

fn refinement_chains() -> Result<String, String> {
    const SLACK: f64 = -1e-10;
    let kinds = [
        EnsembleKind::HermitianGaussian,
        EnsembleKind::NormalUnitaryConjugated,
        EnsembleKind::Psd,
        EnsembleKind::Circulant,
    ];
    let mut premise_cases = 0;
    for k in 0..500 {
        let kind = kinds[k % kinds.len()];
        let n = 2 + k % 11;
        let a = sample(kind, n, &mut trial_rng(51, k)).map_err(err)?;
        let pair = Pair::single(&a);

        let hull = bounds::diag_hull_spread(&pair).map_err(err)?;
        let (top, mid, low) = (hull.exact, hull.bound, hull.extra["diag_spread"]);
        ensure(top - mid >= SLACK && mid - low >= SLACK, || {
            format!("diagonal chain {top} >= {mid} >= {low} fails at {kind} #{k}")
        })?;

        let avg = bounds::spread_complement_average(&pair).map_err(err)?;
        let (top, mid, low) = (avg.exact, avg.bound, avg.extra["offdiag_bound"]);
        ensure(top - mid >= SLACK && mid - low >= SLACK, || {
            format!("complement chain {top} >= {mid} >= {low} fails at {kind} #{k}")
        })?;

        if kind == EnsembleKind::Psd {
            for phi in PulFunctional::catalog(n) {
                let r = bounds::variance_refined(&pair, &phi, None).map_err(err)?;
                if !r.applicable {
                    continue;
                }
                premise_cases += 1;
                let (refined, baseline) = (r.bound, r.extra["baseline"]);
                ensure(refined - baseline >= SLACK * refined.max(1.0), || {
                    format!("refined {refined} < baseline {baseline} for {phi} at #{k}")
                })?;
                ensure(r.holds(1e-10), || format!("refined bound exceeds width for {phi} at #{k}: {r:?}"))?;
            }
        }
    }
    ensure(premise_cases > 0, || "premise never held; refined chain untested".into())?;
    Ok(format!("500 instances, {premise_cases} refined cases with premise"))
}

fn pulm_validation() -> Result<String, String> {
    let mut checked = 0;
    for n in [1, 2, 3, 5, 8] {
        let mut maps: Vec<Box<dyn MatrixMap>> = Vec::new();
        for phi in PulFunctional::catalog(n) {
            maps.push(Box::new(phi));
        }
        for m in PulMap::catalog(n) {
            maps.push(Box::new(m));
        }
        for (k, m) in maps.iter().enumerate() {
            let r = validate_pulm(m.as_ref(), 500, 61 + k as u64).map_err(err)?;
            ensure(
                r.unitality_defect <= 1e-12 && r.positivity_violation <= 1e-10 && r.linearity_defect <= 1e-12,
                || format!("{} fails: {r:?}", m.label()),
            )?;
            checked += 1;
        }
    }
    let doubled = FnMap {
        n_in: 3,
        n_out: 3,
        label: "2A".to_string(),
        f: |x: &ComplexMatrix| x.scaled_real(2.0),
    };
    let r = validate_pulm(&doubled, 500, 7).map_err(err)?;
    ensure(!r.pass && r.unitality_defect > 1e-12, || format!("negative control passed: {r:?}"))?;
    Ok(format!("{checked} maps pass, A -> 2A rejected (unitality defect {:.2})", r.unitality_defect))
}

fn fixture(name: &str) -> Result<ComplexMatrix, String> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    read_matrix_market(&path).map_err(|e| format!("{}: {e}", path.display()))
}

fn tightness_witnesses() -> Result<String, String> {
    let mut lines = Vec::new();
    for (base, mean) in [
        ("example_3x3.mtx", "example_3x3_trace_mean.mtx"),
        ("hermitian_4x4.mtx", "hermitian_4x4_trace_mean.mtx"),
    ] {
        let a = fixture(base)?;
        let c = fixture(mean)?;
        let n = a.n() as f64;
        let expected_mean = a.trace() / n;
        ensure((&c - &ComplexMatrix::scalar(a.n(), expected_mean)).frobenius_norm() <= 1e-15, || {
            format!("{mean} is not tr(A)/n I")
        })?;

        let same = Pair::new(&a, &a).map_err(err)?;
        let at_a = trace_complement_gap(&same).map_err(err)?;
        let closed = n / (n - 1.0) * spectral_norm(&a.centered()).map_err(err)?;
        ensure((at_a.bound - closed).abs() <= 1e-12 * closed.max(1.0), || {
            format!("{base}: B = A gives {} instead of {closed}", at_a.bound)
        })?;
        let weyl_at_a = weyl_lower(&same).map_err(err)?.bound;
        ensure(at_a.bound > weyl_at_a, || format!("{base}: no witness at B = A"))?;

        let scalar = Pair::new(&a, &c).map_err(err)?;
        let at_c = trace_complement_gap(&scalar).map_err(err)?;
        let weyl_at_c = weyl_lower(&scalar).map_err(err)?.bound;
        let direct = spectral_norm(&(&a - &c)).map_err(err)?;
        ensure(at_c.bound <= weyl_at_c + 1e-12 && at_c.bound <= direct + 1e-12, || {
            format!("{base}: B = tr(A)/n I gives {} > {weyl_at_c}", at_c.bound)
        })?;
        lines.push(format!(
            "{base}: {:.4} > {:.4} at B = A, {:.4} <= {:.4} at scalar B",
            at_a.bound, weyl_at_a, at_c.bound, weyl_at_c
        ));
    }
    Ok(lines.join("; "))
}

fn determinism() -> Result<String, String> {
    let all = Selection::all();
    let mut bytes = 0;
    for kind in EnsembleKind::ALL {
        let spec = EnsembleSpec::new(kind, 7, 24, 8).map_err(err)?;
        let runs = [
            verify_with_threads(&spec, &all, tol::VERIFY, 1),
            verify_with_threads(&spec, &all, tol::VERIFY, 4),
            verify_with_threads(&spec, &all, tol::VERIFY, 4),
        ];
        let mut texts = Vec::new();
        for r in runs {
            texts.push(serde_json::to_string_pretty(&r.map_err(err)?).map_err(err)?);
        }
        ensure(texts.iter().all(|t| t == &texts[0]), || format!("{kind}: JSON differs between runs"))?;
        bytes += texts[0].len();
    }
    Ok(format!("4 ensembles identical across 1/4/4 threads ({bytes} bytes)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("worked example reproduction", example_reproduction),
        ("soundness sweep", soundness_sweep),
        ("oracle certification", oracle_certification),
        ("normal-case geometry", normal_geometry),
        ("refinement chains", refinement_chains),
        ("PULM validation", pulm_validation),
        ("tightness witnesses", tightness_witnesses),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {} {name}: {reason}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
