//! Acceptance gate. Runs every criterion at its stated scale and tolerance,
//! prints one PASS/FAIL line each, and exits nonzero if any fails.
//!
//! Field arithmetic is exact, so every equality check here has zero tolerance.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bgc_core::algebra::DEFAULT_MODULUS;
use bgc_core::harness::{
    simulate, sweep, verify_cauchy, verify_ecc, verify_lemma3, verify_optimality,
    verify_remark1, verify_vandermonde, AdversarySpec, GridSpec, SimulationConfig, StrategyName,
    VerifyReport, LEMMA3_INSTANCES,
};
use bgc_core::par::Execution;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_report(report: VerifyReport) -> Outcome {
    let mut detail = format!(
        "{} checks, {} counterexamples",
        report.checks,
        report.counterexamples.len()
    );
    if let Some(first) = report.counterexamples.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    Outcome {
        passed: report.passed(),
        detail,
    }
}

fn worked_example() -> Outcome {
    let config = SimulationConfig {
        n: 3,
        s: 1,
        u: 1,
        p: 3,
        d: 1,
        q: 7,
        adversary: AdversarySpec::named(StrategyName::WorkedExample),
        ..SimulationConfig::default()
    };
    let start = Instant::now();
    let out = simulate(&config);
    let elapsed = start.elapsed();
    match out {
        Ok(out) => {
            let m = out.metrics;
            let passed = m.correct
                && m.eliminated == [3]
                && m.c == 1
                && m.c_oh <= 6
                && elapsed < Duration::from_secs(1);
            Outcome {
                passed,
                detail: format!(
                    "correct={} eliminated={:?} c={} C_oh={} (limit 6) in {:.1?}",
                    m.correct, m.eliminated, m.c, m.c_oh, elapsed
                ),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("run failed: {e}"),
        },
    }
}

fn bound_suite() -> Outcome {
    let grid = GridSpec::default();
    let start = Instant::now();
    let report = sweep(&grid, Execution::Parallel);
    let elapsed = start.elapsed();
    let s = &report.summary;
    let mut detail = format!(
        "{} runs ({} grid points rejected as infeasible), {} incorrect, {} bound violations, {} aborted, max c={} max C_oh={} max rounds={} in {:.1?}",
        s.runs,
        report.rejected.len(),
        s.incorrect,
        s.bound_violations,
        s.failures,
        s.max_c,
        s.max_c_oh,
        s.max_rounds,
        elapsed
    );
    if let Some(bad) = report.failing().next() {
        detail.push_str(&format!("; first failure: {}", bad.csv_row()));
    }
    Outcome {
        passed: report.passed() && s.runs > 0 && elapsed < Duration::from_secs(120),
        detail,
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked example", worked_example),
        ("bound suite", bound_suite),
        ("grouping resists s_t errors", || {
            from_report(verify_lemma3(&LEMMA3_INSTANCES, Execution::Parallel))
        }),
        ("s_t groups are symmetrizable", || {
            from_report(verify_optimality(&LEMMA3_INSTANCES, Execution::Parallel))
        }),
        ("vandermonde closed form", || {
            from_report(verify_vandermonde(200, &[101, DEFAULT_MODULUS], Execution::Parallel))
        }),
        ("cauchy-like determinant", || {
            from_report(verify_cauchy(1000, Execution::Parallel))
        }),
        ("ecc path", || from_report(verify_ecc(Execution::Parallel))),
        ("restricted encoding", || {
            from_report(verify_remark1(500, Execution::Parallel))
        }),
    ];

    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let verdict = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {} ({name}): {verdict}: {}", k + 1, out.detail);
        if !out.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
