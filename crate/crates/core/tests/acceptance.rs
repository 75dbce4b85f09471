//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use centroaffine::verify::{run_suite, SuiteReport, VerifyConfig};
use std::time::{Duration, Instant};

const CRITERIA: [(u8, &str); 11] = [
    (1, "monodromy oracle"),
    (2, "integral oracle"),
    (3, "c-relation conservation"),
    (4, "Bianchi permutability"),
    (5, "recutting algebra"),
    (6, "closed-polygon relations"),
    (7, "dressing-chain flow"),
    (8, "symplectic and Hamiltonian checks"),
    (9, "center theory"),
    (10, "small-gon theorems"),
    (11, "porism"),
];

/// Wall-clock budget for the monodromy oracle.
const MONODROMY_BUDGET: Duration = Duration::from_secs(5);

fn timed(suite: &str, cfg: &VerifyConfig) -> (SuiteReport, Duration) {
    let start = Instant::now();
    let report = run_suite(suite, cfg).unwrap_or_else(|e| panic!("suite {suite}: {e}"));
    (report, start.elapsed())
}

fn main() {
    let cfg = VerifyConfig::default();
    let suites = ["core", "lax", "integrals", "recutting", "symplectic", "smallgons"];
    let mut reports = Vec::new();
    let mut core_time = Duration::ZERO;
    for suite in suites {
        let (r, t) = timed(suite, &cfg);
        if suite == "core" {
            core_time = t;
        }
        reports.push(r);
    }

    let mut failures = 0;
    for (k, title) in CRITERIA {
        let props: Vec<_> = reports.iter().flat_map(|r| r.criterion(k)).collect();
        let mut ok = !props.is_empty() && props.iter().all(|p| p.passed);
        let mut extra = String::new();
        if k == 1 {
            ok &= core_time < MONODROMY_BUDGET;
            extra = format!(", core suite {:.2} s (budget {} s)", core_time.as_secs_f64(), MONODROMY_BUDGET.as_secs());
        }
        // Properties carry different tolerances, so report the tightest margin.
        let ratio = props.iter().filter(|p| p.tolerance > 0.0).map(|p| p.worst_residual / p.tolerance).fold(0.0f64, f64::max);
        let exact = props.iter().filter(|p| p.tolerance == 0.0).count();
        let trials: usize = props.iter().map(|p| p.trials - p.skipped).sum();
        println!(
            "criterion {k:>2} {}: {title}: {} properties ({exact} exact), {trials} trials, worst residual/tolerance {ratio:.3}{extra}",
            if ok { "PASS" } else { "FAIL" },
            props.len(),
        );
        for p in props.iter().filter(|p| !p.passed) {
            println!("    {} failed: worst {:.3e} against tolerance {:.1e}; {}", p.name, p.worst_residual, p.tolerance, p.note);
        }
        if !ok {
            failures += 1;
        }
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failures, CRITERIA.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
