//! Acceptance suite: criteria 1–10 of the specification, one PASS/FAIL line
//! per criterion. Runs as a plain binary (`harness = false`) so the lines are
//! always visible in `cargo test` output; exits nonzero when any fails.
//!
//! Optional positional arguments select criteria by number
//! (`cargo test --test acceptance -- 6 9`).

use std::process::ExitCode;

use growup_core::verify::{Recipe, VerifyReport};

const CRITERIA: [(u8, &str); 10] = [
    (1, "critical length L*(N)"),
    (2, "explicit stationary profile sin r / r"),
    (3, "eigen-rate lambda0(L) consistency"),
    (4, "self-similar profile asymptotics"),
    (5, "boundedness dichotomy at p = m, N = 3"),
    (6, "natural rate t^{1/(1-m)} for p = m < 1"),
    (7, "log-power rate for m = 1, p < 1, N = 2"),
    (8, "exponential rate lambda0 for m = p = 1"),
    (9, "outside-ball rate split for m < p = 1"),
    (10, "property suites"),
];

fn recipe_for(criterion: u8) -> Recipe {
    Recipe::ALL.into_iter().find(|r| r.criterion() == Some(criterion)).expect("every criterion has a recipe")
}

fn main() -> ExitCode {
    let selected: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |c: u8| selected.is_empty() || selected.contains(&c);
    println!("\nrunning acceptance criteria");
    let mut reports: Vec<(u8, VerifyReport)> = Vec::new();
    let mut failures = 0;
    for (c, title) in CRITERIA {
        if !wanted(c) {
            continue;
        }
        let mut report = recipe_for(c).run();
        if c == 10 {
            // the flat bound must hold across the whole verify battery
            let battery: Vec<_> = reports
                .iter()
                .flat_map(|(_, r)| r.checks_named("flat-bound/").into_iter().cloned().map(|mut k| {
                    k.name = format!("{}:{}", r.recipe, k.name);
                    k
                }))
                .collect();
            let extra = battery.len();
            report.checks.extend(battery);
            report.pass = report.checks.iter().filter(|k| k.gating).all(|k| k.pass);
            println!("  (criterion 10 includes {extra} flat-bound checks from the criterion 5-9 runs)");
        }
        let status = if report.pass { "PASS" } else { "FAIL" };
        println!("criterion {c:>2}: {status} - {title} | {}", report.summary_line());
        if !report.pass {
            failures += 1;
        }
        reports.push((c, report));
    }
    let total = reports.len();
    println!("\nacceptance result: {} passed; {failures} failed; {total} criteria", total - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
