//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rblse_cli::experiments::{
    run_accuracy, run_benchmark, run_perturbation, run_recovery, ExperimentConfig, ACCURACY_THRESHOLD_LOG10,
    RECOVERY_THRESHOLD,
};
use rblse_cli::verify::{check_flop_ordering, check_oracle_equivalence, check_representation, check_transfer, CheckOutcome};

const SEED: u64 = 20_250_101;

struct Line {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn from_check(id: usize, name: &'static str, c: CheckOutcome) -> Line {
    Line {
        id,
        name,
        passed: c.passed(),
        detail: format!(
            "{} cases, {} failures, worst {:.3e} (<= {:.0e}) {}",
            c.cases, c.failures, c.worst, c.threshold, c.detail
        ),
    }
}

fn accuracy() -> Line {
    let rows = run_accuracy(&ExperimentConfig::accuracy_default());
    let worst = rows.iter().flat_map(|r| r.values()).fold(f64::NEG_INFINITY, f64::max);
    let errors: Vec<_> = rows.iter().filter_map(|r| r.error.clone()).collect();
    Line {
        id: 1,
        name: "accuracy t=1,3,5,7,9",
        passed: rows.len() == 5 && rows.iter().all(|r| r.passes() && r.values().count() == 4),
        detail: format!("worst log10 measure {worst:.2} (< {ACCURACY_THRESHOLD_LOG10}); errors {errors:?}"),
    }
}

fn recovery() -> Line {
    let rows = run_recovery(&ExperimentConfig::accuracy_default());
    let worst = rows
        .iter()
        .flat_map(|r| [r.eps_r, r.eps_c])
        .flatten()
        .fold(0.0, f64::max);
    Line {
        id: 2,
        name: "recovery t=1,3,5,7,9",
        passed: rows.len() == 5 && rows.iter().all(|r| r.passes() && r.eps_r.is_some() && r.eps_c.is_some()),
        detail: format!("worst error {worst:.3e} (< {RECOVERY_THRESHOLD:.0e})"),
    }
}

fn perturbation() -> Line {
    let cfg = ExperimentConfig::perturbation_default();
    let expected = cfg.ts.len() * cfg.eps.len() * cfg.trials * cfg.modes.len();
    let table = run_perturbation(&cfg);
    let checked = table.trials.iter().filter(|t| !t.flagged()).count();
    let within = table.trials.iter().filter(|t| !t.flagged() && t.within_bound()).count();
    let min_ratio = table.rows.iter().map(|r| r.ratio_min).fold(f64::INFINITY, f64::min);
    Line {
        id: 3,
        name: "perturbation bound, t={1,5,9} x eps={1e-13,1e-10,1e-7}",
        passed: table.errors() == 0 && checked == expected && within == checked,
        detail: format!(
            "{within}/{checked} trials within bound (expected {expected}), min bound/error {min_ratio:.3e}, cell errors {}",
            table.errors()
        ),
    }
}

fn cost_model() -> Line {
    let flops = check_flop_ordering(1..=9);
    let cfg = ExperimentConfig {
        ts: vec![3, 5, 7, 9],
        ..ExperimentConfig::benchmark_default()
    };
    let rows = run_benchmark(&cfg);
    let soft: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "t={} {:.2e}/{:.2e}{}",
                r.t,
                r.median_real.unwrap_or(f64::NAN),
                r.median_complex.unwrap_or(f64::NAN),
                if r.real_faster() == Some(true) { "" } else { " (flag)" }
            )
        })
        .collect();
    Line {
        id: 7,
        name: "cost model ordering",
        passed: flops.passed(),
        detail: format!(
            "flop ordering {}/9; soft median t_r/t_c [{}]",
            flops.cases - flops.failures.min(flops.cases),
            soft.join(", ")
        ),
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let criteria: Vec<Box<dyn Fn() -> Line>> = vec![
        Box::new(accuracy),
        Box::new(recovery),
        Box::new(perturbation),
        Box::new(|| from_check(4, "oracle equivalence", check_oracle_equivalence(100, SEED))),
        Box::new(|| from_check(5, "representation identities", check_representation(200, SEED))),
        Box::new(|| from_check(6, "residual/constraint transfer", check_transfer(100, SEED))),
        Box::new(cost_model),
    ];
    for run in criteria {
        let start = Instant::now();
        let line = run();
        all &= line.passed;
        println!(
            "{} [{}] {}: {} ({:.1}s)",
            if line.passed { "PASS" } else { "FAIL" },
            line.id,
            line.name,
            line.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
