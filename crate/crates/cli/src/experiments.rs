//! Accuracy, perturbation, recovery and timing experiments on the
//! `m = 30t, n = 10t, p = 2t, d = 2` problem schedule.
//!
//! Trial `k` at scale `t` uses the seed [`trial_seed`]`(base, t, k)`, so any
//! row can be replayed from the base seed alone. Trials run in parallel;
//! results are ordered by `(t, trial)` regardless of scheduling. Timing runs
//! are sequential.

use std::time::Instant;

use rayon::prelude::*;
use rblse_core::flops::flop_estimate;
use rblse_core::generate::{generate_consistent_problem, generate_random_problem, schedule};
use rblse_core::perturbation::bound;
use rblse_core::solver::{solve, Dims};
use rblse_core::{measure_eps, perturb, Mode, PerturbationSpec, Result};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default for timing and perturbation cells.
pub const DEFAULT_TRIALS: usize = 50;
/// Default for accuracy and recovery (worst case over the trials is kept).
pub const DEFAULT_TRIALS_ACCURACY: usize = 5;
pub const DEFAULT_SEED: u64 = 20_250_101;

pub const ACCURACY_THRESHOLD_LOG10: f64 = -12.0;
pub const RECOVERY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub ts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub eps: Vec<f64>,
    pub modes: Vec<Mode>,
}

impl ExperimentConfig {
    pub fn accuracy_default() -> Self {
        ExperimentConfig {
            ts: vec![1, 3, 5, 7, 9],
            trials: DEFAULT_TRIALS_ACCURACY,
            seed: DEFAULT_SEED,
            eps: Vec::new(),
            modes: Mode::BOTH.to_vec(),
        }
    }

    pub fn perturbation_default() -> Self {
        ExperimentConfig {
            ts: vec![1, 5, 9],
            trials: DEFAULT_TRIALS,
            eps: vec![1e-13, 1e-10, 1e-7],
            ..Self::accuracy_default()
        }
    }

    pub fn benchmark_default() -> Self {
        ExperimentConfig {
            ts: (1..=9).collect(),
            trials: DEFAULT_TRIALS,
            ..Self::accuracy_default()
        }
    }

    fn has(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }

    fn tasks(&self) -> Vec<(usize, usize)> {
        self.ts
            .iter()
            .flat_map(|&t| (0..self.trials).map(move |k| (t, k)))
            .collect()
    }
}

/// Seed of trial `trial` at scale `t`. Generators may add up to 8 on
/// rank-deficient draws, which stays clear of the next trial's seed.
pub fn trial_seed(base: u64, t: usize, trial: usize) -> u64 {
    base.wrapping_add((t as u64) << 32).wrapping_add((trial as u64) << 4)
}

fn worst(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AccuracyRow {
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    /// Worst-case `log10` measures over the trials (eps1..eps4).
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub eps3: Option<f64>,
    pub eps4: Option<f64>,
    pub mean_seconds_real: Option<f64>,
    pub mean_seconds_complex: Option<f64>,
    pub error: Option<String>,
}

impl AccuracyRow {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        [self.eps1, self.eps2, self.eps3, self.eps4].into_iter().flatten()
    }

    pub fn passes(&self) -> bool {
        self.error.is_none() && self.values().all(|v| v < ACCURACY_THRESHOLD_LOG10)
    }
}

struct AccuracyTrial {
    real: Option<(f64, f64, f64)>,
    complex: Option<(f64, f64, f64)>,
}

pub fn run_accuracy(config: &ExperimentConfig) -> Vec<AccuracyRow> {
    let results: Vec<(usize, Result<AccuracyTrial>)> = config
        .tasks()
        .into_par_iter()
        .map(|(t, k)| {
            let run = || -> Result<AccuracyTrial> {
                let g = generate_random_problem(t, trial_seed(config.seed, t, k))?;
                let one = |mode| -> Result<Option<(f64, f64, f64)>> {
                    if !config.has(mode) {
                        return Ok(None);
                    }
                    let s = solve(&g.problem, mode)?;
                    Ok(Some((s.metrics.residual_consistency, s.metrics.constraint, s.seconds)))
                };
                Ok(AccuracyTrial {
                    real: one(Mode::Real)?,
                    complex: one(Mode::Complex)?,
                })
            };
            (t, run())
        })
        .collect();

    config
        .ts
        .iter()
        .map(|&t| {
            let mut row = AccuracyRow {
                t,
                trials: config.trials,
                seed: config.seed,
                eps1: None,
                eps2: None,
                eps3: None,
                eps4: None,
                mean_seconds_real: None,
                mean_seconds_complex: None,
                error: None,
            };
            let mut trials = Vec::new();
            for (_, r) in results.iter().filter(|(tt, _)| *tt == t) {
                match r {
                    Ok(tr) => trials.push(tr),
                    Err(e) => {
                        row.error = Some(e.to_string());
                        return row;
                    }
                }
            }
            let real: Vec<_> = trials.iter().filter_map(|tr| tr.real).collect();
            let complex: Vec<_> = trials.iter().filter_map(|tr| tr.complex).collect();
            if !real.is_empty() {
                row.eps1 = Some(worst(real.iter().map(|v| v.0)));
                row.eps2 = Some(worst(real.iter().map(|v| v.1)));
                row.mean_seconds_real = Some(mean(&real.iter().map(|v| v.2).collect::<Vec<_>>()));
            }
            if !complex.is_empty() {
                row.eps3 = Some(worst(complex.iter().map(|v| v.0)));
                row.eps4 = Some(worst(complex.iter().map(|v| v.1)));
                row.mean_seconds_complex = Some(mean(&complex.iter().map(|v| v.2).collect::<Vec<_>>()));
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationTrial {
    pub t: usize,
    pub mode: Mode,
    pub eps_target: f64,
    pub eps_measured: f64,
    pub trial: usize,
    pub seed: u64,
    pub forward_error: f64,
    pub bound: f64,
}

impl PerturbationTrial {
    /// Zero-`eps` cells only carry solver noise and are not checked.
    pub fn flagged(&self) -> bool {
        self.eps_target == 0.0
    }

    pub fn within_bound(&self) -> bool {
        self.forward_error <= self.bound
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationRow {
    pub t: usize,
    pub mode: Mode,
    pub eps_target: f64,
    pub eps_measured_max: f64,
    pub trials: usize,
    pub seed: u64,
    pub forward_error_max: f64,
    pub bound_max: f64,
    /// Smallest `bound / forward_error` over the trials.
    pub ratio_min: f64,
    pub ratio_median: f64,
    pub violations: usize,
    /// Set for `eps = 0` cells, which are excluded from the check.
    pub flagged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct PerturbationTable {
    pub rows: Vec<PerturbationRow>,
    pub trials: Vec<PerturbationTrial>,
}

impl PerturbationTable {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.flagged).map(|r| r.violations).sum()
    }

    pub fn errors(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn perturbation_trial(t: usize, eps: f64, k: usize, base: u64, modes: &[Mode]) -> Result<Vec<PerturbationTrial>> {
    let seed = trial_seed(base, t, k);
    let g = generate_random_problem(t, seed)?;
    let pert = perturb(&g.problem, PerturbationSpec { eps, seed: seed ^ 0x5eed_0000 })?;
    let measured = measure_eps(&g.problem, &pert)?;
    modes
        .iter()
        .map(|&mode| {
            let x = solve(&g.problem, mode)?.x;
            let x_hat = solve(&pert, mode)?.x;
            let mut rep = bound(&g.problem, &x, measured)?;
            let fe = rep.record_forward_error(&x, &x_hat)?;
            Ok(PerturbationTrial {
                t,
                mode,
                eps_target: eps,
                eps_measured: measured,
                trial: k,
                seed: g.seed,
                forward_error: fe.value,
                bound: rep.bound,
            })
        })
        .collect()
}

/// For every `(t, eps)` cell: generate, solve, perturb, re-solve, and
/// compare the forward error against the first-order bound, per trial.
pub fn run_perturbation(config: &ExperimentConfig) -> PerturbationTable {
    let tasks: Vec<(usize, f64, usize)> = config
        .ts
        .iter()
        .flat_map(|&t| {
            config
                .eps
                .iter()
                .flat_map(move |&e| (0..config.trials).map(move |k| (t, e, k)))
        })
        .collect();
    type CellResult = ((usize, f64), Result<Vec<PerturbationTrial>>);
    let results: Vec<CellResult> = tasks
        .into_par_iter()
        .map(|(t, e, k)| ((t, e), perturbation_trial(t, e, k, config.seed, &config.modes)))
        .collect();

    let mut table = PerturbationTable::default();
    for &t in &config.ts {
        for &eps in &config.eps {
            let cell: Vec<_> = results.iter().filter(|(key, _)| *key == (t, eps)).map(|(_, r)| r).collect();
            let failure = cell.iter().find_map(|r| r.as_ref().err()).map(|e| e.to_string());
            let trials: Vec<PerturbationTrial> =
                cell.iter().filter_map(|r| r.as_ref().ok()).flatten().cloned().collect();
            for &mode in &config.modes {
                let mine: Vec<&PerturbationTrial> = trials.iter().filter(|tr| tr.mode == mode).collect();
                let ratios: Vec<f64> = mine.iter().map(|tr| tr.bound / tr.forward_error).collect();
                let worst_trial = mine.iter().max_by(|a, b| a.forward_error.total_cmp(&b.forward_error));
                table.rows.push(PerturbationRow {
                    t,
                    mode,
                    eps_target: eps,
                    eps_measured_max: worst(mine.iter().map(|tr| tr.eps_measured)),
                    trials: mine.len(),
                    seed: config.seed,
                    forward_error_max: worst_trial.map_or(f64::NAN, |tr| tr.forward_error),
                    bound_max: worst(mine.iter().map(|tr| tr.bound)),
                    ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                    ratio_median: median(&ratios),
                    violations: mine.iter().filter(|tr| !tr.within_bound()).count(),
                    flagged: eps == 0.0,
                    error: failure.clone(),
                });
            }
            table.trials.extend(trials);
        }
    }
    table
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryRow {
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    /// Worst `||X_R - X_hat||_F` over the trials.
    pub eps_r: Option<f64>,
    pub eps_c: Option<f64>,
    pub error: Option<String>,
}

impl RecoveryRow {
    pub fn passes(&self) -> bool {
        self.error.is_none() && [self.eps_r, self.eps_c].into_iter().flatten().all(|v| v < RECOVERY_THRESHOLD)
    }
}

pub fn run_recovery(config: &ExperimentConfig) -> Vec<RecoveryRow> {
    let results: Vec<(usize, Mode, Result<f64>)> = config
        .tasks()
        .into_par_iter()
        .flat_map_iter(|(t, k)| {
            config.modes.iter().map(move |&mode| {
                let run = || -> Result<f64> {
                    let (g, x) = generate_consistent_problem(t, trial_seed(config.seed, t, k), mode)?;
                    solve(&g.problem, mode)?.x.distance(&x)
                };
                (t, mode, run())
            })
        })
        .collect();

    config
        .ts
        .iter()
        .map(|&t| {
            let mut row = RecoveryRow {
                t,
                trials: config.trials,
                seed: config.seed,
                eps_r: None,
                eps_c: None,
                error: None,
            };
            for &mode in &config.modes {
                let mut vals = Vec::new();
                for (_, _, r) in results.iter().filter(|(tt, m, _)| *tt == t && *m == mode) {
                    match r {
                        Ok(v) => vals.push(*v),
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                let w = (!vals.is_empty()).then(|| worst(vals.into_iter()));
                match mode {
                    Mode::Real => row.eps_r = w,
                    Mode::Complex => row.eps_c = w,
                }
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean_real: Option<f64>,
    pub median_real: Option<f64>,
    pub mean_complex: Option<f64>,
    pub median_complex: Option<f64>,
    pub flops_real: u128,
    pub flops_complex: u128,
    pub error: Option<String>,
}

impl BenchmarkRow {
    /// `median t_r < median t_c`, when both modes were timed.
    pub fn real_faster(&self) -> Option<bool> {
        Some(self.median_real? < self.median_complex?)
    }
}

/// Times both solvers sequentially with a monotonic clock. One untimed
/// warm-up solve per mode precedes the trials at each `t`.
pub fn run_benchmark(config: &ExperimentConfig) -> Vec<BenchmarkRow> {
    config
        .ts
        .iter()
        .map(|&t| {
            let Dims { m, n, p, d } = schedule(t);
            let mut row = BenchmarkRow {
                t,
                trials: config.trials,
                seed: config.seed,
                mean_real: None,
                median_real: None,
                mean_complex: None,
                median_complex: None,
                flops_real: flop_estimate(Mode::Real, m, n, p, d).unwrap_or(0),
                flops_complex: flop_estimate(Mode::Complex, m, n, p, d).unwrap_or(0),
                error: None,
            };
            let run = |row: &mut BenchmarkRow| -> Result<()> {
                let problems = (0..config.trials)
                    .map(|k| generate_random_problem(t, trial_seed(config.seed, t, k)).map(|g| g.problem))
                    .collect::<Result<Vec<_>>>()?;
                for &mode in &config.modes {
                    if let Some(first) = problems.first() {
                        solve(first, mode)?;
                    }
                    let mut times = Vec::with_capacity(problems.len());
                    for prob in &problems {
                        let start = Instant::now();
                        let sol = solve(prob, mode)?;
                        times.push(start.elapsed().as_secs_f64());
                        std::hint::black_box(sol);
                    }
                    let (mu, med) = (Some(mean(&times)), Some(median(&times)));
                    match mode {
                        Mode::Real => (row.mean_real, row.median_real) = (mu, med),
                        Mode::Complex => (row.mean_complex, row.median_complex) = (mu, med),
                    }
                }
                Ok(())
            };
            if let Err(e) = run(&mut row) {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect()
}
