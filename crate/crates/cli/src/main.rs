use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rblse_cli::experiments::{
    run_accuracy, run_benchmark, run_perturbation, run_recovery, ExperimentConfig, DEFAULT_SEED,
};
use rblse_cli::table::{render, Format};
use rblse_cli::verify::run_suite;
use rblse_core::generate::{generate_consistent_problem, generate_random_problem, GENERATOR_VERSION};
use rblse_core::io::{io_read_problem, io_write_problem, io_write_solution, ProblemMetadata};
use rblse_core::solver::solve;
use rblse_core::Mode;

/// Reduced biquaternion equality-constrained least squares: solvers and experiments.
#[derive(Parser)]
#[command(name = "rblse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random problem to a JSON file.
    Generate {
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Make the data consistent (B = AX, D = CX) for a planted X of this kind.
        #[arg(long)]
        consistent: Option<Mode>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a problem file and print its accuracy measures.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        /// Solution file; with `--mode both` the mode name is appended to the stem.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case residual and constraint accuracy per t.
    Accuracy(RunArgs),
    /// Forward error against the first-order bound per (t, eps) cell.
    Perturbation(RunArgs),
    /// Recovery of a planted solution from consistent data.
    Recovery(RunArgs),
    /// Solver timings with flop estimates.
    Benchmark(RunArgs),
    /// Run the seeded invariant suite.
    Verify {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Real,
    Complex,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::Real => vec![Mode::Real],
            ModeArg::Complex => vec![Mode::Complex],
            ModeArg::Both => Mode::BOTH.to_vec(),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scales to run, e.g. `--t 1,3,5`.
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Perturbation sizes, e.g. `--eps 1e-13,1e-10`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eps: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = Format::Text)]
    format: Format,
    /// Also write every perturbation trial to this file.
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self, mut base: ExperimentConfig) -> anyhow::Result<ExperimentConfig> {
        if !self.t.is_empty() {
            base.ts = self.t.clone();
        }
        if base.ts.contains(&0) {
            bail!("t must be positive");
        }
        if let Some(s) = self.seed {
            base.seed = s;
        }
        if let Some(k) = self.trials {
            if k == 0 {
                bail!("--trials must be positive");
            }
            base.trials = k;
        }
        if !self.eps.is_empty() {
            base.eps = self.eps.clone();
        }
        if base.eps.iter().any(|e| !e.is_finite() || *e < 0.0) {
            bail!("eps values must be finite and nonnegative");
        }
        base.modes = self.mode.modes();
        Ok(base)
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        write_or_print(self.out.as_deref(), text)
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn suffixed(path: &Path, mode: Mode) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("solution");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("json");
    path.with_file_name(format!("{stem}.{mode}.{ext}"))
}

/// `Ok(false)` means the run completed but a checked property failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Generate { t, seed, consistent, out } => {
            if t == 0 {
                bail!("t must be positive");
            }
            let g = match consistent {
                Some(mode) => generate_consistent_problem(t, seed, mode)?.0,
                None => generate_random_problem(t, seed)?,
            };
            let dims = g.problem.dims();
            let meta = ProblemMetadata {
                m: dims.m,
                n: dims.n,
                p: dims.p,
                d: dims.d,
                t: Some(t),
                seed: Some(g.seed),
                generator: GENERATOR_VERSION.to_string(),
            };
            io_write_problem(&out, &g.problem, &meta)?;
            eprintln!("wrote {} (t={t}, seed={}, retries={})", out.display(), g.seed, g.retries);
            Ok(true)
        }
        Command::Solve { input, mode, out } => {
            let (prob, _) = io_read_problem(&input).with_context(|| format!("reading {}", input.display()))?;
            let modes = mode.modes();
            for &m in &modes {
                let sol = solve(&prob, m)?;
                println!(
                    "{m}: eps_residual={:e} eps_constraint={:e} residual_norm={:e} seconds={:e}",
                    sol.metrics.residual_consistency, sol.metrics.constraint, sol.residual_norm, sol.seconds
                );
                if let Some(path) = &out {
                    let path = if modes.len() > 1 { suffixed(path, m) } else { path.clone() };
                    io_write_solution(&path, &sol)?;
                }
            }
            Ok(true)
        }
        Command::Accuracy(args) => {
            let rows = run_accuracy(&args.config(ExperimentConfig::accuracy_default())?);
            args.emit(&render(&rows, args.format)?)?;
            let bad = rows.iter().filter(|r| !r.passes()).count();
            if bad > 0 {
                eprintln!("{bad} row(s) with an error or a value >= -12");
            }
            Ok(bad == 0)
        }
        Command::Perturbation(args) => {
            let table = run_perturbation(&args.config(ExperimentConfig::perturbation_default())?);
            args.emit(&render(&table.rows, args.format)?)?;
            if let Some(p) = &args.trials_out {
                write_or_print(Some(p), &render(&table.trials, args.format)?)?;
            }
            let (v, e) = (table.violations(), table.errors());
            if v + e > 0 {
                eprintln!("{v} bound violation(s), {e} cell error(s)");
            }
            Ok(v + e == 0)
        }
        Command::Recovery(args) => {
            let rows = run_recovery(&args.config(ExperimentConfig::accuracy_default())?);
            args.emit(&render(&rows, args.format)?)?;
            let bad = rows.iter().filter(|r| !r.passes()).count();
            if bad > 0 {
                eprintln!("{bad} row(s) with an error or a recovery error >= 1e-12");
            }
            Ok(bad == 0)
        }
        Command::Benchmark(args) => {
            let rows = run_benchmark(&args.config(ExperimentConfig::benchmark_default())?);
            args.emit(&render(&rows, args.format)?)?;
            for r in rows.iter().filter(|r| r.t >= 3 && r.real_faster() == Some(false)) {
                eprintln!("note: median real time not below complex at t={}", r.t);
            }
            Ok(rows.iter().all(|r| r.error.is_none()))
        }
        Command::Verify { cases, seed } => {
            let mut ok = true;
            for c in run_suite(cases, seed) {
                ok &= c.passed();
                println!(
                    "{} {}: {} cases, worst {:e} (threshold {:e}) {}",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.cases,
                    c.worst,
                    c.threshold,
                    c.detail
                );
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
