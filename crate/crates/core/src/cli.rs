//! The `abss` command line: `solve`, `verify` and `interval`.
//!
//! Exit codes: 0 success, 1 usage/IO/validation, 2 incompatible (or
//! ill-conditioned) system, 3 verification gate failure.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use crate::abs::{AbsState, Outcome, Problem, Strategy, Verdict};
use crate::error::Error;
use crate::oracle::{assemble, sample_solutions, McConfig};
use crate::problem_file::{LoadedProblem, ProblemFile, StrategyName};
use crate::report::{IntervalRecord, McRecord, SolveReportFile};
use crate::stochastic::{alpha_interval, solve_s, StochasticProblem, StochasticState};

pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INCOMPATIBLE: i32 = 2;
    pub const GATE_FAILED: i32 = 3;
}

const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "abss",
    version,
    about = "ABS solvers for linear systems with deterministic or Gaussian right-hand sides"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file; Gaussian right-hand sides yield a distribution.
    Solve(SolveArgs),
    /// Solve in closed form, then check the moments by Monte Carlo.
    Verify(VerifyArgs),
    /// Confidence interval for one steplength.
    Interval(IntervalArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Problem file (JSON).
    pub problem: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the strategy named in the problem file.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyName>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Include per-step records.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shift the analytic mean before gating (tests that the gate fires).
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub tamper_mean: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[command(flatten)]
    pub common: Common,
    /// 1-based step.
    #[arg(long)]
    pub step: usize,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<SolveReportFile>,
}

impl Output {
    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            report: None,
        }
    }
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::Incompatible { .. } | Error::IllConditioned { .. } => exit_code::INCOMPATIBLE,
        Error::OracleInconsistency(_) => exit_code::GATE_FAILED,
        _ => exit_code::USAGE,
    }
}

pub fn run(cli: &Cli) -> Output {
    let (common, mut out) = match &cli.command {
        Command::Solve(a) => (&a.common, cmd_solve(a)),
        Command::Verify(a) => (&a.common, cmd_verify(a)),
        Command::Interval(a) => (&a.common, cmd_interval(a)),
    };
    if let (Some(path), Some(report)) = (&common.out, &out.report) {
        if let Err(e) = report.write(path) {
            let _ = writeln!(out.stderr, "error: cannot write {}: {e}", path.display());
            out.code = exit_code::USAGE;
        }
    }
    out
}

struct Loaded {
    file: ProblemFile,
    problem: LoadedProblem,
    strategy: Strategy,
}

fn load(common: &Common) -> Result<Loaded, String> {
    let file = ProblemFile::load(&common.problem).map_err(|e| e.to_string())?;
    let problem = file.to_problem().map_err(|e| e.to_string())?;
    let strategy = common.strategy.unwrap_or(file.strategy).into();
    Ok(Loaded {
        file,
        problem,
        strategy,
    })
}

fn run_deterministic(problem: &Problem, file: &ProblemFile, strategy: &Strategy) -> Result<AbsState, Error> {
    let mut state = AbsState::init(problem, file.initial_iterate(), file.initial_abaffian())?;
    while state.verdict() == Verdict::Running {
        state = state.step(problem, strategy)?;
    }
    Ok(state)
}

fn run_stochastic(
    problem: &StochasticProblem,
    file: &ProblemFile,
    strategy: &Strategy,
) -> Result<StochasticState, Error> {
    let mut state = StochasticState::init(problem, file.initial_iterate(), file.initial_abaffian())?;
    while state.verdict() == Verdict::Running {
        state = state.step(problem, strategy)?;
    }
    Ok(state)
}

pub fn cmd_solve(args: &SolveArgs) -> Output {
    let loaded = match load(&args.common) {
        Ok(l) => l,
        Err(msg) => return Output::fail(exit_code::USAGE, msg),
    };
    let mut stdout = String::new();
    let (report, verdict) = match &loaded.problem {
        LoadedProblem::Deterministic(p) => {
            let state = match run_deterministic(p, &loaded.file, &loaded.strategy) {
                Ok(s) => s,
                Err(e) => return Output::fail(code_for(&e), e),
            };
            if args.trace {
                for rec in state.trace() {
                    let _ = writeln!(
                        stdout,
                        "step {} ({:?}): tau = {:.6}",
                        rec.row + 1,
                        rec.outcome,
                        rec.tau
                    );
                }
            }
            if state.verdict() == Verdict::Solved {
                let _ = writeln!(stdout, "x = {}", fmt_vec(state.x()));
            }
            (
                SolveReportFile::from_deterministic("solve", p, &state, args.trace),
                state.verdict(),
            )
        }
        LoadedProblem::Gaussian(p) => {
            let state = match run_stochastic(p, &loaded.file, &loaded.strategy) {
                Ok(s) => s,
                Err(e) => return Output::fail(code_for(&e), e),
            };
            if args.trace {
                write_stochastic_trace(&mut stdout, p, &state);
            }
            if state.verdict() == Verdict::Solved {
                if let Ok(summary) = state.xi().summary(p.basis()) {
                    let _ = writeln!(stdout, "mean U = {}", fmt_vec(&summary.mean));
                    let _ = writeln!(stdout, "cov Sigma =");
                    for row in summary.cov.row_iter() {
                        let _ = writeln!(stdout, "  {}", fmt_vec(&row.transpose()));
                    }
                }
            }
            (
                SolveReportFile::from_stochastic("solve", p, &state, args.trace),
                state.verdict(),
            )
        }
    };
    finish(stdout, report, verdict)
}

fn finish(mut stdout: String, report: SolveReportFile, verdict: Verdict) -> Output {
    match verdict {
        Verdict::Incompatible { row } => Output {
            code: exit_code::INCOMPATIBLE,
            stdout,
            stderr: format!("error: {}\n", Error::Incompatible { row }),
            report: Some(report),
        },
        _ => {
            let _ = writeln!(
                stdout,
                "solved: rank {}, skipped rows {:?}",
                report.rank.unwrap_or(0),
                report.skipped.iter().map(|r| r + 1).collect::<Vec<_>>()
            );
            Output {
                code: exit_code::SUCCESS,
                stdout,
                stderr: String::new(),
                report: Some(report),
            }
        }
    }
}

fn write_stochastic_trace(out: &mut String, p: &StochasticProblem, state: &StochasticState) {
    let mut accepted = state.accepted().iter();
    for rec in state.trace() {
        let tau = rec.tau.summary(p.basis()).ok();
        let _ = write!(out, "step {} ({:?})", rec.row + 1, rec.outcome);
        if let Some(t) = tau {
            let _ = write!(out, ": tau ~ N({:.6}, {:.6})", t.mean, t.variance);
        }
        if rec.outcome == Outcome::Accepted {
            if let Some(a) = accepted.next() {
                if let Ok(s) = a.alpha.summary(p.basis()) {
                    let _ = write!(out, ", alpha ~ N({:.6}, {:.6})", s.mean, s.variance);
                }
                let _ = write!(out, ", p = {}", fmt_vec(&a.p));
            }
        }
        out.push('\n');
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Output {
    let loaded = match load(&args.common) {
        Ok(l) => l,
        Err(msg) => return Output::fail(exit_code::USAGE, msg),
    };
    let LoadedProblem::Gaussian(p) = &loaded.problem else {
        return Output::fail(exit_code::USAGE, "verify needs a gaussian right-hand side");
    };
    let samples = args.samples.or(loaded.file.samples).unwrap_or(DEFAULT_SAMPLES);
    let seed = args.seed.or(loaded.file.seed).unwrap_or(DEFAULT_SEED);
    let cfg = match McConfig::new(samples, seed) {
        Ok(c) => c,
        Err(e) => return Output::fail(exit_code::USAGE, e),
    };
    let x1 = loaded.file.initial_iterate();
    let h1 = loaded.file.initial_abaffian();
    let mut analytic = match solve_s(p, x1.clone(), h1.clone(), &loaded.strategy) {
        Ok(s) => s,
        Err(e) => return Output::fail(code_for(&e), e),
    };
    let rows: Vec<usize> = analytic.alpha_summaries.iter().map(|(r, _)| *r).collect();
    let emp = match sample_solutions(p, &x1, &h1, &loaded.strategy, &rows, &cfg) {
        Ok(e) => e,
        Err(e) => return Output::fail(code_for(&e), e),
    };
    if let Some(delta) = args.tamper_mean {
        analytic.summary.mean.add_scalar_mut(delta);
    }
    let mc = match assemble(&analytic, &emp) {
        Ok(r) => r,
        Err(e) => return Output::fail(code_for(&e), e),
    };

    let mut report = SolveReportFile::from_stochastic("verify", p, &analytic.state, args.trace);
    report.monte_carlo = Some(McRecord::new(&mc, seed));
    let mut stdout = String::new();
    let _ = writeln!(stdout, "samples: {samples}, seed: {seed}");
    let _ = writeln!(
        stdout,
        "max mean z: {:.3} (gate {})",
        mc.max_mean_z,
        crate::oracle::MEAN_GATE
    );
    let _ = writeln!(
        stdout,
        "max cov deviation: {:.3} (gate {})",
        mc.max_cov_dev,
        crate::oracle::COV_GATE
    );
    for a in &mc.per_alpha {
        let _ = writeln!(
            stdout,
            "alpha {}: mean z {:.3}, variance deviation {:.3}",
            a.row + 1,
            a.mean_z,
            a.var_dev
        );
    }
    let _ = writeln!(
        stdout,
        "mean gate: {}, covariance gate: {}",
        pass_word(mc.mean_gate_passed),
        pass_word(mc.cov_gate_passed)
    );
    let passed = mc.passed();
    Output {
        code: if passed {
            exit_code::SUCCESS
        } else {
            exit_code::GATE_FAILED
        },
        stdout,
        stderr: if passed {
            String::new()
        } else {
            "error: verification gate failed\n".into()
        },
        report: Some(report),
    }
}

pub fn cmd_interval(args: &IntervalArgs) -> Output {
    let loaded = match load(&args.common) {
        Ok(l) => l,
        Err(msg) => return Output::fail(exit_code::USAGE, msg),
    };
    let LoadedProblem::Gaussian(p) = &loaded.problem else {
        return Output::fail(exit_code::USAGE, "interval needs a gaussian right-hand side");
    };
    if args.step == 0 || args.step > p.rows() {
        return Output::fail(exit_code::USAGE, format!("--step must be in 1..={}", p.rows()));
    }
    if !(1..=3).contains(&args.k) {
        return Output::fail(
            exit_code::USAGE,
            Error::Parameter(format!("k must be 1, 2 or 3, got {}", args.k)),
        );
    }
    let sol = match solve_s(
        p,
        loaded.file.initial_iterate(),
        loaded.file.initial_abaffian(),
        &loaded.strategy,
    ) {
        Ok(s) => s,
        Err(e) => return Output::fail(code_for(&e), e),
    };
    let interval = sol
        .state
        .alpha_summary(p, args.step - 1)
        .and_then(|s| alpha_interval(&s, args.k));
    let iv = match interval {
        Ok(iv) => iv,
        Err(e) => return Output::fail(code_for(&e), e),
    };
    let mut report = SolveReportFile::from_stochastic("interval", p, &sol.state, false);
    report.interval = Some(IntervalRecord::new(args.step, args.k, &iv));
    Output {
        code: exit_code::SUCCESS,
        stdout: format!(
            "alpha_{} in [{}, {}] with probability {}\n",
            args.step, iv.lo, iv.hi, iv.prob
        ),
        stderr: String::new(),
        report: Some(report),
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn fmt_vec(v: &DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}
