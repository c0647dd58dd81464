//! Monte Carlo check of the closed-form distributions.
//!
//! Each sample `k` draws the basis from its own ChaCha stream (`seed`,
//! stream `k`), realises `η`, and runs the deterministic solver. Moments
//! are reduced with a fixed pairwise tree over sample indices, so the
//! report does not depend on how the samples were scheduled.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::abs::{self, Strategy};
use crate::error::{Error, Result};
use crate::gaussian::GaussianBasis;
use crate::stochastic::{solve_s, StochasticProblem, StochasticSolution};

/// Largest standardized mean deviation accepted.
pub const MEAN_GATE: f64 = 4.0;
/// Largest scaled covariance deviation accepted.
pub const COV_GATE: f64 = 5.0;

const LEAF: usize = 64;
const PAR_SPLIT: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Scheduling hint only; results do not depend on it.
    pub parallel_chunks: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            samples,
            seed,
            parallel_chunks: rayon::current_num_threads().max(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_chunks(mut self, chunks: usize) -> Self {
        self.parallel_chunks = chunks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 samples, got {}",
                self.samples
            )));
        }
        if self.parallel_chunks == 0 {
            return Err(Error::Parameter("parallel_chunks must be positive".into()));
        }
        Ok(())
    }
}

/// Draw `k` of the basis for a given seed.
pub fn draw_basis(basis: &GaussianBasis, seed: u64, k: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    DVector::from_fn(basis.dim(), |i, _| {
        basis.mean()[i] + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
    })
}

/// Sample moments of the solution and of each accepted steplength.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    pub samples: usize,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub alpha_rows: Vec<usize>,
    pub alpha_mean: Vec<f64>,
    pub alpha_var: Vec<f64>,
}

/// Solves `A x = η̂_k` for every sample and reduces the moments.
/// `alpha_rows` are the rows the stochastic solve accepted; every sample
/// must accept exactly these.
pub fn sample_solutions(
    problem: &StochasticProblem,
    x1: &DVector<f64>,
    h1: &DMatrix<f64>,
    strategy: &Strategy,
    alpha_rows: &[usize],
    cfg: &McConfig,
) -> Result<Empirical> {
    cfg.validate()?;
    let n = problem.cols();
    let width = n + alpha_rows.len();
    let min_len = cfg.samples.div_ceil(cfg.parallel_chunks).max(1);

    let rows: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .with_min_len(min_len)
        .map(|k| {
            let z = draw_basis(problem.basis(), cfg.seed, k as u64);
            let det = problem.realise(&z)?;
            let sol = abs::solve(&det, x1.clone(), h1.clone(), strategy)
                .map_err(|e| Error::OracleInconsistency(format!("sample {k}: {e}")))?;
            let accepted: Vec<usize> = sol.state.accepted().iter().map(|s| s.row).collect();
            if accepted != alpha_rows {
                return Err(Error::OracleInconsistency(format!(
                    "sample {k} accepted rows {accepted:?}, expected {alpha_rows:?}"
                )));
            }
            let mut out = Vec::with_capacity(width);
            out.extend(sol.x.iter());
            out.extend(sol.state.accepted().iter().map(|s| s.alpha));
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let count = cfg.samples as f64;
    let mean: Vec<f64> = pairwise(0, rows.len(), width, &|k, acc| {
        for (a, v) in acc.iter_mut().zip(&rows[k]) {
            *a += v;
        }
    })
    .into_iter()
    .map(|s| s / count)
    .collect();
    let scatter = pairwise(0, rows.len(), width * width, &|k, acc| {
        let y = &rows[k];
        for i in 0..width {
            let di = y[i] - mean[i];
            for j in 0..width {
                acc[i * width + j] += di * (y[j] - mean[j]);
            }
        }
    });
    let full = DMatrix::from_row_slice(width, width, &scatter) / (count - 1.0);

    Ok(Empirical {
        samples: cfg.samples,
        mean: DVector::from_column_slice(&mean[..n]),
        cov: full.view((0, 0), (n, n)).into_owned(),
        alpha_rows: alpha_rows.to_vec(),
        alpha_mean: mean[n..].to_vec(),
        alpha_var: (n..width).map(|i| full[(i, i)]).collect(),
    })
}

/// Sum of per-sample contributions over `lo..hi` with a tree shape fixed
/// by the index range alone.
fn pairwise<F>(lo: usize, hi: usize, width: usize, add: &F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    if hi - lo <= LEAF {
        let mut acc = vec![0.0; width];
        for k in lo..hi {
            add(k, &mut acc);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let (mut left, right) = if hi - lo >= PAR_SPLIT {
        rayon::join(|| pairwise(lo, mid, width, add), || pairwise(mid, hi, width, add))
    } else {
        (pairwise(lo, mid, width, add), pairwise(mid, hi, width, add))
    };
    for (l, r) in left.iter_mut().zip(right) {
        *l += r;
    }
    left
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovComparison {
    pub max_dev: f64,
    pub pass: bool,
}

/// Entrywise deviation scaled by `sqrt((σ_ii σ_jj + σ_ij²) / N)`; passes
/// iff no scaled deviation exceeds [`COV_GATE`].
pub fn compare_cov(emp: &DMatrix<f64>, analytic: &DMatrix<f64>, samples: usize) -> Result<CovComparison> {
    if emp.shape() != analytic.shape() || !emp.is_square() {
        return Err(Error::Dimension(format!(
            "empirical covariance {:?} vs analytic {:?}",
            emp.shape(),
            analytic.shape()
        )));
    }
    let n = samples as f64;
    let mut max_dev = 0.0f64;
    for i in 0..emp.nrows() {
        for j in 0..emp.ncols() {
            let sij = analytic[(i, j)];
            let se = ((analytic[(i, i)] * analytic[(j, j)] + sij * sij) / n).sqrt();
            max_dev = max_dev.max(scaled(emp[(i, j)] - sij, se, sij));
        }
    }
    Ok(CovComparison {
        max_dev,
        pass: max_dev <= COV_GATE,
    })
}

fn scaled(diff: f64, se: f64, reference: f64) -> f64 {
    if se > 0.0 && se.is_finite() {
        diff.abs() / se
    } else if diff.abs() <= 1e-12 * (1.0 + reference.abs()) {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCheck {
    pub row: usize,
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub analytic_mean: f64,
    pub analytic_var: f64,
    pub mean_z: f64,
    pub var_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub samples_used: usize,
    pub empirical_mean: DVector<f64>,
    pub empirical_cov: DMatrix<f64>,
    pub analytic_mean: DVector<f64>,
    pub analytic_cov: DMatrix<f64>,
    pub max_mean_z: f64,
    pub max_cov_dev: f64,
    pub per_alpha: Vec<AlphaCheck>,
    pub mean_gate_passed: bool,
    pub cov_gate_passed: bool,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.mean_gate_passed && self.cov_gate_passed
    }
}

/// Compares sample moments against closed-form ones.
pub fn assemble(analytic: &StochasticSolution, emp: &Empirical) -> Result<McReport> {
    let n = emp.samples as f64;
    let am = &analytic.summary.mean;
    let ac = &analytic.summary.cov;
    if am.len() != emp.mean.len() {
        return Err(Error::Dimension(
            "solution length differs from sampled length".into(),
        ));
    }
    let max_mean_z = (0..am.len())
        .map(|i| scaled(emp.mean[i] - am[i], (ac[(i, i)] / n).sqrt(), am[i]))
        .fold(0.0, f64::max);
    let cov = compare_cov(&emp.cov, ac, emp.samples)?;

    let rows: Vec<usize> = analytic.alpha_summaries.iter().map(|(r, _)| *r).collect();
    if rows != emp.alpha_rows {
        return Err(Error::OracleInconsistency(format!(
            "analytic steplength rows {rows:?} differ from sampled {:?}",
            emp.alpha_rows
        )));
    }
    let per_alpha: Vec<AlphaCheck> = analytic
        .alpha_summaries
        .iter()
        .enumerate()
        .map(|(t, (row, s))| {
            let var_se = (2.0 * s.variance * s.variance / n).sqrt();
            AlphaCheck {
                row: *row,
                empirical_mean: emp.alpha_mean[t],
                empirical_var: emp.alpha_var[t],
                analytic_mean: s.mean,
                analytic_var: s.variance,
                mean_z: scaled(emp.alpha_mean[t] - s.mean, (s.variance / n).sqrt(), s.mean),
                var_dev: scaled(emp.alpha_var[t] - s.variance, var_se, s.variance),
            }
        })
        .collect();

    let mean_gate_passed = max_mean_z <= MEAN_GATE && per_alpha.iter().all(|a| a.mean_z <= MEAN_GATE);
    let cov_gate_passed = cov.pass && per_alpha.iter().all(|a| a.var_dev <= COV_GATE);
    Ok(McReport {
        samples_used: emp.samples,
        empirical_mean: emp.mean.clone(),
        empirical_cov: emp.cov.clone(),
        analytic_mean: am.clone(),
        analytic_cov: ac.clone(),
        max_mean_z,
        max_cov_dev: cov.max_dev,
        per_alpha,
        mean_gate_passed,
        cov_gate_passed,
    })
}

/// Closed-form solve followed by sampling and comparison.
pub fn run_mc(
    problem: &StochasticProblem,
    x1: DVector<f64>,
    h1: DMatrix<f64>,
    strategy: &Strategy,
    cfg: &McConfig,
) -> Result<McReport> {
    let analytic = solve_s(problem, x1.clone(), h1.clone(), strategy)?;
    let rows: Vec<usize> = analytic.alpha_summaries.iter().map(|(r, _)| *r).collect();
    let emp = sample_solutions(problem, &x1, &h1, strategy, &rows, cfg)?;
    assemble(&analytic, &emp)
}

/// Largest `‖ξ(ẑ) − x(ẑ)‖∞ / (1 + ‖x(ẑ)‖∞)` over `count` draws, where
/// `ξ(ẑ)` evaluates the affine solution and `x(ẑ)` is the deterministic
/// solve of the realised system.
pub fn sample_path_error(
    problem: &StochasticProblem,
    solution: &StochasticSolution,
    x1: &DVector<f64>,
    h1: &DMatrix<f64>,
    strategy: &Strategy,
    count: usize,
    seed: u64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..count {
        let z = draw_basis(problem.basis(), seed, k as u64);
        let det = abs::solve(&problem.realise(&z)?, x1.clone(), h1.clone(), strategy)?;
        let affine = solution.xi.evaluate(&z)?;
        worst = worst.max((affine - &det.x).amax() / (1.0 + det.x.amax()));
    }
    Ok(worst)
}
