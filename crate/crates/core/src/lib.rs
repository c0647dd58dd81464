//! ABS direct solvers for linear systems, including systems `Aξ = η` whose
//! right-hand side is Gaussian.
//!
//! * [`abs`]: the deterministic ABS class for `Ax = b` of any rank, with
//!   checks for the implicit factorization and null-space identities.
//! * [`stochastic`]: the same recursion with `η ~ N(v, I)`; iterates and
//!   steplengths are carried as exact affine forms of `η`.
//! * [`gaussian`]: the affine-Gaussian calculus behind it.
//! * [`oracle`]: Monte Carlo verification of the closed-form moments.
//! * [`problem_file`], [`report`], [`cli`]: JSON problem/report files and
//!   the `abss` command line.
//!
//! Runnable examples live in `examples/`; see the README.

pub mod abs;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod gaussian;
pub mod oracle;
pub mod problem_file;
pub mod report;
pub mod stochastic;

pub use abs::{solve, AbsState, Problem, Solution, Strategy, Tolerances, Verdict};
pub use error::{Error, Result};
pub use gaussian::{AffineScalar, AffineVector, DistSummary, GaussianBasis, ScalarSummary};
pub use oracle::{run_mc, McConfig, McReport};
pub use stochastic::{alpha_interval, solve_s, StochasticProblem, StochasticSolution, StochasticState};
