//! The 3×6 worked example: `A`, `η ~ N((6, 12, 2), I)`, `ξ_1 = 1`,
//! `H_1 = I`, and the reference matrices that go with it.
//!
//! The reference `H_2`, `H_3`, `p_2`, `p_3` are produced by `z_i = a_i`,
//! `w_i = e_i` ([`Strategy::Unit`](crate::Strategy::Unit)), although the
//! example is usually stated with `w_i = a_i`.
//!
//! The reference final covariance does not match the reference `ξ_4`
//! expressions it should come from (entry (1,1) is given as 0.525; the
//! expressions give `(479² + 120² + 315²)/630² ≈ 0.864`). It is kept here
//! only so tests can show the Monte Carlo gate rejects it.

use nalgebra::{dmatrix, dvector, DMatrix, DVector};

use crate::abs::Problem;
use crate::stochastic::StochasticProblem;

pub fn worked_matrix() -> DMatrix<f64> {
    dmatrix![
        1.0, 3.0, -1.0, 0.0, 2.0, 0.0;
        0.0, -2.0, 4.0, 1.0, 0.0, 0.0;
        0.0, -4.0, 1.0, 0.0, -2.0, 1.0
    ]
}

pub fn worked_mean() -> DVector<f64> {
    dvector![6.0, 12.0, 2.0]
}

/// The deterministic system at `b = Eη`.
pub fn worked_problem() -> Problem {
    Problem::new(worked_matrix(), worked_mean()).expect("valid fixture")
}

pub fn worked_stochastic() -> StochasticProblem {
    StochasticProblem::new(worked_matrix(), worked_mean()).expect("valid fixture")
}

pub fn worked_h2() -> DMatrix<f64> {
    dmatrix![
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
        -3.0, 1.0, 0.0, 0.0, 0.0, 0.0;
        1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
        0.0, 0.0, 0.0, 1.0, 0.0, 0.0;
        -2.0, 0.0, 0.0, 0.0, 1.0, 0.0;
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0
    ]
}

pub fn worked_h3() -> DMatrix<f64> {
    dmatrix![
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
        -5.0, 2.0, 1.0, 0.0, 0.0, 0.0;
        -1.5, 0.5, 0.0, 1.0, 0.0, 0.0;
        -2.0, 0.0, 0.0, 0.0, 1.0, 0.0;
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0
    ]
}

/// Reference final mean (rounded).
pub fn worked_reference_mean() -> DVector<f64> {
    dvector![6.47, -1.33, 1.97, 1.46, 2.74, 0.195]
}

/// Reference final covariance. Not symmetric ((6,1) is −0.495 against
/// (1,6) −0.475) and not the covariance of the reference `ξ_4`.
pub fn worked_reference_sigma() -> DMatrix<f64> {
    dmatrix![
        0.525, -1.011, -0.331, 0.037, 0.958, -0.475;
        -1.011, 1.75, 0.886, 0.007, 1.695, 0.865;
        -0.331, 0.886, 0.538, 0.008, 1.015, 0.503;
        0.037, 0.007, 0.008, 0.003, -0.004, 0.002;
        0.958, 1.695, 1.015, -0.004, 1.998, -0.99;
        -0.495, 0.865, 0.503, 0.002, -0.99, 0.472
    ]
}
