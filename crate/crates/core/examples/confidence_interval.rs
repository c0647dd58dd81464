//! k-sigma intervals for every steplength of the worked example.

use abss::{alpha_interval, fixtures, solve_s, Strategy};
use nalgebra::{DMatrix, DVector};

fn main() -> abss::Result<()> {
    let problem = fixtures::worked_stochastic();
    let sol = solve_s(
        &problem,
        DVector::from_element(6, 1.0),
        DMatrix::identity(6, 6),
        &Strategy::Unit,
    )?;
    for (row, s) in &sol.alpha_summaries {
        for k in 1..=3 {
            let iv = alpha_interval(s, k)?;
            println!(
                "alpha_{} k={k}: [{:+.6}, {:+.6}]  p = {}",
                row + 1,
                iv.lo,
                iv.hi,
                iv.prob
            );
        }
    }
    Ok(())
}
