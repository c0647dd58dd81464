//! A right-hand side with general covariance, `η ~ N(v, C)`, solved through
//! the Cholesky factor of `C` and checked by Monte Carlo.

use abss::{run_mc, solve_s, McConfig, StochasticProblem, Strategy};
use nalgebra::{dmatrix, dvector, DMatrix, DVector};

fn main() -> abss::Result<()> {
    let a = dmatrix![2.0, 1.0, 0.0, 1.0;
                     0.0, 1.0, 3.0, -1.0];
    let cov = dmatrix![2.0, 0.6;
                       0.6, 1.0];
    let problem = StochasticProblem::with_covariance(a, dvector![1.0, -2.0], cov)?;
    let x1 = DVector::zeros(4);
    let h1 = DMatrix::identity(4, 4);

    let sol = solve_s(&problem, x1.clone(), h1.clone(), &Strategy::Huang)?;
    println!("E[ξ] = {}", fmt(&sol.summary.mean, 6));
    println!("Cov[ξ] ={:.6}", sol.summary.cov);
    for l in 0..2 {
        let r = sol.state.residual_distribution(&problem, l)?;
        println!("a_{}ᵀξ ~ N({:.6}, {:.6})", l + 1, r.mean, r.variance);
    }

    let report = run_mc(&problem, x1, h1, &Strategy::Huang, &McConfig::new(50_000, 7)?)?;
    println!(
        "Monte Carlo: mean z {:.3}, cov deviation {:.3}, passed {}",
        report.max_mean_z,
        report.max_cov_dev,
        report.passed()
    );
    Ok(())
}

fn fmt(v: &DVector<f64>, digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}
