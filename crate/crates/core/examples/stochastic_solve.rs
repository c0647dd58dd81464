//! The Gaussian right-hand side worked example: `A ξ = η`, `η ~ N(v, I)`,
//! stepped one row at a time with the unit strategy.

use abss::{fixtures, StochasticState, Strategy, Verdict};
use nalgebra::{DMatrix, DVector};

fn main() -> abss::Result<()> {
    let problem = fixtures::worked_stochastic();
    let basis = problem.basis();
    let mut state = StochasticState::init(&problem, DVector::from_element(6, 1.0), DMatrix::identity(6, 6))?;
    while state.verdict() == Verdict::Running {
        let i = state.processed();
        let tau = state.residual_form(&problem, i)?.summary(basis)?;
        state = state.step(&problem, &Strategy::Unit)?;
        let step = state.accepted().last().expect("full rank");
        let alpha = step.alpha.summary(basis)?;
        println!(
            "step {}: tau ~ N({:.6}, {:.6})  alpha ~ N({:.6}, {:.6})",
            i + 1,
            tau.mean,
            tau.variance,
            alpha.mean,
            alpha.variance
        );
        println!(
            "        alpha = {:.6} + {}·η",
            step.alpha.constant,
            fmt(&step.alpha.coeffs, 6)
        );
    }
    let dist = state.xi().summary(basis)?;
    println!("E[ξ] = {}", fmt(&dist.mean, 6));
    println!("Cov[ξ] ={:.6}", dist.cov);
    println!("symmetric PSD: {}", dist.is_symmetric_psd());
    Ok(())
}

fn fmt(v: &DVector<f64>, digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}
