//! Dependent and incompatible rows, and the solution variety `x + Hᵀq`.

use abss::{solve, AbsState, Problem, Strategy, Verdict};
use nalgebra::{dmatrix, dvector, DMatrix, DVector};

fn main() -> abss::Result<()> {
    // Row 3 is row 1 plus row 2.
    let a = dmatrix![1.0, 2.0, 0.0, 1.0;
                     0.0, 1.0, 1.0, 0.0;
                     1.0, 3.0, 1.0, 1.0];
    let problem = Problem::new(a.clone(), dvector![4.0, 2.0, 6.0])?;
    let sol = solve(
        &problem,
        DVector::zeros(4),
        DMatrix::identity(4, 4),
        &Strategy::Huang,
    )?;
    println!("x = {}", fmt(&sol.x, 6));
    println!(
        "rank {}, skipped rows {:?}",
        sol.rank,
        sol.skipped.iter().map(|r| r + 1).collect::<Vec<_>>()
    );

    for q in [dvector![1.0, 0.0, 0.0, 0.0], dvector![0.0, -2.0, 0.5, 3.0]] {
        let y = sol.state.variety_point(&q)?;
        println!(
            "variety point {}  residual {:.1e}",
            fmt(&y, 4),
            problem.max_residual(&y, 0..3)
        );
    }

    // Same matrix, inconsistent right-hand side.
    let bad = Problem::new(a, dvector![4.0, 2.0, 7.0])?;
    let mut state = AbsState::init(&bad, DVector::zeros(4), DMatrix::identity(4, 4))?;
    while state.verdict() == Verdict::Running {
        state = state.step(&bad, &Strategy::Huang)?;
    }
    println!("inconsistent rhs: {:?}", state.verdict());
    match solve(&bad, DVector::zeros(4), DMatrix::identity(4, 4), &Strategy::Huang) {
        Err(e) => println!("solve: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

fn fmt(v: &DVector<f64>, digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}
