//! Solve a full-rank 3x6 system with both built-in strategies.
//!
//! Run with `cargo run --example deterministic_solve`.

use abss::{fixtures, solve, Strategy};
use nalgebra::{DMatrix, DVector};

fn main() -> abss::Result<()> {
    let problem = fixtures::worked_problem();
    for (name, strategy) in [("huang", Strategy::Huang), ("unit", Strategy::Unit)] {
        let sol = solve(
            &problem,
            DVector::from_element(6, 1.0),
            DMatrix::identity(6, 6),
            &strategy,
        )?;
        println!("{name:>5}: x = {}", fmt(&sol.x, 6));
        println!(
            "       rank {}, max residual {:.2e}",
            sol.rank,
            problem.max_residual(&sol.x, 0..3)
        );
    }
    Ok(())
}

fn fmt(v: &DVector<f64>, digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}
