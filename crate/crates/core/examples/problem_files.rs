//! Load a JSON problem file, solve it and write a report, the same path the
//! `abss` binary takes.
//!
//! `cargo run --example problem_files -- crates/core/examples/correlated_rhs.json`

use abss::problem_file::{LoadedProblem, ProblemFile};
use abss::report::SolveReportFile;
use abss::{solve, solve_s};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/worked_example.json").into());
    let file = ProblemFile::load(&path)?;
    let strategy = file.strategy.into();
    let report = match file.to_problem()? {
        LoadedProblem::Deterministic(p) => {
            let sol = solve(&p, file.initial_iterate(), file.initial_abaffian(), &strategy)?;
            SolveReportFile::from_deterministic("solve", &p, &sol.state, true)
        }
        LoadedProblem::Gaussian(p) => {
            let sol = solve_s(&p, file.initial_iterate(), file.initial_abaffian(), &strategy)?;
            SolveReportFile::from_stochastic("solve", &p, &sol.state, true)
        }
    };
    println!("{}", report.to_json());
    Ok(())
}
