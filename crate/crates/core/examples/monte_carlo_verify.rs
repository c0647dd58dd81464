//! Check the closed-form mean and covariance by sampling `η` and solving each
//! realised system deterministically.
//!
//! `cargo run --release --example monte_carlo_verify -- 200000 42`

use abss::{fixtures, run_mc, McConfig, Strategy};
use nalgebra::{DMatrix, DVector};

fn main() -> abss::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let problem = fixtures::worked_stochastic();
    let cfg = McConfig::new(samples, seed)?;
    let r = run_mc(
        &problem,
        DVector::from_element(6, 1.0),
        DMatrix::identity(6, 6),
        &Strategy::Unit,
        &cfg,
    )?;

    println!("N = {}, seed = {seed}", r.samples_used);
    println!("analytic  mean {}", fmt(&r.analytic_mean, 5));
    println!("empirical mean {}", fmt(&r.empirical_mean, 5));
    println!("max |z| of mean: {:.3}", r.max_mean_z);
    println!("max scaled cov deviation: {:.3}", r.max_cov_dev);
    for a in &r.per_alpha {
        println!(
            "alpha_{}: E {:.5} vs {:.5}, Var {:.5} vs {:.5}",
            a.row + 1,
            a.analytic_mean,
            a.empirical_mean,
            a.analytic_var,
            a.empirical_var
        );
    }
    println!("{}", if r.passed() { "PASS" } else { "FAIL" });
    Ok(())
}

fn fmt(v: &DVector<f64>, digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}
