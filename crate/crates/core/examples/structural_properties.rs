//! Implicit factorization `L = AP` and the null-space identities of the final
//! abaffian, on a random system.

use abss::abs::{verify_factorization, verify_nullspace};
use abss::{solve, Problem, Strategy};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> abss::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (m, n) = (5, 8);
    let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
    let problem = Problem::new(a, b)?;

    for (name, strategy) in [("huang", Strategy::Huang), ("unit", Strategy::Unit)] {
        let sol = solve(&problem, DVector::zeros(n), DMatrix::identity(n, n), &strategy)?;
        let f = verify_factorization(&problem, sol.state.accepted());
        let ns = verify_nullspace(&sol.state, &problem);
        println!("{name}: L = A P ={:.4}", f.l);
        println!("  max |a_j·p_k| (j<k), relative: {:.2e}", f.offdiag_rel);
        println!("  min |L_jj|: {:.4}", f.min_abs_diag);
        println!(
            "  max |H a_j|: {:.2e}   max |Hᵀ w_j|: {:.2e}",
            ns.max_h_a, ns.max_ht_w
        );
    }
    Ok(())
}
