#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// `m x n` with `σ_min / σ_max ≥ 1e-3`.
pub fn full_rank(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let sv = a.clone().svd(false, false).singular_values;
        if sv.min() >= 1e-3 * sv.max() {
            return a;
        }
    }
}

/// Rows are either fresh or a random combination of earlier rows. Returns
/// the matrix and the indices of the dependent rows.
pub fn mixed_rank(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (DMatrix<f64>, Vec<usize>) {
    loop {
        let mut rows: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut dependent = Vec::new();
        for i in 0..m {
            if i > 0 && rng.random_bool(0.35) {
                let mut r = DVector::zeros(n);
                for prev in &rows {
                    r += prev * rng.random_range(-1.0..1.0);
                }
                rows.push(r);
                dependent.push(i);
            } else {
                rows.push(uniform_vec(rng, n));
            }
        }
        let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        let independent: Vec<usize> = (0..m).filter(|i| !dependent.contains(i)).collect();
        let basis = a.select_rows(&independent);
        let sv = basis.svd(false, false).singular_values;
        // Dependent rows must not be all-zero combinations.
        let nonzero = dependent.iter().all(|&d| a.row(d).amax() > 1e-2);
        if sv.min() >= 1e-3 * sv.max() && nonzero {
            return (a, dependent);
        }
    }
}

pub fn dims(rng: &mut ChaCha8Rng, max_n: usize) -> (usize, usize) {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=n);
    (m, n)
}
