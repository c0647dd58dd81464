//! The basic ABS class for `Ax = b` with arbitrary rank.
//!
//! Rows are processed in input order. At row `i` the solver forms
//! `s = H a_i` and the residual `τ = a_iᵀx − b_i`, then either skips a
//! dependent consistent row, stops on an incompatible one, or moves along
//! `p = Hᵀz` and applies the rank-one Abaffian update with parameter `w`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerances. Each is scaled by the problem data before use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Zero test for `s_i` and `τ_i`; scaled by `1 + ‖A‖∞`.
    pub zero: f64,
    /// Residual acceptance; scaled by `1 + ‖b‖∞`.
    pub residual: f64,
    /// `H a_j ≈ 0` and `Hᵀw_j ≈ 0`.
    pub null: f64,
    /// Upper triangle of `AᵀP`.
    pub tri: f64,
    /// Surely-zero test on random residuals (stochastic solver only).
    pub surely_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-10,
            residual: 1e-9,
            null: 1e-9,
            tri: 1e-9,
            surely_zero: 1e-12,
        }
    }
}

/// User-supplied `z_i` (search) and `w_i` (update) parameters.
pub trait ParameterRule: Send + Sync {
    fn z(&self, row: usize, a: &DVector<f64>, h: &DMatrix<f64>) -> DVector<f64>;
    fn w(&self, row: usize, a: &DVector<f64>, h: &DMatrix<f64>) -> DVector<f64>;
}

/// How `z_i` and `w_i` are chosen at each step.
#[derive(Clone, Default)]
pub enum Strategy {
    /// `z_i = w_i = a_i`.
    #[default]
    Huang,
    /// `z_i = a_i`, `w_i = e_i`.
    Unit,
    Custom(Arc<dyn ParameterRule>),
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Huang => f.write_str("Huang"),
            Strategy::Unit => f.write_str("Unit"),
            Strategy::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Strategy {
    fn z(&self, row: usize, a: &DVector<f64>, h: &DMatrix<f64>) -> DVector<f64> {
        match self {
            Strategy::Huang | Strategy::Unit => a.clone(),
            Strategy::Custom(rule) => rule.z(row, a, h),
        }
    }

    fn w(&self, row: usize, a: &DVector<f64>, h: &DMatrix<f64>) -> DVector<f64> {
        match self {
            Strategy::Huang => a.clone(),
            Strategy::Unit => {
                let mut e = DVector::zeros(a.len());
                e[row] = 1.0;
                e
            }
            Strategy::Custom(rule) => rule.w(row, a, h),
        }
    }
}

/// A deterministic linear system `Ax = b` with `rows <= cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    a: DMatrix<f64>,
    b: DVector<f64>,
    tol: Tolerances,
}

impl Problem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        check_shape(&a)?;
        if b.len() != a.nrows() {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                a.nrows()
            )));
        }
        Ok(Self {
            a,
            b,
            tol: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Same matrix, new right-hand side.
    pub fn with_rhs(&self, b: DVector<f64>) -> Result<Self> {
        Ok(Self::new(self.a.clone(), b)?.with_tolerances(self.tol))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.a.row(i).transpose()
    }

    /// `tol.residual · (1 + ‖b‖∞)`.
    pub fn residual_tol(&self) -> f64 {
        self.tol.residual * (1.0 + self.b.amax())
    }

    /// Largest `|a_jᵀx − b_j|` over the given rows.
    pub fn max_residual(&self, x: &DVector<f64>, rows: impl IntoIterator<Item = usize>) -> f64 {
        rows.into_iter()
            .map(|j| (self.a.row(j).transpose().dot(x) - self.b[j]).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_shape(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::Dimension("matrix must be non-empty".into()));
    }
    if a.nrows() > a.ncols() {
        return Err(Error::UnsupportedShape {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// `max_i Σ_j |a_ij|`.
pub(crate) fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn check_init(n: usize, x1: &DVector<f64>, h1: &DMatrix<f64>) -> Result<()> {
    if x1.len() != n {
        return Err(Error::Dimension(format!(
            "initial iterate has length {}, expected {n}",
            x1.len()
        )));
    }
    if h1.nrows() != n || h1.ncols() != n {
        return Err(Error::Dimension(format!(
            "initial Abaffian is {}x{}, expected {n}x{n}",
            h1.nrows(),
            h1.ncols()
        )));
    }
    if !h1.iter().chain(x1.iter()).all(|v| v.is_finite()) {
        return Err(Error::InvalidInit("non-finite initial data".into()));
    }
    let sv = h1.clone().singular_values();
    let top = sv.max();
    if top == 0.0 || sv.min() <= 1e-13 * top {
        return Err(Error::InvalidInit("initial Abaffian is singular".into()));
    }
    Ok(())
}

/// Deterministic quantities of one accepted step. They depend on `A`, the
/// strategy and `H`, never on the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Geometry {
    pub p: DVector<f64>,
    pub w: DVector<f64>,
    pub a_dot_p: f64,
    pub h_next: DMatrix<f64>,
}

/// Forms `s = H a`; returns `None` for the geometry when `s` vanishes.
pub(crate) fn geometry(
    h: &DMatrix<f64>,
    a: &DVector<f64>,
    row: usize,
    strategy: &Strategy,
    zero_rel: f64,
    a_norm: f64,
) -> Result<(DVector<f64>, Option<Geometry>)> {
    let s = h * a;
    let tol = zero_rel * (1.0 + a_norm) * inf_norm(h).max(1.0);
    if s.amax() <= tol {
        return Ok((s, None));
    }

    let mut z = strategy.z(row, a, h);
    if z.dot(&s).abs() <= tol * z.amax().max(1.0) {
        z = s.clone();
    }
    let p = h.tr_mul(&z);
    let a_dot_p = a.dot(&p);
    if a_dot_p.abs() <= tol {
        return Err(Error::IllConditioned {
            row,
            value: a_dot_p.abs(),
        });
    }

    let mut w = strategy.w(row, a, h);
    if w.dot(&s).abs() <= tol * w.amax().max(1.0) {
        w = s.clone();
    }
    let ht_w = h.tr_mul(&w);
    let h_next = h - (&s * ht_w.transpose()) / w.dot(&s);

    Ok((
        s,
        Some(Geometry {
            p,
            w,
            a_dot_p,
            h_next,
        }),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Running,
    Solved,
    /// 0-based row.
    Incompatible {
        row: usize,
    },
}

/// An accepted step: the search vector, parameters and steplength.
#[derive(Debug, Clone, PartialEq)]
pub struct Accepted {
    pub row: usize,
    pub p: DVector<f64>,
    pub w: DVector<f64>,
    pub a_dot_p: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    Skipped,
    Incompatible,
}

/// Per-row trace record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub row: usize,
    pub s: DVector<f64>,
    pub tau: f64,
    pub outcome: Outcome,
    pub h_next: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsState {
    next_row: usize,
    x: DVector<f64>,
    h: DMatrix<f64>,
    accepted: Vec<Accepted>,
    skipped: BTreeSet<usize>,
    verdict: Verdict,
    trace: Vec<StepRecord>,
}

impl AbsState {
    pub fn init(problem: &Problem, x1: DVector<f64>, h1: DMatrix<f64>) -> Result<Self> {
        check_init(problem.cols(), &x1, &h1)?;
        Ok(Self {
            next_row: 0,
            x: x1,
            h: h1,
            accepted: Vec::new(),
            skipped: BTreeSet::new(),
            verdict: Verdict::Running,
            trace: Vec::new(),
        })
    }

    /// 1-based step index `i`.
    pub fn step_index(&self) -> usize {
        self.next_row + 1
    }

    /// Rows processed so far (0-based, exclusive bound).
    pub fn processed(&self) -> usize {
        self.next_row
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn accepted(&self) -> &[Accepted] {
        &self.accepted
    }

    pub fn skipped(&self) -> &BTreeSet<usize> {
        &self.skipped
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn trace(&self) -> &[StepRecord] {
        &self.trace
    }

    /// Processes the next row.
    pub fn step(&self, problem: &Problem, strategy: &Strategy) -> Result<AbsState> {
        if self.verdict != Verdict::Running {
            return Err(Error::State(format!("cannot step a {:?} state", self.verdict)));
        }
        let row = self.next_row;
        if row >= problem.rows() {
            return Err(Error::State("all rows already processed".into()));
        }
        let tol = problem.tolerances();
        let a_norm = inf_norm(problem.matrix());
        let a = problem.row(row);
        let tau = a.dot(&self.x) - problem.rhs()[row];

        let mut next = self.clone();
        let (s, geom) = geometry(&self.h, &a, row, strategy, tol.zero, a_norm)?;
        let outcome = match geom {
            None => {
                let tau_tol = tol.zero * (1.0 + a_norm * self.x.amax() + problem.rhs().amax());
                if tau.abs() <= tau_tol {
                    next.skipped.insert(row);
                    Outcome::Skipped
                } else {
                    next.verdict = Verdict::Incompatible { row };
                    Outcome::Incompatible
                }
            }
            Some(g) => {
                let alpha = tau / g.a_dot_p;
                next.x -= &g.p * alpha;
                next.h = g.h_next;
                next.accepted.push(Accepted {
                    row,
                    p: g.p,
                    w: g.w,
                    a_dot_p: g.a_dot_p,
                    alpha,
                });
                Outcome::Accepted
            }
        };
        next.trace.push(StepRecord {
            row,
            s,
            tau,
            outcome,
            h_next: next.h.clone(),
        });
        if outcome != Outcome::Incompatible {
            next.next_row += 1;
            if next.next_row == problem.rows() {
                next.verdict = Verdict::Solved;
            }
        }
        Ok(next)
    }

    /// `x_{m+1} + H_{m+1}ᵀ q`, a point of the solution variety.
    pub fn variety_point(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if self.verdict != Verdict::Solved {
            return Err(Error::State("variety_point needs a solved state".into()));
        }
        if q.len() != self.x.len() {
            return Err(Error::Dimension(format!(
                "q has length {}, expected {}",
                q.len(),
                self.x.len()
            )));
        }
        Ok(&self.x + self.h.tr_mul(q))
    }
}

/// Result of a successful deterministic solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: DVector<f64>,
    pub rank: usize,
    pub skipped: BTreeSet<usize>,
    pub state: AbsState,
}

/// Runs all `m` steps.
pub fn solve(problem: &Problem, x1: DVector<f64>, h1: DMatrix<f64>, strategy: &Strategy) -> Result<Solution> {
    let mut state = AbsState::init(problem, x1, h1)?;
    while state.verdict == Verdict::Running {
        state = state.step(problem, strategy)?;
    }
    match state.verdict {
        Verdict::Incompatible { row } => Err(Error::Incompatible { row }),
        _ => Ok(Solution {
            x: state.x.clone(),
            rank: problem.rows() - state.skipped.len(),
            skipped: state.skipped.clone(),
            state,
        }),
    }
}

/// The matrix `L_{jk} = a_jᵀp_k` over accepted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub l: DMatrix<f64>,
    /// Largest `|L_jk|`, `j < k`.
    pub offdiag_max: f64,
    /// Largest `|a_jᵀp_k| / (‖a_j‖ ‖p_k‖)`, `j < k`.
    pub offdiag_rel: f64,
    pub min_abs_diag: f64,
}

impl Factorization {
    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        self.offdiag_rel <= tol && self.min_abs_diag > 0.0
    }
}

pub fn verify_factorization(problem: &Problem, accepted: &[Accepted]) -> Factorization {
    let k = accepted.len();
    let rows: Vec<DVector<f64>> = accepted.iter().map(|s| problem.row(s.row)).collect();
    let l = DMatrix::from_fn(k, k, |j, c| rows[j].dot(&accepted[c].p));
    let mut offdiag_max = 0.0f64;
    let mut offdiag_rel = 0.0f64;
    for j in 0..k {
        for c in (j + 1)..k {
            let v = l[(j, c)].abs();
            offdiag_max = offdiag_max.max(v);
            let scale = rows[j].norm() * accepted[c].p.norm();
            if scale > 0.0 {
                offdiag_rel = offdiag_rel.max(v / scale);
            }
        }
    }
    let min_abs_diag = (0..k).map(|j| l[(j, j)].abs()).fold(f64::INFINITY, f64::min);
    Factorization {
        l,
        offdiag_max,
        offdiag_rel,
        min_abs_diag: if k == 0 { 0.0 } else { min_abs_diag },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullspaceCheck {
    pub max_h_a: f64,
    pub max_ht_w: f64,
    /// `‖H a_j‖∞ / (‖a_j‖∞ · max(1, ‖H‖∞))`.
    pub rel_h_a: f64,
    pub rel_ht_w: f64,
}

impl NullspaceCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.rel_h_a <= tol && self.rel_ht_w <= tol
    }
}

/// Checks `H a_j = 0` for processed rows and `Hᵀw_j = 0` for accepted ones.
pub fn verify_nullspace(state: &AbsState, problem: &Problem) -> NullspaceCheck {
    nullspace_of(
        state.h(),
        problem,
        state.processed(),
        state.accepted().iter().map(|s| &s.w),
    )
}

pub(crate) fn nullspace_of<'a>(
    h: &DMatrix<f64>,
    problem: &Problem,
    processed: usize,
    ws: impl Iterator<Item = &'a DVector<f64>>,
) -> NullspaceCheck {
    let h_scale = inf_norm(h).max(1.0);
    let mut out = NullspaceCheck {
        max_h_a: 0.0,
        max_ht_w: 0.0,
        rel_h_a: 0.0,
        rel_ht_w: 0.0,
    };
    for j in 0..processed {
        let a = problem.row(j);
        let v = (h * &a).amax();
        out.max_h_a = out.max_h_a.max(v);
        if a.amax() > 0.0 {
            out.rel_h_a = out.rel_h_a.max(v / (a.amax() * h_scale));
        }
    }
    for w in ws {
        let v = h.tr_mul(w).amax();
        out.max_ht_w = out.max_ht_w.max(v);
        if w.amax() > 0.0 {
            out.rel_ht_w = out.rel_ht_w.max(v / (w.amax() * h_scale));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn run(problem: &Problem, strategy: &Strategy, steps: usize) -> AbsState {
        let n = problem.cols();
        let mut st = AbsState::init(problem, DVector::from_element(n, 1.0), DMatrix::identity(n, n)).unwrap();
        for _ in 0..steps {
            st = st.step(problem, strategy).unwrap();
        }
        st
    }

    #[test]
    fn init_validation() {
        let p = fixtures::worked_problem();
        assert!(AbsState::init(&p, DVector::from_element(6, 1.0), DMatrix::identity(6, 6)).is_ok());
        assert!(matches!(
            AbsState::init(&p, DVector::zeros(6), DMatrix::zeros(6, 6)),
            Err(Error::InvalidInit(_))
        ));
        let id = Problem::new(DMatrix::identity(2, 2), dvector![1.0, 2.0]).unwrap();
        let st = AbsState::init(&id, DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        assert_eq!(st.verdict(), Verdict::Running);
        assert_eq!(st.step_index(), 1);
        assert!(matches!(
            Problem::new(DMatrix::zeros(3, 2), DVector::zeros(3)),
            Err(Error::UnsupportedShape { rows: 3, cols: 2 })
        ));
        assert!(Problem::new(DMatrix::identity(2, 2), DVector::zeros(3)).is_err());
    }

    #[test]
    fn first_step_of_worked_example() {
        let p = fixtures::worked_problem();
        let st = run(&p, &Strategy::Unit, 1);
        assert_eq!(st.accepted()[0].p, dvector![1.0, 3.0, -1.0, 0.0, 2.0, 0.0]);
        assert!((st.h() - fixtures::worked_h2()).amax() <= 1e-12);
    }

    #[test]
    fn second_and_third_steps_of_worked_example() {
        let p = fixtures::worked_problem();
        let st = run(&p, &Strategy::Unit, 3);
        let h3 = &st.trace()[1].h_next;
        assert!((h3 - fixtures::worked_h3()).amax() <= 1e-12);
        assert_eq!(st.accepted()[1].p, dvector![10.0, -2.0, 4.0, 1.0, 0.0, 0.0]);
        assert_eq!(st.accepted()[2].p, dvector![-1.0, 2.0, 1.0, 0.0, -2.0, 1.0]);
        assert_eq!(st.verdict(), Verdict::Solved);
    }

    #[test]
    fn duplicated_consistent_row_is_skipped() {
        let p = Problem::new(dmatrix![1.0, 0.0; 2.0, 0.0], dvector![1.0, 2.0]).unwrap();
        let st1 = run(&p, &Strategy::Huang, 1);
        let st2 = st1.step(&p, &Strategy::Huang).unwrap();
        assert_eq!(st2.trace()[1].outcome, Outcome::Skipped);
        assert_eq!(st1.x(), st2.x());
        assert_eq!(st1.h(), st2.h());
        assert!(st2.skipped().contains(&1));
        let sol = solve(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Unit).unwrap();
        assert_eq!(sol.rank, 1);
        assert_relative_eq!(sol.x[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn duplicated_inconsistent_row_is_incompatible() {
        let p = Problem::new(dmatrix![1.0, 0.0; 2.0, 0.0], dvector![1.0, 3.0]).unwrap();
        let st = run(&p, &Strategy::Unit, 2);
        assert_eq!(st.verdict(), Verdict::Incompatible { row: 1 });
        assert!(st.step(&p, &Strategy::Unit).is_err());
        let err = solve(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Unit).unwrap_err();
        assert_eq!(err, Error::Incompatible { row: 1 });
        assert!(err.to_string().contains("equation 2"));
    }

    #[test]
    fn worked_example_at_the_mean() {
        let p = fixtures::worked_problem();
        let sol = solve(
            &p,
            DVector::from_element(6, 1.0),
            DMatrix::identity(6, 6),
            &Strategy::Unit,
        )
        .unwrap();
        let want = [
            4079.0 / 630.0,
            -419.0 / 315.0,
            1241.0 / 630.0,
            92.0 / 63.0,
            96.0 / 35.0,
            41.0 / 210.0,
        ];
        for (got, want) in sol.x.iter().zip(want) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        let reference = [6.47, -1.33, 1.97, 1.46, 2.74, 0.195];
        for (got, want) in sol.x.iter().zip(reference) {
            assert!((got - want).abs() <= 5e-3);
        }
        assert_eq!(sol.rank, 3);
    }

    #[test]
    fn diagonal_system() {
        let p = Problem::new(dmatrix![2.0, 0.0; 0.0, 4.0], dvector![2.0, 8.0]).unwrap();
        for strategy in [Strategy::Huang, Strategy::Unit] {
            let sol = solve(&p, DVector::zeros(2), DMatrix::identity(2, 2), &strategy).unwrap();
            assert_relative_eq!(sol.x[0], 1.0, epsilon = 1e-15);
            assert_relative_eq!(sol.x[1], 2.0, epsilon = 1e-15);
            let f = verify_factorization(&p, sol.state.accepted());
            assert_eq!(f.l[(0, 1)], 0.0);
            assert_eq!(f.l[(1, 0)], 0.0);
        }
    }

    #[test]
    fn variety_points_solve_the_system() {
        let p = fixtures::worked_problem();
        let sol = solve(
            &p,
            DVector::from_element(6, 1.0),
            DMatrix::identity(6, 6),
            &Strategy::Unit,
        )
        .unwrap();
        assert_eq!(sol.state.variety_point(&DVector::zeros(6)).unwrap(), sol.x);
        let mut e6 = DVector::zeros(6);
        e6[5] = 1.0;
        let y = sol.state.variety_point(&e6).unwrap();
        assert!(p.max_residual(&y, 0..3) <= 1e-9);
        assert_ne!(y, sol.x);

        let sq = Problem::new(dmatrix![2.0, 1.0; 1.0, 3.0], dvector![1.0, 1.0]).unwrap();
        let sol = solve(&sq, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Huang).unwrap();
        assert!(sol.state.h().amax() <= 1e-15);
        let y = sol.state.variety_point(&dvector![5.0, -7.0]).unwrap();
        assert!((y - &sol.x).amax() <= 1e-14);

        let fresh = AbsState::init(&sq, DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(
            fresh.variety_point(&DVector::zeros(2)),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn factorization_of_worked_example() {
        let p = fixtures::worked_problem();
        let sol = solve(
            &p,
            DVector::from_element(6, 1.0),
            DMatrix::identity(6, 6),
            &Strategy::Unit,
        )
        .unwrap();
        let f = verify_factorization(&p, sol.state.accepted());
        assert_eq!(f.l[(0, 0)], 15.0);
        assert_eq!(f.l[(1, 1)], 21.0);
        assert_eq!(f.l[(2, 2)], -2.0);
        assert!(f.offdiag_max <= 1e-12);
        assert!(f.is_lower_triangular(1e-9));

        let one = Problem::new(dmatrix![1.0, 2.0, 2.0], dvector![1.0]).unwrap();
        let sol = solve(&one, DVector::zeros(3), DMatrix::identity(3, 3), &Strategy::Huang).unwrap();
        let f = verify_factorization(&one, sol.state.accepted());
        assert_eq!(f.l.shape(), (1, 1));
        assert_relative_eq!(f.l[(0, 0)], 9.0, epsilon = 1e-14);
    }

    #[test]
    fn nullspace_of_worked_example() {
        let p = fixtures::worked_problem();
        let st0 = run(&p, &Strategy::Unit, 0);
        let c0 = verify_nullspace(&st0, &p);
        assert_eq!((c0.max_h_a, c0.max_ht_w), (0.0, 0.0));

        let st2 = run(&p, &Strategy::Unit, 2);
        let h3 = st2.h();
        assert_eq!((h3 * p.row(0)).amax(), 0.0);
        assert_eq!((h3 * p.row(1)).amax(), 0.0);
        assert!(verify_nullspace(&st2, &p).holds(1e-12));

        let sq = Problem::new(dmatrix![2.0, 1.0; 1.0, 3.0], dvector![1.0, 1.0]).unwrap();
        let sol = solve(&sq, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Unit).unwrap();
        assert!(sol.state.h().amax() <= 1e-15);
    }

    #[test]
    fn zero_row_with_zero_rhs_is_skipped() {
        let p = Problem::new(dmatrix![1.0, 1.0; 0.0, 0.0], dvector![2.0, 0.0]).unwrap();
        let sol = solve(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Huang).unwrap();
        assert_eq!(sol.rank, 1);
        let p = Problem::new(dmatrix![1.0, 1.0; 0.0, 0.0], dvector![2.0, 1.0]).unwrap();
        assert_eq!(
            solve(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Huang).unwrap_err(),
            Error::Incompatible { row: 1 }
        );
    }

    struct Reversed;

    impl ParameterRule for Reversed {
        fn z(&self, _row: usize, a: &DVector<f64>, _h: &DMatrix<f64>) -> DVector<f64> {
            a * 2.0
        }
        fn w(&self, _row: usize, a: &DVector<f64>, _h: &DMatrix<f64>) -> DVector<f64> {
            DVector::from_element(a.len(), 1.0)
        }
    }

    #[test]
    fn custom_strategy_and_fallback() {
        let p = fixtures::worked_problem();
        let strategy = Strategy::Custom(Arc::new(Reversed));
        let sol = solve(&p, DVector::zeros(6), DMatrix::identity(6, 6), &strategy).unwrap();
        assert!(p.max_residual(&sol.x, 0..3) <= p.residual_tol());

        // w = e_2 would give wᵀHa = 0 on row 1; the solver falls back to w = s.
        let p = Problem::new(dmatrix![1.0, 0.0, 0.0; 0.0, 0.0, 1.0], dvector![1.0, 1.0]).unwrap();
        let sol = solve(&p, DVector::zeros(3), DMatrix::identity(3, 3), &Strategy::Unit).unwrap();
        assert_eq!(sol.state.accepted()[1].w, dvector![0.0, 0.0, 1.0]);
        assert!(p.max_residual(&sol.x, 0..2) <= 1e-15);
    }

    #[test]
    fn deterministic_repeat() {
        let p = fixtures::worked_problem();
        let a = solve(&p, DVector::zeros(6), DMatrix::identity(6, 6), &Strategy::Huang).unwrap();
        let b = solve(&p, DVector::zeros(6), DMatrix::identity(6, 6), &Strategy::Huang).unwrap();
        assert_eq!(a, b);
    }
}
