//! The ABS recursion with a Gaussian right-hand side.
//!
//! `η` is carried as an [`AffineVector`] over a [`GaussianBasis`]; the
//! iterate `ξ_i`, residuals `τ_i` and steplengths `α_i` stay exact affine
//! forms of the same basis, so their normal distributions are read off
//! directly. The Abaffian and search vectors come from the same geometry
//! routine as the deterministic solver and never depend on `η`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::abs::{
    self, check_init, check_shape, geometry, inf_norm, Outcome, Problem, Strategy, Tolerances, Verdict,
};
use crate::error::{Error, Result};
use crate::gaussian::{AffineScalar, AffineVector, DistSummary, GaussianBasis, ScalarSummary};

/// `Aξ = η` with `η = c + M z`, `z ~ N(mean, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticProblem {
    a: DMatrix<f64>,
    basis: GaussianBasis,
    rhs: AffineVector,
    identity_cov: bool,
    tol: Tolerances,
}

impl StochasticProblem {
    /// `η ~ N_m(mean, I_m)`.
    pub fn new(a: DMatrix<f64>, mean: DVector<f64>) -> Result<Self> {
        check_shape(&a)?;
        let m = a.nrows();
        if mean.len() != m {
            return Err(Error::Dimension(format!(
                "rhs mean has length {}, matrix has {m} rows",
                mean.len()
            )));
        }
        Ok(Self {
            a,
            basis: GaussianBasis::new(mean)?,
            rhs: AffineVector::new(DVector::zeros(m), DMatrix::identity(m, m))?,
            identity_cov: true,
            tol: Tolerances::default(),
        })
    }

    /// `η ~ N_m(mean, cov)` for SPD `cov`, whitened through its Cholesky
    /// factor: `η = mean + L z`, `z ~ N(0, I)`.
    pub fn with_covariance(a: DMatrix<f64>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        check_shape(&a)?;
        let m = a.nrows();
        if mean.len() != m || cov.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "rhs mean/covariance must have length {m} / shape {m}x{m}"
            )));
        }
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::Parameter("rhs covariance is not symmetric positive definite".into()))?;
        Ok(Self {
            a,
            basis: GaussianBasis::standard(m)?,
            rhs: AffineVector::new(mean, chol.l())?,
            identity_cov: false,
            tol: Tolerances::default(),
        })
    }

    /// General form: `η` is any affine form of `basis`.
    pub fn from_form(a: DMatrix<f64>, basis: GaussianBasis, rhs: AffineVector) -> Result<Self> {
        check_shape(&a)?;
        if rhs.len() != a.nrows() || rhs.dim() != basis.dim() {
            return Err(Error::Dimension(format!(
                "rhs form is {}x{}, expected {} rows over a basis of width {}",
                rhs.len(),
                rhs.dim(),
                a.nrows(),
                basis.dim()
            )));
        }
        let m = a.nrows();
        let identity_cov =
            rhs.dim() == m && rhs.constant.iter().all(|&c| c == 0.0) && rhs.coeffs == DMatrix::identity(m, m);
        Ok(Self {
            a,
            basis,
            rhs,
            identity_cov,
            tol: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn basis(&self) -> &GaussianBasis {
        &self.basis
    }

    /// `η` as an affine form of the basis.
    pub fn rhs_form(&self) -> &AffineVector {
        &self.rhs
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn has_identity_covariance(&self) -> bool {
        self.identity_cov
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

    pub fn rhs_mean(&self) -> DVector<f64> {
        self.rhs.mean(&self.basis).expect("rhs width matches basis")
    }

    /// The deterministic system at a realisation `z` of the basis.
    pub fn realise(&self, z: &DVector<f64>) -> Result<Problem> {
        Ok(Problem::new(self.a.clone(), self.rhs.evaluate(z)?)?.with_tolerances(self.tol))
    }

    /// The deterministic system `Ax = Eη`.
    pub fn at_mean(&self) -> Problem {
        self.realise(self.basis.mean())
            .expect("basis mean has basis width")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticStep {
    pub row: usize,
    pub p: DVector<f64>,
    pub w: DVector<f64>,
    pub a_dot_p: f64,
    pub tau: AffineScalar,
    pub alpha: AffineScalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticRecord {
    pub row: usize,
    pub s: DVector<f64>,
    pub tau: AffineScalar,
    pub outcome: Outcome,
    pub h_next: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticState {
    next_row: usize,
    xi1: DVector<f64>,
    xi: AffineVector,
    h: DMatrix<f64>,
    accepted: Vec<StochasticStep>,
    skipped: BTreeSet<usize>,
    verdict: Verdict,
    trace: Vec<StochasticRecord>,
}

impl StochasticState {
    /// `xi1` is deterministic; it is lifted to an affine form with zero
    /// coefficients.
    pub fn init(problem: &StochasticProblem, xi1: DVector<f64>, h1: DMatrix<f64>) -> Result<Self> {
        check_init(problem.cols(), &xi1, &h1)?;
        Ok(Self {
            next_row: 0,
            xi: AffineVector::deterministic(xi1.clone(), problem.basis().dim()),
            xi1,
            h: h1,
            accepted: Vec::new(),
            skipped: BTreeSet::new(),
            verdict: Verdict::Running,
            trace: Vec::new(),
        })
    }

    pub fn step_index(&self) -> usize {
        self.next_row + 1
    }

    pub fn processed(&self) -> usize {
        self.next_row
    }

    pub fn xi(&self) -> &AffineVector {
        &self.xi
    }

    pub fn initial(&self) -> &DVector<f64> {
        &self.xi1
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn accepted(&self) -> &[StochasticStep] {
        &self.accepted
    }

    pub fn skipped(&self) -> &BTreeSet<usize> {
        &self.skipped
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn trace(&self) -> &[StochasticRecord] {
        &self.trace
    }

    /// `τ = a_rowᵀ ξ − η_row` for the current iterate.
    pub fn residual_form(&self, problem: &StochasticProblem, row: usize) -> Result<AffineScalar> {
        if row >= problem.rows() {
            return Err(Error::Index {
                index: row,
                limit: problem.rows(),
            });
        }
        self.xi.dot(&problem.row(row))?.sub(&problem.rhs.component(row)?)
    }

    pub fn step(&self, problem: &StochasticProblem, strategy: &Strategy) -> Result<StochasticState> {
        if self.verdict != Verdict::Running {
            return Err(Error::State(format!("cannot step a {:?} state", self.verdict)));
        }
        let row = self.next_row;
        if row >= problem.rows() {
            return Err(Error::State("all rows already processed".into()));
        }
        let tol = problem.tolerances();
        let a = problem.row(row);
        let tau = self.residual_form(problem, row)?;

        let mut next = self.clone();
        let (s, geom) = geometry(&self.h, &a, row, strategy, tol.zero, inf_norm(problem.matrix()))?;
        let outcome = match geom {
            None => {
                let zero_tol = tol.surely_zero * (1.0 + tau.constant.abs() + tau.coeffs.amax());
                if tau.is_surely_zero(zero_tol) {
                    next.skipped.insert(row);
                    Outcome::Skipped
                } else {
                    next.verdict = Verdict::Incompatible { row };
                    Outcome::Incompatible
                }
            }
            Some(g) => {
                let alpha = tau.scale(1.0 / g.a_dot_p);
                next.xi = self.xi.combine(&alpha, &g.p)?;
                next.h = g.h_next;
                next.accepted.push(StochasticStep {
                    row,
                    p: g.p,
                    w: g.w,
                    a_dot_p: g.a_dot_p,
                    tau: tau.clone(),
                    alpha,
                });
                Outcome::Accepted
            }
        };
        next.trace.push(StochasticRecord {
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

    fn accepted_at(&self, row: usize) -> Result<(usize, &StochasticStep)> {
        if let Some(found) = self.accepted.iter().enumerate().find(|(_, s)| s.row == row) {
            return Ok(found);
        }
        if self.skipped.contains(&row) {
            Err(Error::NoSteplength { row })
        } else {
            Err(Error::Index {
                index: row,
                limit: self.next_row,
            })
        }
    }

    /// Distribution of the steplength of an accepted row.
    pub fn alpha_summary(&self, problem: &StochasticProblem, row: usize) -> Result<ScalarSummary> {
        self.accepted_at(row)?.1.alpha.summary(problem.basis())
    }

    /// `a_lᵀξ` for the current iterate; equals `η_l` exactly once row `l`
    /// has been accepted.
    pub fn satisfied_form(&self, problem: &StochasticProblem, l: usize) -> Result<AffineScalar> {
        if l >= self.next_row {
            return Err(Error::Index {
                index: l,
                limit: self.next_row,
            });
        }
        if self.skipped.contains(&l) {
            return Err(Error::NoSteplength { row: l });
        }
        self.xi.dot(&problem.row(l))
    }

    pub fn residual_distribution(&self, problem: &StochasticProblem, l: usize) -> Result<ScalarSummary> {
        self.satisfied_form(problem, l)?.summary(problem.basis())
    }

    /// Residual distribution of an accepted row rebuilt from the stored
    /// steplength summaries and their cross-covariances:
    /// mean `a_iᵀξ_1 − Σ_j (Eα_j) a_iᵀp_j − v_i`, variance
    /// `1 + Σ_{j,k} cov(α_j, α_k)(a_iᵀp_j)(a_iᵀp_k)` over earlier accepted
    /// steps. Only valid for identity-covariance `η`.
    pub fn tau_recursion(&self, problem: &StochasticProblem, row: usize) -> Result<ScalarSummary> {
        if !problem.has_identity_covariance() {
            return Err(Error::Parameter(
                "steplength recursion assumes identity covariance of the right-hand side".into(),
            ));
        }
        let (t, _) = self.accepted_at(row)?;
        let a = problem.row(row);
        let earlier = &self.accepted[..t];
        let proj: Vec<f64> = earlier.iter().map(|s| a.dot(&s.p)).collect();

        let mut mean = a.dot(&self.xi1) - problem.basis().mean()[row];
        for (s, ap) in earlier.iter().zip(&proj) {
            mean -= s.alpha.mean(problem.basis())? * ap;
        }
        let mut variance = 1.0;
        for (j, sj) in earlier.iter().enumerate() {
            for (k, sk) in earlier.iter().enumerate() {
                variance += sj.alpha.cross_cov(&sk.alpha)? * proj[j] * proj[k];
            }
        }
        Ok(ScalarSummary { mean, variance })
    }

    /// [`Self::tau_recursion`] divided through by `a_iᵀp_i`.
    pub fn alpha_recursion(&self, problem: &StochasticProblem, row: usize) -> Result<ScalarSummary> {
        let tau = self.tau_recursion(problem, row)?;
        let d = self.accepted_at(row)?.1.a_dot_p;
        Ok(ScalarSummary {
            mean: tau.mean / d,
            variance: tau.variance / (d * d),
        })
    }

    pub fn nullspace(&self, problem: &StochasticProblem) -> abs::NullspaceCheck {
        let det = problem.at_mean();
        abs::nullspace_of(&self.h, &det, self.next_row, self.accepted.iter().map(|s| &s.w))
    }
}

/// Result of a successful stochastic solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticSolution {
    pub xi: AffineVector,
    pub summary: DistSummary,
    /// `(row, summary)` for every accepted row.
    pub alpha_summaries: Vec<(usize, ScalarSummary)>,
    pub rank: usize,
    pub state: StochasticState,
}

pub fn solve_s(
    problem: &StochasticProblem,
    xi1: DVector<f64>,
    h1: DMatrix<f64>,
    strategy: &Strategy,
) -> Result<StochasticSolution> {
    let mut state = StochasticState::init(problem, xi1, h1)?;
    while state.verdict == Verdict::Running {
        state = state.step(problem, strategy)?;
    }
    if let Verdict::Incompatible { row } = state.verdict {
        return Err(Error::Incompatible { row });
    }
    let alpha_summaries = state
        .accepted
        .iter()
        .map(|s| Ok((s.row, s.alpha.summary(problem.basis())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StochasticSolution {
        xi: state.xi.clone(),
        summary: state.xi.summary(problem.basis())?,
        alpha_summaries,
        rank: problem.rows() - state.skipped.len(),
        state,
    })
}

/// A symmetric interval around the mean and its coverage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub prob: f64,
}

/// `[mean − kσ, mean + kσ]` for `k ∈ {1, 2, 3}` with coverage 0.6827,
/// 0.9545, 0.9973. A zero-variance summary gives the degenerate interval
/// with probability 1.
pub fn alpha_interval(summary: &ScalarSummary, k: u32) -> Result<Interval> {
    let prob = match k {
        1 => 0.6827,
        2 => 0.9545,
        3 => 0.9973,
        _ => return Err(Error::Parameter(format!("k must be 1, 2 or 3, got {k}"))),
    };
    let sigma = summary.std_dev();
    if sigma == 0.0 {
        return Ok(Interval {
            lo: summary.mean,
            hi: summary.mean,
            prob: 1.0,
        });
    }
    let half = k as f64 * sigma;
    Ok(Interval {
        lo: summary.mean - half,
        hi: summary.mean + half,
        prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn worked_state(steps: usize) -> (StochasticProblem, StochasticState) {
        let p = fixtures::worked_stochastic();
        let mut st =
            StochasticState::init(&p, DVector::from_element(6, 1.0), DMatrix::identity(6, 6)).unwrap();
        for _ in 0..steps {
            st = st.step(&p, &Strategy::Unit).unwrap();
        }
        (p, st)
    }

    #[test]
    fn init_lifts_deterministic_start() {
        let (_, st) = worked_state(0);
        assert_eq!(st.xi().constant, DVector::from_element(6, 1.0));
        assert_eq!(st.xi().coeffs, DMatrix::zeros(6, 3));
        let p = StochasticProblem::new(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        assert!(StochasticState::init(&p, DVector::zeros(2), DMatrix::identity(2, 2)).is_ok());
        assert!(matches!(
            StochasticState::init(&p, DVector::zeros(2), dmatrix![1.0, 2.0; 2.0, 4.0]),
            Err(Error::InvalidInit(_))
        ));
    }

    #[test]
    fn residual_forms_of_worked_example() {
        let (p, st) = worked_state(0);
        let tau1 = st.residual_form(&p, 0).unwrap();
        assert_eq!(tau1.constant, 5.0);
        assert_eq!(tau1.coeffs, dvector![-1.0, 0.0, 0.0]);
        let s = tau1.summary(p.basis()).unwrap();
        assert_eq!((s.mean, s.variance), (-1.0, 1.0));

        // τ_2 = (95 − 10η_1 − 15η_2)/15: variance 13/9. Its mean is −29/3;
        // the worked example prints 1/3, which disagrees with its own ξ_3.
        let (p, st) = worked_state(1);
        let s = st.residual_form(&p, 1).unwrap().summary(p.basis()).unwrap();
        assert_relative_eq!(s.variance, 13.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(s.mean, -29.0 / 3.0, epsilon = 1e-13);

        let (p, st) = worked_state(2);
        let tau3 = st.residual_form(&p, 2).unwrap();
        assert_relative_eq!(tau3.constant, -615.0 / 315.0, epsilon = 1e-13);
        let s = tau3.summary(p.basis()).unwrap();
        assert_relative_eq!(s.mean, -507.0 / 315.0, epsilon = 1e-13);
        assert_relative_eq!(s.variance, 187794.0 / 99225.0, epsilon = 1e-13);
        assert!((s.mean + 1.61).abs() < 5e-3 && (s.variance - 1.89).abs() < 5e-3);
    }

    #[test]
    fn steplengths_of_worked_example() {
        let (p, st) = worked_state(3);
        let a1 = st.alpha_summary(&p, 0).unwrap();
        assert_relative_eq!(a1.mean, -1.0 / 15.0, epsilon = 1e-15);
        assert_relative_eq!(a1.variance, 1.0 / 225.0, epsilon = 1e-16);
        let a2 = st.alpha_summary(&p, 1).unwrap();
        assert_relative_eq!(a2.mean, -29.0 / 63.0, epsilon = 1e-14);
        assert_relative_eq!(a2.variance, 13.0 / 3969.0, epsilon = 1e-16);
        assert_eq!(st.accepted()[1].p, dvector![10.0, -2.0, 4.0, 1.0, 0.0, 0.0]);
        let a3 = st.alpha_summary(&p, 2).unwrap();
        assert_relative_eq!(a3.mean, 507.0 / 630.0, epsilon = 1e-13);
        assert_relative_eq!(a3.variance, 187794.0 / 99225.0 / 4.0, epsilon = 1e-13);
    }

    #[test]
    fn second_iterate_matches_reference_expression() {
        let (p, st) = worked_state(1);
        let xi2 = st.xi();
        let c = [10.0, 0.0, 20.0, 15.0, 5.0, 15.0];
        let r = [1.0, 3.0, -1.0, 0.0, 2.0, 0.0];
        for i in 0..6 {
            assert_relative_eq!(xi2.constant[i], c[i] / 15.0, epsilon = 1e-15);
            assert_relative_eq!(xi2.coeffs[(i, 0)], r[i] / 15.0, epsilon = 1e-15);
        }
        let p1 = dvector![1.0, 3.0, -1.0, 0.0, 2.0, 0.0];
        assert!((xi2.cov() - &p1 * p1.transpose() / 225.0).amax() < 1e-15);
        assert_eq!(st.trace()[0].h_next, fixtures::worked_h2());
        let _ = p;
    }

    #[test]
    fn final_iterate_matches_reference_expressions() {
        let (p, st) = worked_state(3);
        let xi4 = st.xi();
        // Numerators over 630 of the reference ξ_4 components.
        let rows = [
            [-865.0, 479.0, 120.0, 315.0],
            [-850.0, -388.0, 300.0, -630.0],
            [-535.0, -199.0, 300.0, -315.0],
            [440.0, 20.0, 30.0, 0.0],
            [1440.0, 558.0, -360.0, 630.0],
            [15.0, -237.0, 180.0, -315.0],
        ];
        for (i, r) in rows.iter().enumerate() {
            assert_relative_eq!(xi4.constant[i], r[0] / 630.0, epsilon = 1e-12);
            for j in 0..3 {
                assert_relative_eq!(xi4.coeffs[(i, j)], r[j + 1] / 630.0, epsilon = 1e-12);
            }
        }
        let cov = xi4.cov();
        let want = (479.0f64.powi(2) + 120.0f64.powi(2) + 315.0f64.powi(2)) / 630.0f64.powi(2);
        assert_relative_eq!(cov[(0, 0)], want, epsilon = 1e-12);
        assert_relative_eq!(cov[(0, 0)], 171533.0 / 198450.0, epsilon = 1e-12);
        assert!((cov[(0, 0)] - fixtures::worked_reference_sigma()[(0, 0)]).abs() > 0.3);
        let _ = p;
    }

    #[test]
    fn residual_distribution_is_the_rhs() {
        let (p, st) = worked_state(3);
        for l in 0..3 {
            let f = st.satisfied_form(&p, l).unwrap();
            assert!(f.constant.abs() <= 1e-12);
            for j in 0..3 {
                let e = if j == l { 1.0 } else { 0.0 };
                assert!((f.coeffs[j] - e).abs() <= 1e-12);
            }
        }
        let s = st.residual_distribution(&p, 2).unwrap();
        assert_relative_eq!(s.mean, 2.0, epsilon = 1e-12);
        assert_relative_eq!(s.variance, 1.0, epsilon = 1e-12);
        assert!(matches!(
            st.residual_distribution(&p, 3),
            Err(Error::Index { .. })
        ));

        let ident = StochasticProblem::new(DMatrix::identity(2, 2), dvector![3.0, 7.0]).unwrap();
        let sol = solve_s(
            &ident,
            DVector::zeros(2),
            DMatrix::identity(2, 2),
            &Strategy::Huang,
        )
        .unwrap();
        assert_eq!(sol.summary.mean, dvector![3.0, 7.0]);
        assert_eq!(sol.summary.cov, DMatrix::identity(2, 2));
        for l in 0..2 {
            let s = sol.state.residual_distribution(&ident, l).unwrap();
            assert_eq!((s.mean, s.variance), (ident.basis().mean()[l], 1.0));
        }
    }

    #[test]
    fn zero_row_is_incompatible() {
        let p = StochasticProblem::new(dmatrix![1.0, 1.0; 0.0, 0.0], dvector![1.0, 0.0]).unwrap();
        let err = solve_s(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Huang).unwrap_err();
        assert_eq!(err, Error::Incompatible { row: 1 });
    }

    #[test]
    fn surely_dependent_row_is_skipped() {
        // η = (z, 2z): the second equation is twice the first with a
        // right-hand side that is surely twice the first.
        let basis = GaussianBasis::new(dvector![0.5]).unwrap();
        let rhs = AffineVector::new(DVector::zeros(2), dmatrix![1.0; 2.0]).unwrap();
        let p = StochasticProblem::from_form(dmatrix![1.0, 0.0; 2.0, 0.0], basis, rhs).unwrap();
        let st0 = StochasticState::init(&p, DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        let st1 = st0.step(&p, &Strategy::Huang).unwrap();
        let st2 = st1.step(&p, &Strategy::Huang).unwrap();
        assert_eq!(st2.trace()[1].outcome, Outcome::Skipped);
        assert_eq!(st1.xi(), st2.xi());
        assert_eq!(st1.h(), st2.h());
        assert!(matches!(
            st2.alpha_summary(&p, 1),
            Err(Error::NoSteplength { row: 1 })
        ));
        assert_eq!(st2.verdict(), Verdict::Solved);

        // A nearly dependent right-hand side is still random on that row.
        let a = dmatrix![1.0, 0.0; 2.0, 0.0];
        let p =
            StochasticProblem::with_covariance(a, dvector![1.0, 2.0], dmatrix![1.0, 2.0; 2.0, 4.0 + 1e-6])
                .unwrap();
        let err = solve_s(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Huang).unwrap_err();
        assert_eq!(err, Error::Incompatible { row: 1 });
        assert!(StochasticProblem::with_covariance(
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            -DMatrix::identity(2, 2)
        )
        .is_err());
    }

    #[test]
    fn whitened_problem_matches_covariance() {
        let cov = dmatrix![2.0, 0.5; 0.5, 1.0];
        let p = StochasticProblem::with_covariance(DMatrix::identity(2, 2), dvector![1.0, -1.0], cov.clone())
            .unwrap();
        let sol = solve_s(&p, DVector::zeros(2), DMatrix::identity(2, 2), &Strategy::Unit).unwrap();
        assert!((sol.summary.cov - cov).amax() < 1e-14);
        assert!((sol.summary.mean - dvector![1.0, -1.0]).amax() < 1e-14);
        let st = &sol.state;
        assert!(matches!(st.alpha_recursion(&p, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn recursion_matches_affine_summaries() {
        let (p, st) = worked_state(3);
        for row in 0..3 {
            let direct = st.alpha_summary(&p, row).unwrap();
            let rec = st.alpha_recursion(&p, row).unwrap();
            assert_relative_eq!(direct.mean, rec.mean, max_relative = 1e-12);
            assert_relative_eq!(direct.variance, rec.variance, max_relative = 1e-12);
        }
    }

    #[test]
    fn h_sequence_matches_deterministic_run() {
        let (p, st) = worked_state(3);
        let det = abs::solve(
            &p.at_mean(),
            DVector::from_element(6, 1.0),
            DMatrix::identity(6, 6),
            &Strategy::Unit,
        )
        .unwrap();
        for (s, d) in st.trace().iter().zip(det.state.trace()) {
            assert_eq!(s.h_next, d.h_next);
        }
    }

    #[test]
    fn intervals() {
        let unit = ScalarSummary {
            mean: 0.0,
            variance: 1.0,
        };
        assert_eq!(
            alpha_interval(&unit, 1).unwrap(),
            Interval {
                lo: -1.0,
                hi: 1.0,
                prob: 0.6827
            }
        );
        assert_eq!(alpha_interval(&unit, 2).unwrap().prob, 0.9545);
        let point = ScalarSummary {
            mean: 0.0,
            variance: 0.0,
        };
        assert_eq!(
            alpha_interval(&point, 3).unwrap(),
            Interval {
                lo: 0.0,
                hi: 0.0,
                prob: 1.0
            }
        );
        let a1 = ScalarSummary {
            mean: -1.0 / 15.0,
            variance: 1.0 / 225.0,
        };
        let iv = alpha_interval(&a1, 3).unwrap();
        assert_relative_eq!(iv.lo, -4.0 / 15.0, epsilon = 1e-15);
        assert_relative_eq!(iv.hi, 2.0 / 15.0, epsilon = 1e-15);
        assert_eq!(iv.prob, 0.9973);
        assert!(matches!(alpha_interval(&unit, 4), Err(Error::Parameter(_))));
        assert!(alpha_interval(&unit, 0).is_err());
    }

    #[test]
    fn skipped_rows_have_no_steplength() {
        let (p, st) = worked_state(1);
        assert!(matches!(st.alpha_summary(&p, 2), Err(Error::Index { .. })));
    }
}
