//! Machine-readable solve reports (`SolveReportFile`).
//!
//! Affine forms are written as `{constant, coefficients}` so every step can
//! be re-checked outside this crate. Floats use the shortest representation
//! that reads back to the identical bit pattern; non-finite deviations are
//! written as `null`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::abs::{AbsState, Outcome, Problem, Verdict};
use crate::gaussian::{AffineScalar, AffineVector, GaussianBasis, ScalarSummary};
use crate::oracle::McReport;
use crate::stochastic::{Interval, StochasticProblem, StochasticState};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictName {
    Solved,
    Incompatible,
    Running,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineScalarRecord {
    pub constant: f64,
    pub coefficients: Vec<f64>,
}

impl From<&AffineScalar> for AffineScalarRecord {
    fn from(s: &AffineScalar) -> Self {
        Self {
            constant: s.constant,
            coefficients: s.coeffs.iter().copied().collect(),
        }
    }
}

impl AffineScalarRecord {
    pub fn to_affine(&self) -> AffineScalar {
        AffineScalar::new(self.constant, DVector::from_column_slice(&self.coefficients))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineVectorRecord {
    pub constant: Vec<f64>,
    /// Row-major.
    pub coefficients: Vec<Vec<f64>>,
}

impl From<&AffineVector> for AffineVectorRecord {
    fn from(v: &AffineVector) -> Self {
        Self {
            constant: v.constant.iter().copied().collect(),
            coefficients: rows_of(&v.coeffs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub mean: f64,
    pub variance: f64,
}

impl From<ScalarSummary> for SummaryRecord {
    fn from(s: ScalarSummary) -> Self {
        Self {
            mean: s.mean,
            variance: s.variance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeName {
    Accepted,
    Skipped,
    Incompatible,
}

impl From<Outcome> for OutcomeName {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Accepted => OutcomeName::Accepted,
            Outcome::Skipped => OutcomeName::Skipped,
            Outcome::Incompatible => OutcomeName::Incompatible,
        }
    }
}

/// One processed row. For deterministic runs `tau.coefficients` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecordFile {
    pub row: usize,
    pub outcome: OutcomeName,
    pub s: Vec<f64>,
    pub tau: AffineScalarRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_summary: Option<SummaryRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_dot_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AffineScalarRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_summary: Option<SummaryRecord>,
    pub h_next: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRecord {
    pub row: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolutionRecord {
    Deterministic {
        x: Vec<f64>,
    },
    Gaussian {
        xi: AffineVectorRecord,
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
        alphas: Vec<AlphaRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCheckRecord {
    pub row: usize,
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub analytic_mean: f64,
    pub analytic_var: f64,
    #[serde(with = "finite_or_null")]
    pub mean_z: f64,
    #[serde(with = "finite_or_null")]
    pub var_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRecord {
    pub samples: usize,
    pub seed: u64,
    pub empirical_mean: Vec<f64>,
    pub empirical_cov: Vec<Vec<f64>>,
    pub analytic_mean: Vec<f64>,
    pub analytic_cov: Vec<Vec<f64>>,
    #[serde(with = "finite_or_null")]
    pub max_mean_z: f64,
    #[serde(with = "finite_or_null")]
    pub max_cov_dev: f64,
    pub per_alpha: Vec<AlphaCheckRecord>,
    pub mean_gate_passed: bool,
    pub cov_gate_passed: bool,
}

impl McRecord {
    pub fn new(r: &McReport, seed: u64) -> Self {
        Self {
            samples: r.samples_used,
            seed,
            empirical_mean: r.empirical_mean.iter().copied().collect(),
            empirical_cov: rows_of(&r.empirical_cov),
            analytic_mean: r.analytic_mean.iter().copied().collect(),
            analytic_cov: rows_of(&r.analytic_cov),
            max_mean_z: r.max_mean_z,
            max_cov_dev: r.max_cov_dev,
            per_alpha: r
                .per_alpha
                .iter()
                .map(|a| AlphaCheckRecord {
                    row: a.row,
                    empirical_mean: a.empirical_mean,
                    empirical_var: a.empirical_var,
                    analytic_mean: a.analytic_mean,
                    analytic_var: a.analytic_var,
                    mean_z: a.mean_z,
                    var_dev: a.var_dev,
                })
                .collect(),
            mean_gate_passed: r.mean_gate_passed,
            cov_gate_passed: r.cov_gate_passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    /// 1-based step.
    pub step: usize,
    pub k: u32,
    pub lo: f64,
    pub hi: f64,
    pub prob: f64,
}

impl IntervalRecord {
    pub fn new(step: usize, k: u32, iv: &Interval) -> Self {
        Self {
            step,
            k,
            lo: iv.lo,
            hi: iv.hi,
            prob: iv.prob,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub schema_version: u32,
    pub command: String,
    pub verdict: VerdictName,
    /// 0-based row that stopped the solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incompatible_row: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub skipped: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepRecordFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<McRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalRecord>,
}

fn verdict_parts(v: Verdict) -> (VerdictName, Option<usize>) {
    match v {
        Verdict::Solved => (VerdictName::Solved, None),
        Verdict::Running => (VerdictName::Running, None),
        Verdict::Incompatible { row } => (VerdictName::Incompatible, Some(row)),
    }
}

impl SolveReportFile {
    pub fn from_deterministic(command: &str, problem: &Problem, state: &AbsState, trace: bool) -> Self {
        let (verdict, incompatible_row) = verdict_parts(state.verdict());
        let steps = if trace {
            let mut accepted = state.accepted().iter();
            state
                .trace()
                .iter()
                .map(|rec| {
                    let acc = (rec.outcome == Outcome::Accepted)
                        .then(|| accepted.next())
                        .flatten();
                    StepRecordFile {
                        row: rec.row,
                        outcome: rec.outcome.into(),
                        s: rec.s.iter().copied().collect(),
                        tau: AffineScalarRecord {
                            constant: rec.tau,
                            coefficients: Vec::new(),
                        },
                        tau_summary: None,
                        p: acc.map(|a| a.p.iter().copied().collect()),
                        w: acc.map(|a| a.w.iter().copied().collect()),
                        a_dot_p: acc.map(|a| a.a_dot_p),
                        alpha: acc.map(|a| AffineScalarRecord {
                            constant: a.alpha,
                            coefficients: Vec::new(),
                        }),
                        alpha_summary: acc.map(|a| SummaryRecord {
                            mean: a.alpha,
                            variance: 0.0,
                        }),
                        h_next: rows_of(&rec.h_next),
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        let solved = state.verdict() == Verdict::Solved;
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            verdict,
            incompatible_row,
            rank: solved.then(|| problem.rows() - state.skipped().len()),
            skipped: state.skipped().iter().copied().collect(),
            steps,
            solution: solved.then(|| SolutionRecord::Deterministic {
                x: state.x().iter().copied().collect(),
            }),
            monte_carlo: None,
            interval: None,
        }
    }

    pub fn from_stochastic(
        command: &str,
        problem: &StochasticProblem,
        state: &StochasticState,
        trace: bool,
    ) -> Self {
        let basis = problem.basis();
        let summary = |s: &AffineScalar| s.summary(basis).ok().map(SummaryRecord::from);
        let (verdict, incompatible_row) = verdict_parts(state.verdict());
        let steps = if trace {
            let mut accepted = state.accepted().iter();
            state
                .trace()
                .iter()
                .map(|rec| {
                    let acc = (rec.outcome == Outcome::Accepted)
                        .then(|| accepted.next())
                        .flatten();
                    StepRecordFile {
                        row: rec.row,
                        outcome: rec.outcome.into(),
                        s: rec.s.iter().copied().collect(),
                        tau: (&rec.tau).into(),
                        tau_summary: summary(&rec.tau),
                        p: acc.map(|a| a.p.iter().copied().collect()),
                        w: acc.map(|a| a.w.iter().copied().collect()),
                        a_dot_p: acc.map(|a| a.a_dot_p),
                        alpha: acc.map(|a| (&a.alpha).into()),
                        alpha_summary: acc.and_then(|a| summary(&a.alpha)),
                        h_next: rows_of(&rec.h_next),
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        let solved = state.verdict() == Verdict::Solved;
        let solution = solved.then(|| gaussian_solution(basis, state));
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            verdict,
            incompatible_row,
            rank: solved.then(|| problem.rows() - state.skipped().len()),
            skipped: state.skipped().iter().copied().collect(),
            steps,
            solution,
            monte_carlo: None,
            interval: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        fs::write(path, self.to_json() + "\n")
    }

    pub fn read(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(std::io::Error::other)
    }
}

fn gaussian_solution(basis: &GaussianBasis, state: &StochasticState) -> SolutionRecord {
    let xi = state.xi();
    SolutionRecord::Gaussian {
        xi: xi.into(),
        mean: xi
            .mean(basis)
            .map(|m| m.iter().copied().collect())
            .unwrap_or_default(),
        cov: rows_of(&xi.cov()),
        alphas: state
            .accepted()
            .iter()
            .filter_map(|a| {
                let s = a.alpha.summary(basis).ok()?;
                Some(AlphaRecord {
                    row: a.row,
                    mean: s.mean,
                    variance: s.variance,
                })
            })
            .collect(),
    }
}

pub(crate) fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abs::Strategy;
    use crate::fixtures;
    use crate::stochastic::solve_s;
    use proptest::prelude::*;

    #[test]
    fn stochastic_trace_records_first_steplength() {
        let p = fixtures::worked_stochastic();
        let sol = solve_s(
            &p,
            DVector::from_element(6, 1.0),
            DMatrix::identity(6, 6),
            &Strategy::Unit,
        )
        .unwrap();
        let r = SolveReportFile::from_stochastic("solve", &p, &sol.state, true);
        let a1 = r.steps[0].alpha_summary.unwrap();
        assert!((a1.mean + 1.0 / 15.0).abs() < 1e-15);
        assert!((a1.variance - 1.0 / 225.0).abs() < 1e-16);
        assert_eq!(r.verdict, VerdictName::Solved);
        assert_eq!(r.rank, Some(3));
        let back = SolveReportFile::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn infinite_deviation_is_null() {
        let rec = AlphaCheckRecord {
            row: 0,
            empirical_mean: 0.0,
            empirical_var: 1.0,
            analytic_mean: 0.0,
            analytic_var: 0.0,
            mean_z: 0.0,
            var_dev: f64::INFINITY,
        };
        let text = serde_json::to_string(&rec).unwrap();
        assert!(text.contains("\"var_dev\":null"));
        let back: AlphaCheckRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.var_dev, f64::INFINITY);
    }

    proptest! {
        #[test]
        fn floats_round_trip_bitwise(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..12)) {
            let rec = AffineScalarRecord { constant: values[0], coefficients: values.clone() };
            let back: AffineScalarRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
            prop_assert_eq!(back.constant.to_bits(), rec.constant.to_bits());
            for (a, b) in back.coefficients.iter().zip(&rec.coefficients) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
