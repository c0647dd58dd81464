//! JSON problem files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "A": [[1, 3, -1, 0, 2, 0], [0, -2, 4, 1, 0, 0], [0, -4, 1, 0, -2, 1]],
//!   "rhs": { "kind": "gaussian", "mean": [6, 12, 2] },
//!   "x1": "ones",
//!   "H1": "identity",
//!   "strategy": "unit",
//!   "seed": 1,
//!   "samples": 100000
//! }
//! ```
//!
//! `rhs` is either `{"kind": "deterministic", "b": [...]}` or
//! `{"kind": "gaussian", "mean": [...]}` (identity covariance). A gaussian
//! rhs may carry an optional SPD `"cov"` matrix, which is whitened. `x1` is
//! `"ones"`, `"zeros"` or an explicit vector; `H1` is `"identity"` or an
//! explicit row-major matrix. `strategy` defaults to `"huang"`. Optional
//! `tolerances` override any of `zero`, `residual`, `null`, `tri`,
//! `surely_zero`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abs::{Problem, Strategy, Tolerances};
use crate::stochastic::StochasticProblem;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl FileError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        FileError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Rhs {
    Deterministic {
        b: Vec<f64>,
    },
    Gaussian {
        mean: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cov: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fill {
    Ones,
    Zeros,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialIterate {
    Named(Fill),
    Explicit(Vec<f64>),
}

impl Default for InitialIterate {
    fn default() -> Self {
        InitialIterate::Named(Fill::Ones)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedMatrix {
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialAbaffian {
    Named(NamedMatrix),
    Explicit(Vec<Vec<f64>>),
}

impl Default for InitialAbaffian {
    fn default() -> Self {
        InitialAbaffian::Named(NamedMatrix::Identity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    #[default]
    Huang,
    Unit,
}

impl From<StrategyName> for Strategy {
    fn from(s: StrategyName) -> Self {
        match s {
            StrategyName::Huang => Strategy::Huang,
            StrategyName::Unit => Strategy::Unit,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub zero: Option<f64>,
    pub residual: Option<f64>,
    pub null: Option<f64>,
    pub tri: Option<f64>,
    pub surely_zero: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub rhs: Rhs,
    #[serde(default)]
    pub x1: InitialIterate,
    #[serde(rename = "H1", default)]
    pub h1: InitialAbaffian,
    #[serde(default)]
    pub strategy: StrategyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// A validated problem ready to solve.
#[derive(Debug, Clone)]
pub enum LoadedProblem {
    Deterministic(Problem),
    Gaussian(StochasticProblem),
}

impl ProblemFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, FileError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self, FileError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| FileError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<(), FileError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(FileError::invalid(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        let (m, n) = self.shape()?;
        if m > n {
            return Err(FileError::invalid(
                "A",
                format!("{m} equations in {n} unknowns; need rows <= cols"),
            ));
        }
        match &self.rhs {
            Rhs::Deterministic { b } => check_len("rhs.b", b.len(), m)?,
            Rhs::Gaussian { mean, cov } => {
                check_len("rhs.mean", mean.len(), m)?;
                if let Some(cov) = cov {
                    check_square("rhs.cov", cov, m)?;
                }
            }
        }
        if let InitialIterate::Explicit(x) = &self.x1 {
            check_len("x1", x.len(), n)?;
        }
        if let InitialAbaffian::Explicit(h) = &self.h1 {
            check_square("H1", h, n)?;
        }
        if let Some(t) = &self.tolerances {
            let all = [
                ("tolerances.zero", t.zero),
                ("tolerances.residual", t.residual),
                ("tolerances.null", t.null),
                ("tolerances.tri", t.tri),
                ("tolerances.surely_zero", t.surely_zero),
            ];
            for (field, v) in all {
                if let Some(v) = v {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(FileError::invalid(field, "must be a finite non-negative number"));
                    }
                }
            }
        }
        if let Some(s) = self.samples {
            if s < 2 {
                return Err(FileError::invalid("samples", format!("need at least 2, got {s}")));
            }
        }
        Ok(())
    }

    fn shape(&self) -> Result<(usize, usize), FileError> {
        let m = self.a.len();
        if m == 0 {
            return Err(FileError::invalid("A", "matrix has no rows"));
        }
        let n = self.a[0].len();
        if n == 0 {
            return Err(FileError::invalid("A", "matrix has no columns"));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != n {
                return Err(FileError::invalid(
                    format!("A[{i}]"),
                    format!("row has {} entries, expected {n}", row.len()),
                ));
            }
        }
        Ok((m, n))
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        to_matrix(&self.a)
    }

    pub fn initial_iterate(&self) -> DVector<f64> {
        let n = self.cols();
        match &self.x1 {
            InitialIterate::Named(Fill::Ones) => DVector::from_element(n, 1.0),
            InitialIterate::Named(Fill::Zeros) => DVector::zeros(n),
            InitialIterate::Explicit(x) => DVector::from_column_slice(x),
        }
    }

    pub fn initial_abaffian(&self) -> DMatrix<f64> {
        let n = self.cols();
        match &self.h1 {
            InitialAbaffian::Named(NamedMatrix::Identity) => DMatrix::identity(n, n),
            InitialAbaffian::Explicit(h) => to_matrix(h),
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(o) = &self.tolerances {
            tol.zero = o.zero.unwrap_or(tol.zero);
            tol.residual = o.residual.unwrap_or(tol.residual);
            tol.null = o.null.unwrap_or(tol.null);
            tol.tri = o.tri.unwrap_or(tol.tri);
            tol.surely_zero = o.surely_zero.unwrap_or(tol.surely_zero);
        }
        tol
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.rhs, Rhs::Gaussian { .. })
    }

    pub fn to_problem(&self) -> Result<LoadedProblem, FileError> {
        let a = self.matrix();
        let wrap = |e: crate::Error| FileError::invalid("rhs", e.to_string());
        Ok(match &self.rhs {
            Rhs::Deterministic { b } => LoadedProblem::Deterministic(
                Problem::new(a, DVector::from_column_slice(b))
                    .map_err(wrap)?
                    .with_tolerances(self.tolerances()),
            ),
            Rhs::Gaussian { mean, cov } => {
                let mean = DVector::from_column_slice(mean);
                let p = match cov {
                    None => StochasticProblem::new(a, mean),
                    Some(c) => StochasticProblem::with_covariance(a, mean, to_matrix(c)),
                }
                .map_err(|e| FileError::invalid("rhs.cov", e.to_string()))?;
                LoadedProblem::Gaussian(p.with_tolerances(self.tolerances()))
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }
}

fn check_len(field: &str, got: usize, want: usize) -> Result<(), FileError> {
    if got != want {
        return Err(FileError::invalid(
            field,
            format!("has length {got}, expected {want}"),
        ));
    }
    Ok(())
}

fn check_square(field: &str, rows: &[Vec<f64>], n: usize) -> Result<(), FileError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(FileError::invalid(field, format!("must be {n}x{n}")));
    }
    Ok(())
}

pub(crate) fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(m, n, |i, j| rows[i][j])
}
