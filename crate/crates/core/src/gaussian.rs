//! Affine functions of a fixed Gaussian basis.
//!
//! Every random quantity produced by the stochastic solver is written as
//! `constant + coeffs · z` where `z ~ N(mean, I)` is the basis. Means,
//! variances and covariances then follow in closed form and stay exact
//! through every update the solver performs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// The source of randomness: `dim` independent unit-variance normals with
/// the given mean vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBasis {
    mean: DVector<f64>,
}

impl GaussianBasis {
    pub fn new(mean: DVector<f64>) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::Dimension("gaussian basis needs dim >= 1".into()));
        }
        Ok(Self { mean })
    }

    /// Standard normal basis `N(0, I_dim)`.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }
}

/// A scalar `c + r·z`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineScalar {
    pub constant: f64,
    pub coeffs: DVector<f64>,
}

/// Mean and variance of a scalar Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSummary {
    pub mean: f64,
    pub variance: f64,
}

impl ScalarSummary {
    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }
}

impl AffineScalar {
    pub fn new(constant: f64, coeffs: DVector<f64>) -> Self {
        Self { constant, coeffs }
    }

    /// The deterministic value `c`.
    pub fn constant(c: f64, dim: usize) -> Self {
        Self::new(c, DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn mean(&self, basis: &GaussianBasis) -> Result<f64> {
        check_width(self.dim(), basis.dim())?;
        Ok(self.constant + self.coeffs.dot(basis.mean()))
    }

    /// `‖r‖²`; the basis has identity covariance.
    pub fn variance(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    pub fn summary(&self, basis: &GaussianBasis) -> Result<ScalarSummary> {
        Ok(ScalarSummary {
            mean: self.mean(basis)?,
            variance: self.variance(),
        })
    }

    pub fn cross_cov(&self, other: &AffineScalar) -> Result<f64> {
        check_width(self.dim(), other.dim())?;
        Ok(self.coeffs.dot(&other.coeffs))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.constant * factor, &self.coeffs * factor)
    }

    pub fn sub(&self, other: &AffineScalar) -> Result<Self> {
        check_width(self.dim(), other.dim())?;
        Ok(Self::new(
            self.constant - other.constant,
            &self.coeffs - &other.coeffs,
        ))
    }

    /// Value at a realisation `z` of the basis.
    pub fn evaluate(&self, z: &DVector<f64>) -> Result<f64> {
        check_width(self.dim(), z.len())?;
        Ok(self.constant + self.coeffs.dot(z))
    }

    /// True iff this is the zero random variable, i.e. `P(x = 0) = 1`.
    pub fn is_surely_zero(&self, tol: f64) -> bool {
        self.constant.abs() <= tol && self.coeffs.amax() <= tol
    }

    /// `1e-12 · (1 + |c| + ‖r‖∞)`.
    pub fn default_zero_tol(&self) -> f64 {
        1e-12 * (1.0 + self.constant.abs() + self.coeffs.amax())
    }

    pub fn is_surely_zero_default(&self) -> bool {
        self.is_surely_zero(self.default_zero_tol())
    }
}

/// A vector `c + M z` with `M` of shape `len × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineVector {
    pub constant: DVector<f64>,
    pub coeffs: DMatrix<f64>,
}

/// Mean vector and covariance matrix of a vector Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSummary {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl DistSummary {
    /// Symmetric within `1e-12` relative and no eigenvalue below
    /// `-1e-10 · λ_max`.
    pub fn is_symmetric_psd(&self) -> bool {
        is_symmetric_psd(&self.cov)
    }
}

pub(crate) fn is_symmetric_psd(cov: &DMatrix<f64>) -> bool {
    if !cov.is_square() {
        return false;
    }
    let scale = cov.amax().max(f64::MIN_POSITIVE);
    if (cov - cov.transpose()).amax() > 1e-12 * scale {
        return false;
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let top = eig.max().max(0.0);
    eig.iter().all(|&l| l >= -1e-10 * top)
}

impl AffineVector {
    pub fn new(constant: DVector<f64>, coeffs: DMatrix<f64>) -> Result<Self> {
        if coeffs.nrows() != constant.len() {
            return Err(Error::Dimension(format!(
                "affine vector: constant has length {}, coefficients have {} rows",
                constant.len(),
                coeffs.nrows()
            )));
        }
        Ok(Self { constant, coeffs })
    }

    /// A deterministic vector lifted onto a basis of width `dim`.
    pub fn deterministic(constant: DVector<f64>, dim: usize) -> Self {
        let n = constant.len();
        Self {
            constant,
            coeffs: DMatrix::zeros(n, dim),
        }
    }

    pub fn len(&self) -> usize {
        self.constant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constant.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn mean(&self, basis: &GaussianBasis) -> Result<DVector<f64>> {
        check_width(self.dim(), basis.dim())?;
        Ok(&self.constant + &self.coeffs * basis.mean())
    }

    /// `M Mᵀ`.
    pub fn cov(&self) -> DMatrix<f64> {
        &self.coeffs * self.coeffs.transpose()
    }

    pub fn summary(&self, basis: &GaussianBasis) -> Result<DistSummary> {
        Ok(DistSummary {
            mean: self.mean(basis)?,
            cov: self.cov(),
        })
    }

    pub fn component(&self, i: usize) -> Result<AffineScalar> {
        if i >= self.len() {
            return Err(Error::Index {
                index: i,
                limit: self.len(),
            });
        }
        Ok(AffineScalar::new(
            self.constant[i],
            self.coeffs.row(i).transpose(),
        ))
    }

    /// The scalar `aᵀx`.
    pub fn dot(&self, a: &DVector<f64>) -> Result<AffineScalar> {
        if a.len() != self.len() {
            return Err(Error::Dimension(format!(
                "inner product of length {} with affine vector of length {}",
                a.len(),
                self.len()
            )));
        }
        Ok(AffineScalar::new(a.dot(&self.constant), self.coeffs.tr_mul(a)))
    }

    /// `x − s·p`, exactly.
    pub fn combine(&self, s: &AffineScalar, p: &DVector<f64>) -> Result<Self> {
        if p.len() != self.len() {
            return Err(Error::Dimension(format!(
                "direction has length {}, affine vector has length {}",
                p.len(),
                self.len()
            )));
        }
        check_width(self.dim(), s.dim())?;
        Ok(Self {
            constant: &self.constant - p * s.constant,
            coeffs: &self.coeffs - p * s.coeffs.transpose(),
        })
    }

    pub fn evaluate(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        check_width(self.dim(), z.len())?;
        Ok(&self.constant + &self.coeffs * z)
    }
}

fn check_width(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::Dimension(format!(
            "basis width {left} does not match {right}"
        )));
    }
    Ok(())
}
