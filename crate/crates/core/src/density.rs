//! Validated density matrices.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// Max elementwise deviation from Hermiticity accepted at construction.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed negativity of the smallest eigenvalue.
pub const PSD_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive-semidefinite complex matrix.
///
/// Qubit states are 2×2; the flagged channel output (basis {H, V, e}) is
/// 3×3; Choi states are 4×4 (qubit⊗qubit) or 6×6 (qubit⊗qutrit).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (each within the
    /// module tolerances) and wraps the matrix.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_psd_tolerance(mat, PSD_TOL)
    }

    /// Like [`DensityMatrix::new`] but with a caller-chosen positivity
    /// tolerance. Monte-Carlo Choi estimates are unit-trace and Hermitian by
    /// construction yet carry statistical negativity of order 1/sqrt(n), so
    /// they are admitted with a widened bound.
    pub(crate) fn with_psd_tolerance(mat: ComplexMatrix, psd_tol: f64) -> Result<Self> {
        let herm = mat.hermiticity_deviation();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity deviation {herm:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} differs from 1 beyond {TRACE_TOL:.0e}"
            )));
        }
        let min_eig = mat.min_eigenvalue();
        if min_eig < -psd_tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min_eig:.3e} below -{psd_tol:.0e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Projector onto a pure state; the amplitude vector is normalized.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let scale = 1.0 / norm_sq.sqrt();
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a * scale).collect();
        Self::new(ComplexMatrix::outer(&v))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.mat.hermitian_eigenvalues()
    }
}
