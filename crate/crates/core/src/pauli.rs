//! Pauli-channel algebra on qubits.
//!
//! A Pauli channel applies one of {I, X, Y, Z} at random. Everything here
//! (channel application, Choi states, entropies, the distillability witness)
//! is a function of the probability 4-vector over those operators.
//!
//! Operator ordering is fixed to (I, X, Y, Z) everywhere in the public API:
//! index 0 = I, 1 = X, 2 = Y, 3 = Z. All logarithms are base 2 and
//! `0·log 0 = 0` by continuity.

use num_complex::Complex64;
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// Sums within this distance of 1 are renormalized; anything further out is
/// rejected as a genuinely malformed distribution rather than float drift.
const SUM_DRIFT_TOL: f64 = 1e-9;
/// Negativity below this is clamped to zero at construction.
const COMPONENT_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The four Pauli matrices in the fixed (I, X, Y, Z) order.
pub(crate) fn pauli_matrices() -> [ComplexMatrix; 4] {
    let i = ComplexMatrix::identity(2);
    let x = ComplexMatrix::from_rows(&[&[c(0., 0.), c(1., 0.)], &[c(1., 0.), c(0., 0.)]]);
    let y = ComplexMatrix::from_rows(&[&[c(0., 0.), c(0., -1.)], &[c(0., 1.), c(0., 0.)]]);
    let z = ComplexMatrix::from_rows(&[&[c(1., 0.), c(0., 0.)], &[c(0., 0.), c(-1., 0.)]]);
    [i, x, y, z]
}

/// Probability distribution over the Pauli operators (I, X, Y, Z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliDistribution {
    p: [f64; 4],
}

impl PauliDistribution {
    /// Builds a distribution from raw probabilities.
    ///
    /// Components must lie in [0, 1] (up to 1e-12 slack) and the sum must be
    /// within 1e-9 of one; the vector is renormalized to absorb float drift.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        let mut q = [0.0f64; 4];
        for (k, &pk) in p.iter().enumerate() {
            if !pk.is_finite() || !(-COMPONENT_TOL..=1.0 + COMPONENT_TOL).contains(&pk) {
                return Err(Error::InvalidInput(format!(
                    "probability p[{k}] = {pk} outside [0, 1]"
                )));
            }
            q[k] = pk.clamp(0.0, 1.0);
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > SUM_DRIFT_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, more than {SUM_DRIFT_TOL:.0e} from 1"
            )));
        }
        for qk in &mut q {
            *qk /= sum;
        }
        Ok(Self { p: q })
    }

    /// The noiseless channel: identity with probability one.
    pub fn identity() -> Self {
        Self {
            p: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Uniform over the four operators.
    pub fn uniform() -> Self {
        Self { p: [0.25; 4] }
    }

    /// Depolarizing error distribution {1 - 3p/4, p/4, p/4, p/4}.
    pub fn isotropic(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "depolarizing probability {p} outside [0, 1]"
            )));
        }
        Self::new([1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p])
    }

    /// Dephasing error distribution {1 - p, 0, 0, p}.
    pub fn dephasing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "dephasing probability {p} outside [0, 1]"
            )));
        }
        Self::new([1.0 - p, 0.0, 0.0, p])
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    /// Largest component max_k p_k.
    pub fn p_max(&self) -> f64 {
        self.p.iter().copied().fold(0.0, f64::max)
    }

    /// Applies the channel: Σ_k p_k P_k ρ P_k†. The input must be a qubit
    /// state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
        DensityMatrix::new(self.apply_matrix(rho.as_matrix()))
    }

    /// Linear extension of the channel to arbitrary 2×2 complex matrices,
    /// used to assemble Choi states from the matrix-unit basis.
    pub(crate) fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let paulis = pauli_matrices();
        let mut out = ComplexMatrix::zeros(2);
        for (pk, sigma) in self.p.iter().zip(&paulis) {
            if *pk == 0.0 {
                continue;
            }
            out.add_assign_scaled(&sigma.matmul(m).matmul(&sigma.adjoint()), *pk);
        }
        out
    }

    /// Choi state (id ⊗ P)(|Φ+><Φ+|) with |Φ+> = (|00> + |11>)/√2,
    /// normalized to trace one. The channel acts on the transmitted (second)
    /// qubit; the result is Bell-diagonal with eigenvalues {p_k}.
    pub fn choi_state(&self) -> DensityMatrix {
        let mut out = ComplexMatrix::zeros(4);
        for (pk, bell) in self.p.iter().zip(bell_projectors()) {
            out.add_assign_scaled(&bell, *pk);
        }
        DensityMatrix::new(out).expect("Bell mixture is a valid state")
    }

    /// Shannon entropy −Σ p_k log₂ p_k in bits, in [0, 2].
    pub fn shannon_entropy(&self) -> f64 {
        -self
            .p
            .iter()
            .filter(|&&pk| pk > 0.0)
            .map(|&pk| pk * pk.log2())
            .sum::<f64>()
    }

    /// Upper-bound factor on the two-way assisted capacity of the channel:
    /// `1 - H2(p_max)` when `p_max >= 1/2`, zero otherwise. Ties in the
    /// maximum are irrelevant since only the value enters.
    pub fn phi_upper(&self) -> f64 {
        let p_max = self.p_max();
        if p_max >= 0.5 {
            1.0 - binary_entropy(p_max).expect("p_max is a probability")
        } else {
            0.0
        }
    }

    /// Partial-transpose witness on the Choi state.
    ///
    /// Transposes the transmitted qubit of [`choi_state`](Self::choi_state)
    /// and reports the minimum eigenvalue; negativity is equivalent to
    /// two-qubit distillability and occurs exactly for `p_max > 1/2`.
    pub fn npt_witness(&self) -> NptWitness {
        let pt = self.choi_state().as_matrix().partial_transpose_second(2, 2);
        let min_pt_eigenvalue = pt.min_eigenvalue();
        NptWitness {
            is_npt: min_pt_eigenvalue < -1e-12,
            min_pt_eigenvalue,
        }
    }
}

/// Result of the partial-transpose distillability test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NptWitness {
    pub is_npt: bool,
    pub min_pt_eigenvalue: f64,
}

/// Projectors onto (I⊗P_k)|Φ+> for k = I, X, Y, Z, i.e. onto the Bell
/// states Φ+, Ψ+, Ψ−, Φ−. All four are real 4×4 matrices.
pub(crate) fn bell_projectors() -> [ComplexMatrix; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi_plus = [c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)];
    let psi_plus = [c(0., 0.), c(s, 0.), c(s, 0.), c(0., 0.)];
    // (I⊗Y)|Φ+> = i(|01> - |10>)/√2; the global phase drops in the projector.
    let psi_minus = [c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)];
    let phi_minus = [c(s, 0.), c(0., 0.), c(0., 0.), c(-s, 0.)];
    [
        ComplexMatrix::outer(&phi_plus),
        ComplexMatrix::outer(&psi_plus),
        ComplexMatrix::outer(&psi_minus),
        ComplexMatrix::outer(&phi_minus),
    ]
}

/// Binary Shannon entropy −x log₂ x − (1−x) log₂(1−x) in bits, with the
/// endpoint convention H₂(0) = H₂(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}
