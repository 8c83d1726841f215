//! The erasure-Pauli channel: flagged-output representation, Choi state,
//! capacity bounds, specializations, and the zero-capacity predicate.
//!
//! With probability `1 - eta` the output is an orthogonal flag state |e>
//! (no detection); otherwise the Pauli channel acts on the polarization.
//! The output lives in a fixed 3-dimensional space with basis order
//! {|H>, |V>, |e>}, so the flag occupies index 2. Choi states are 6×6 on
//! qubit ⊗ qutrit with the retained qubit first.

use serde::Serialize;

use crate::density::DensityMatrix;
use crate::linalg::ComplexMatrix;
use crate::pauli::{binary_entropy, PauliDistribution};
use crate::{Error, Result};

/// Basis index of the erasure flag in the 3-dimensional output space.
pub const FLAG_INDEX: usize = 2;

/// Flagged mixture of photon loss and a Pauli polarization channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErasurePauliChannel {
    eta: f64,
    dist: PauliDistribution,
}

/// Two-sided bounds on the two-way assisted capacity, in ebits per use.
///
/// `exact` is set when the bounds coincide to 1e-12, in which case the
/// capacity is known exactly (the erasure-dephasing case).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

/// Tolerance at which coinciding bounds are flagged exact.
pub const EXACTNESS_TOL: f64 = 1e-12;

impl CapacityBounds {
    fn new(lower: f64, upper: f64) -> Self {
        // The hashing bound never exceeds the upper bound analytically;
        // min() only guards ulp-level rounding between the two entropy
        // evaluations.
        let lower = lower.max(0.0).min(upper);
        Self {
            lower,
            upper,
            exact: (upper - lower).abs() < EXACTNESS_TOL,
        }
    }
}

/// One arm of the channel-ensemble decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EnsembleArm {
    Pauli(PauliDistribution),
    CompleteErasure,
}

impl ErasurePauliChannel {
    pub fn new(eta: f64, dist: PauliDistribution) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidInput(format!(
                "transmissivity {eta} outside [0, 1]"
            )));
        }
        Ok(Self { eta, dist })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dist(&self) -> &PauliDistribution {
        &self.dist
    }

    /// Applies the channel to a qubit state, producing the 3×3 flagged
    /// output: the polarization block is `eta * P(rho)`, the flag entry is
    /// exactly `1 - eta`, and all flag coherences are exactly zero.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
        // The input has unit trace by contract, so the flag weight is
        // written exactly rather than scaled by the float trace.
        let pol = self.dist.apply_matrix(rho.as_matrix());
        let mut out = ComplexMatrix::zeros(3);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = pol[(i, j)] * self.eta;
            }
        }
        out[(FLAG_INDEX, FLAG_INDEX)] = num_complex::Complex64::new(1.0 - self.eta, 0.0);
        DensityMatrix::new(out)
    }

    /// Linear extension to arbitrary 2×2 inputs; the flag weight scales with
    /// the input trace.
    pub(crate) fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let pol = self.dist.apply_matrix(m);
        let mut out = ComplexMatrix::zeros(3);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = pol[(i, j)] * self.eta;
            }
        }
        out[(FLAG_INDEX, FLAG_INDEX)] = m.trace() * (1.0 - self.eta);
        out
    }

    /// Choi state on qubit ⊗ qutrit: `(1-eta) * (I/2)⊗|e><e| + eta * σ_P`
    /// with the Pauli Choi state embedded in the polarization block.
    pub fn choi(&self) -> DensityMatrix {
        let mut out =
            embed_polarization_choi(self.dist.choi_state().as_matrix()).scale_re(self.eta);
        let w = 0.5 * (1.0 - self.eta);
        out[(FLAG_INDEX, FLAG_INDEX)] += w;
        out[(3 + FLAG_INDEX, 3 + FLAG_INDEX)] += w;
        DensityMatrix::new(out).expect("channel Choi state is a valid state")
    }

    /// Hashing lower bound `eta * max(0, 1 - H(p))` and upper bound
    /// `eta * Phi(p)` on the two-way assisted capacity, in ebits/use.
    pub fn capacity_bounds(&self) -> CapacityBounds {
        let lower = self.eta * (1.0 - self.dist.shannon_entropy());
        let upper = self.eta * self.dist.phi_upper();
        CapacityBounds::new(lower, upper)
    }

    /// Zero-capacity predicate: true iff `eta == 0` or `p_max <= 1/2`
    /// (boundary inclusive). Equivalent to the Choi state being PPT or the
    /// transmissivity vanishing.
    pub fn is_zero_capacity(&self) -> bool {
        self.eta == 0.0 || self.dist.p_max() <= 0.5
    }

    /// Decomposition as a two-arm channel ensemble: the Pauli channel with
    /// weight `eta` and the complete-erasure channel with weight `1 - eta`.
    /// Re-mixing the arms reproduces [`apply`](Self::apply) exactly.
    pub fn ensemble_decomposition(&self) -> [(f64, EnsembleArm); 2] {
        [
            (self.eta, EnsembleArm::Pauli(self.dist)),
            (1.0 - self.eta, EnsembleArm::CompleteErasure),
        ]
    }
}

/// Embeds a 4×4 qubit⊗qubit matrix into qubit⊗qutrit by mapping the second
/// qubit's basis onto the polarization indices {0, 1} of the qutrit.
pub(crate) fn embed_polarization_choi(m4: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m4.dim(), 4);
    let mut out = ComplexMatrix::zeros(6);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(i * 3 + j, k * 3 + l)] = m4[(i * 2 + j, k * 2 + l)];
                }
            }
        }
    }
    out
}

/// Choi state assembled operationally from the channel action on the
/// matrix-unit basis: `(1/2) Σ_ij |i><j| ⊗ E(|i><j|)`. Used as an
/// independent route against the closed-form [`ErasurePauliChannel::choi`].
pub(crate) fn choi_from_action(apply: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(6);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2);
            unit[(i, j)] = num_complex::Complex64::new(1.0, 0.0);
            let block = apply(&unit);
            for a in 0..3 {
                for b in 0..3 {
                    out[(i * 3 + a, j * 3 + b)] = block[(a, b)] * 0.5;
                }
            }
        }
    }
    out
}

/// Upper bound on the erasure-depolarizing capacity:
/// `eta * (1 - H2(3p/4))` for `p <= 2/3`, zero beyond.
pub fn capacity_edp_upper(eta: f64, p: f64) -> Result<f64> {
    check_unit_interval(eta, "transmissivity")?;
    check_unit_interval(p, "depolarizing probability")?;
    if p <= 2.0 / 3.0 {
        Ok(eta * (1.0 - binary_entropy(0.75 * p)?))
    } else {
        Ok(0.0)
    }
}

/// Exact two-way assisted capacity of the erasure-dephasing channel,
/// `eta * (1 - H2(p))`.
///
/// For `p > 1/2` this is the capacity of the channel relabeled to dephasing
/// probability `1 - p` (a local Z relabeling that cannot change capacity);
/// numerically the symmetric formula already covers both halves.
pub fn capacity_edh(eta: f64, p: f64) -> Result<f64> {
    check_unit_interval(eta, "transmissivity")?;
    check_unit_interval(p, "dephasing probability")?;
    Ok(eta * (1.0 - binary_entropy(p)?))
}

fn check_unit_interval(x: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("{name} {x} outside [0, 1]")));
    }
    Ok(())
}
