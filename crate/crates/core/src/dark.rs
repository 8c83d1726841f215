//! Detector dark counts: the modified channel, its exact reparametrization
//! as another erasure-Pauli channel, and the click-conditioned channel.
//!
//! A lost photon triggers a spurious click with probability `p_dc`, assigned
//! a maximally mixed polarization. That converts erasure weight into an
//! isotropic Pauli contribution: the channel with dark counts equals an
//! erasure-Pauli channel with effective transmissivity
//! `eta' = eta + (1-eta) p_dc` and distribution
//! `p'_k = r p_k + (1-r)/4`, `r = eta/eta'`.

use serde::Serialize;

use crate::channel::{choi_from_action, CapacityBounds, ErasurePauliChannel, FLAG_INDEX};
use crate::density::DensityMatrix;
use crate::linalg::ComplexMatrix;
use crate::pauli::PauliDistribution;
use crate::{Error, Result};

/// Dark-count probability per detection window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DarkCountParams {
    p_dc: f64,
}

impl DarkCountParams {
    pub fn new(p_dc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_dc) {
            return Err(Error::InvalidInput(format!(
                "dark-count probability {p_dc} outside [0, 1]"
            )));
        }
        Ok(Self { p_dc })
    }

    /// No dark counts.
    pub fn none() -> Self {
        Self { p_dc: 0.0 }
    }

    pub fn p_dc(&self) -> f64 {
        self.p_dc
    }
}

/// Effective transmissivity `eta + (1-eta) p_dc`: the total click
/// probability.
pub fn effective_transmissivity(eta: f64, p_dc: f64) -> f64 {
    eta + (1.0 - eta) * p_dc
}

/// Applies the channel with dark counts to a qubit state. The erasure weight
/// shrinks to `(1-eta)(1-p_dc)` and the polarization block gains the
/// maximally mixed dark-count contribution `(1-eta) p_dc I/2`.
pub fn apply_with_dark_counts(
    ch: &ErasurePauliChannel,
    dc: DarkCountParams,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    // Unit input trace by contract; weights written exactly.
    let pol = ch.dist().apply_matrix(rho.as_matrix());
    let dark = (1.0 - ch.eta()) * dc.p_dc();
    let mut out = ComplexMatrix::zeros(3);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = pol[(i, j)] * ch.eta();
        }
        out[(i, i)] += 0.5 * dark;
    }
    out[(FLAG_INDEX, FLAG_INDEX)] =
        num_complex::Complex64::new((1.0 - ch.eta()) * (1.0 - dc.p_dc()), 0.0);
    DensityMatrix::new(out)
}

pub(crate) fn apply_matrix_with_dark_counts(
    ch: &ErasurePauliChannel,
    dc: DarkCountParams,
    m: &ComplexMatrix,
) -> ComplexMatrix {
    let mut out = ch.apply_matrix(m);
    let dark = (1.0 - ch.eta()) * dc.p_dc();
    // Move the dark-count share of the flag weight onto the mixed
    // polarization block.
    out[(FLAG_INDEX, FLAG_INDEX)] = m.trace() * (1.0 - ch.eta()) * (1.0 - dc.p_dc());
    for i in 0..2 {
        out[(i, i)] += m.trace() * (0.5 * dark);
    }
    out
}

/// The equivalent erasure-Pauli channel `(eta', p')`.
///
/// Its plain action reproduces [`apply_with_dark_counts`] on every input.
/// In the degenerate case `eta' = 0` (no photons and no dark counts) the
/// channel is complete erasure and the identity distribution is returned as
/// a placeholder; it is never applied.
pub fn effective_channel(ch: &ErasurePauliChannel, dc: DarkCountParams) -> ErasurePauliChannel {
    let eta_prime = effective_transmissivity(ch.eta(), dc.p_dc());
    if eta_prime == 0.0 {
        return ErasurePauliChannel::new(0.0, PauliDistribution::identity())
            .expect("valid degenerate channel");
    }
    let r = ch.eta() / eta_prime;
    let p = ch.dist().probs();
    let dist = PauliDistribution::new(std::array::from_fn(|k| r * p[k] + (1.0 - r) * 0.25))
        .expect("convex mixture of distributions");
    ErasurePauliChannel::new(eta_prime, dist).expect("eta' in [0, 1]")
}

/// The postselected qubit channel conditioned on a detector click:
/// `[eta P(rho) + (1-eta) p_dc I/2] / eta'`. Undefined when the click
/// probability is zero.
pub fn click_conditioned(
    ch: &ErasurePauliChannel,
    dc: DarkCountParams,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    let eta_prime = effective_transmissivity(ch.eta(), dc.p_dc());
    if eta_prime == 0.0 {
        return Err(Error::UndefinedConditioning);
    }
    let mut out = ch.dist().apply_matrix(rho.as_matrix()).scale_re(ch.eta());
    let dark = (1.0 - ch.eta()) * dc.p_dc();
    for i in 0..2 {
        out[(i, i)] += 0.5 * dark;
    }
    DensityMatrix::new(out.scale_re(1.0 / eta_prime))
}

/// Choi state of the dark-count channel, assembled operationally from its
/// action on the matrix-unit basis. Equals the closed-form Choi of
/// [`effective_channel`]; that identity is what makes the
/// reparametrization exact.
pub fn choi_with_dark_counts(ch: &ErasurePauliChannel, dc: DarkCountParams) -> DensityMatrix {
    let m = choi_from_action(|unit| apply_matrix_with_dark_counts(ch, dc, unit));
    DensityMatrix::new(m).expect("Choi of a channel is a valid state")
}

/// Capacity bounds for the dephasing channel with dark counts: builds the
/// distribution {1-p, 0, 0, p}, reparametrizes it through
/// [`effective_channel`], and returns the general bounds of the result.
/// At `p_dc = 0` both bounds collapse to the exact dephasing capacity.
pub fn dephasing_with_dc_bounds(eta: f64, p: f64, p_dc: f64) -> Result<CapacityBounds> {
    let ch = ErasurePauliChannel::new(eta, PauliDistribution::dephasing(p)?)?;
    Ok(effective_channel(&ch, DarkCountParams::new(p_dc)?).capacity_bounds())
}
