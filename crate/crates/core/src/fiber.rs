//! Fiber model: loss and polarization-mode-dispersion noise versus distance.
//!
//! Maps physical fiber parameters to an erasure-Pauli channel at each
//! distance. Two regimes are supported: depolarizing-dominated (isotropic
//! Pauli errors, short decoherence lengths of order 10-100 m) and
//! dephasing-dominated (active polarization control leaves Z errors only,
//! with a much larger decoherence length set by the photon coherence time
//! and the PMD coefficient).
//!
//! Units are fixed at the parameter boundary and never converted again:
//! distances in km, times in ps, bandwidth in GHz, loss in dB/km, PMD
//! coefficient in ps/√km.

use serde::Serialize;

use crate::channel::ErasurePauliChannel;
use crate::pauli::PauliDistribution;
use crate::{Error, Result};

/// Which PMD noise regime the link operates in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PmdRegime {
    /// Isotropic Pauli errors with a user-supplied decoherence length
    /// (characteristic scale 0.01-0.1 km) and floor probability `p_inf`
    /// (1 for complete depolarization).
    DepolarizingDominated {
        decoherence_length_km: f64,
        p_inf: f64,
    },
    /// Z errors only; the decoherence length is derived from the photon
    /// bandwidth and the PMD coefficient, and the floor is 1/2.
    DephasingDominated,
}

/// Physical parameters of the fiber link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberParams {
    pub alpha_db_per_km: f64,
    pub delta_nu_ghz: f64,
    pub d_pmd_ps_sqrt_km: f64,
    pub regime: PmdRegime,
}

impl FiberParams {
    pub fn new(
        alpha_db_per_km: f64,
        delta_nu_ghz: f64,
        d_pmd_ps_sqrt_km: f64,
        regime: PmdRegime,
    ) -> Result<Self> {
        if !(alpha_db_per_km > 0.0) {
            return Err(Error::InvalidInput(format!(
                "loss rate must be positive, got {alpha_db_per_km} dB/km"
            )));
        }
        if !(delta_nu_ghz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bandwidth must be positive, got {delta_nu_ghz} GHz"
            )));
        }
        if !(d_pmd_ps_sqrt_km > 0.0) {
            return Err(Error::InvalidInput(format!(
                "PMD coefficient must be positive, got {d_pmd_ps_sqrt_km} ps/sqrt(km)"
            )));
        }
        if let PmdRegime::DepolarizingDominated {
            decoherence_length_km,
            p_inf,
        } = regime
        {
            if !(decoherence_length_km > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "decoherence length must be positive, got {decoherence_length_km} km"
                )));
            }
            if !(p_inf > 0.0 && p_inf <= 1.0) {
                return Err(Error::InvalidInput(format!("p_inf {p_inf} outside (0, 1]")));
            }
        }
        Ok(Self {
            alpha_db_per_km,
            delta_nu_ghz,
            d_pmd_ps_sqrt_km,
            regime,
        })
    }

    /// Standard telecom link under active polarization control:
    /// 0.2 dB/km, 100 GHz, 0.1 ps/√km, dephasing regime.
    pub fn standard_dephasing() -> Self {
        Self::new(0.2, 100.0, 0.1, PmdRegime::DephasingDominated).unwrap()
    }

    /// Transmissivity `10^(-alpha d / 10)`, in (0, 1] with η(0) = 1.
    pub fn transmissivity(&self, d_km: f64) -> Result<f64> {
        check_distance(d_km)?;
        Ok(10f64.powf(-self.alpha_db_per_km * d_km / 10.0))
    }

    /// Decoherence length governing the error build-up: the configured value
    /// in the depolarizing regime, `2 τ² / D_PMD²` in the dephasing regime.
    pub fn decoherence_length_km(&self) -> f64 {
        match self.regime {
            PmdRegime::DepolarizingDominated {
                decoherence_length_km,
                ..
            } => decoherence_length_km,
            PmdRegime::DephasingDominated => {
                dephasing_length_km(self.delta_nu_ghz, self.d_pmd_ps_sqrt_km)
                    .expect("validated at construction")
            }
        }
    }

    /// Saturation value of the error probability: `p_inf` in the
    /// depolarizing regime, 1/2 (complete dephasing) otherwise.
    pub fn p_inf(&self) -> f64 {
        match self.regime {
            PmdRegime::DepolarizingDominated { p_inf, .. } => p_inf,
            PmdRegime::DephasingDominated => 0.5,
        }
    }

    /// Pauli error probability `p(d) = p_inf (1 - e^(-d/L))`: zero at d = 0,
    /// strictly increasing, saturating at `p_inf`.
    pub fn pauli_probability(&self, d_km: f64) -> Result<f64> {
        check_distance(d_km)?;
        Ok(self.p_inf() * (1.0 - (-d_km / self.decoherence_length_km()).exp()))
    }

    /// The erasure-Pauli channel seen after `d_km` of fiber: transmissivity
    /// from the loss law and an isotropic (depolarizing regime) or dephasing
    /// (dephasing regime) error distribution at probability p(d).
    pub fn channel_at(&self, d_km: f64) -> Result<ErasurePauliChannel> {
        let eta = self.transmissivity(d_km)?;
        let p = self.pauli_probability(d_km)?;
        let dist = match self.regime {
            PmdRegime::DepolarizingDominated { .. } => PauliDistribution::isotropic(p)?,
            PmdRegime::DephasingDominated => PauliDistribution::dephasing(p)?,
        };
        ErasurePauliChannel::new(eta, dist)
    }
}

fn check_distance(d_km: f64) -> Result<()> {
    if !(d_km >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "distance {d_km} km is negative"
        )));
    }
    Ok(())
}

/// Photon coherence time `τ = 1/(2π Δν)` in ps, for a bandwidth in GHz.
pub fn coherence_time_ps(delta_nu_ghz: f64) -> Result<f64> {
    if !(delta_nu_ghz > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bandwidth must be positive, got {delta_nu_ghz} GHz"
        )));
    }
    Ok(1000.0 / (std::f64::consts::TAU * delta_nu_ghz))
}

/// Dephasing decoherence length `2 τ² / D_PMD²` in km.
pub fn dephasing_length_km(delta_nu_ghz: f64, d_pmd_ps_sqrt_km: f64) -> Result<f64> {
    if !(d_pmd_ps_sqrt_km > 0.0) {
        return Err(Error::InvalidInput(format!(
            "PMD coefficient must be positive, got {d_pmd_ps_sqrt_km} ps/sqrt(km)"
        )));
    }
    let tau = coherence_time_ps(delta_nu_ghz)?;
    Ok(2.0 * tau * tau / (d_pmd_ps_sqrt_km * d_pmd_ps_sqrt_km))
}

/// Distance at which the depolarizing probability reaches 2/3 and the
/// capacity upper bound hits zero: `L ln(p_inf / (p_inf - 2/3))`, reducing
/// to `L ln 3` at `p_inf = 1`. Infinite when the floor never exceeds 2/3.
pub fn max_distance_depolarizing(l_km: f64, p_inf: f64) -> Result<f64> {
    if !(l_km > 0.0) {
        return Err(Error::InvalidInput(format!(
            "decoherence length {l_km} km not positive"
        )));
    }
    if !(p_inf > 0.0 && p_inf <= 1.0) {
        return Err(Error::InvalidInput(format!("p_inf {p_inf} outside (0, 1]")));
    }
    if p_inf <= 2.0 / 3.0 {
        return Ok(f64::INFINITY);
    }
    Ok(l_km * (p_inf / (p_inf - 2.0 / 3.0)).ln())
}
