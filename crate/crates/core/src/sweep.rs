//! Rate-versus-distance sweeps, threshold solving, and data emission.

use std::io::Write;

use serde::Serialize;

use crate::dark::{effective_channel, DarkCountParams};
use crate::fiber::{max_distance_depolarizing, FiberParams, PmdRegime};
use crate::solve::bisect_predicate;
use crate::{Error, Result};

/// Spacing of the distance grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistanceScale {
    Linear,
    Log,
}

/// Full description of one sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub fiber: FiberParams,
    /// Dark-count probabilities; one curve per value.
    pub p_dc_values: Vec<f64>,
    pub d_min_km: f64,
    pub d_max_km: f64,
    pub n_points: usize,
    pub scale: DistanceScale,
    /// Channel uses per second; enables the ebits/s column.
    pub clock_hz: Option<f64>,
    /// Seed for the Monte-Carlo verification runs attached to this config.
    pub seed: u64,
}

impl SweepConfig {
    /// Defaults reproducing the headline rate-versus-distance curve:
    /// standard dephasing fiber, no dark counts, 1-500 km.
    pub fn standard() -> Self {
        Self {
            fiber: FiberParams::standard_dephasing(),
            p_dc_values: vec![0.0],
            d_min_km: 1.0,
            d_max_km: 500.0,
            n_points: 100,
            scale: DistanceScale::Linear,
            clock_hz: None,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_min_km >= 0.0) || !(self.d_max_km > 0.0) || self.d_min_km >= self.d_max_km {
            return Err(Error::InvalidInput(format!(
                "need 0 <= d_min < d_max, got [{}, {}]",
                self.d_min_km, self.d_max_km
            )));
        }
        if self.scale == DistanceScale::Log && self.d_min_km <= 0.0 {
            return Err(Error::InvalidInput(
                "log-spaced grid requires d_min > 0".into(),
            ));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 grid points, got {}",
                self.n_points
            )));
        }
        if self.p_dc_values.is_empty() {
            return Err(Error::InvalidInput("need at least one p_dc value".into()));
        }
        for &p in &self.p_dc_values {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("p_dc {p} outside [0, 1]")));
            }
        }
        if let Some(clock) = self.clock_hz {
            if !(clock > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "clock {clock} Hz not positive"
                )));
            }
        }
        Ok(())
    }

    /// The distance grid, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    DistanceScale::Linear => self.d_min_km + t * (self.d_max_km - self.d_min_km),
                    DistanceScale::Log => {
                        (self.d_min_km.ln() + t * (self.d_max_km.ln() - self.d_min_km.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

/// One evaluated sweep point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub d_km: f64,
    pub eta: f64,
    pub p: f64,
    pub eta_prime: f64,
    pub lower_ebits: f64,
    pub upper_ebits: f64,
    /// Upper bound times the clock; equals capacity × clock whenever the
    /// bounds coincide.
    pub rate_per_s: Option<f64>,
}

/// Evaluates the sweep: one row per (p_dc, distance) pair, sorted by
/// (p_dc, d) so the output never depends on evaluation order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut p_dcs = config.p_dc_values.clone();
    p_dcs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p_dcs.dedup();
    let grid = config.grid();

    let jobs: Vec<(f64, f64)> = p_dcs
        .iter()
        .flat_map(|&p_dc| grid.iter().map(move |&d| (p_dc, d)))
        .collect();
    let fiber = config.fiber;
    let clock = config.clock_hz;
    let rows = crate::par::map_indexed(jobs.len() as u64, |i| {
        let (p_dc, d) = jobs[i as usize];
        evaluate_point(&fiber, d, p_dc, clock)
    });
    rows.into_iter().collect()
}

fn evaluate_point(
    fiber: &FiberParams,
    d_km: f64,
    p_dc: f64,
    clock_hz: Option<f64>,
) -> Result<SweepRow> {
    let eta = fiber.transmissivity(d_km)?;
    let p = fiber.pauli_probability(d_km)?;
    let base = fiber.channel_at(d_km)?;
    let eff = effective_channel(&base, DarkCountParams::new(p_dc)?);
    let bounds = eff.capacity_bounds();
    Ok(SweepRow {
        d_km,
        eta,
        p,
        eta_prime: eff.eta(),
        lower_ebits: bounds.lower,
        upper_ebits: bounds.upper,
        rate_per_s: clock_hz.map(|c| bounds.upper * c),
    })
}

/// Fixed CSV header.
pub const CSV_HEADER: &str = "d_km,eta,p,eta_prime,lower_ebits,upper_ebits,rate_per_s";

fn fmt(x: f64) -> String {
    // 12 significant digits, locale-free.
    format!("{x:.11e}")
}

/// Writes the schema-stable CSV: fixed header, 12 significant digits,
/// empty rate field when no clock is configured.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt(r.d_km),
            fmt(r.eta),
            fmt(r.p),
            fmt(r.eta_prime),
            fmt(r.lower_ebits),
            fmt(r.upper_ebits),
            r.rate_per_s.map(fmt).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Writes the same rows as a JSON array.
pub fn write_json<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)
}

/// Distance at which the capacity upper bound reaches zero: closed form for
/// the plain depolarizing regime, bisection on the zero-capacity predicate
/// of the dark-count effective channel otherwise, infinity when there is no
/// finite crossing (dephasing fiber without dark counts).
pub fn solve_threshold(fiber: &FiberParams, dc: DarkCountParams) -> Result<f64> {
    if dc.p_dc() == 0.0 {
        return match fiber.regime {
            PmdRegime::DepolarizingDominated {
                decoherence_length_km,
                p_inf,
            } => max_distance_depolarizing(decoherence_length_km, p_inf),
            // p(d) approaches 1/2 only asymptotically and eta stays positive.
            PmdRegime::DephasingDominated => Ok(f64::INFINITY),
        };
    }
    solve_threshold_bisection(fiber, dc)
}

/// The bisection route behind [`solve_threshold`], exposed so the closed
/// form can be cross-checked against it.
pub fn solve_threshold_bisection(fiber: &FiberParams, dc: DarkCountParams) -> Result<f64> {
    let zero_at = |d: f64| -> Result<bool> {
        Ok(effective_channel(&fiber.channel_at(d)?, dc).is_zero_capacity())
    };
    if zero_at(0.0)? {
        return Err(Error::NonBracketing(
            "zero capacity already at d = 0".into(),
        ));
    }
    // Expand until the capacity has died or the link is absurdly long.
    let mut hi = 1.0;
    while !zero_at(hi)? {
        hi *= 2.0;
        if hi > 1e7 {
            return Ok(f64::INFINITY);
        }
    }
    bisect_predicate(|d| zero_at(d).unwrap_or(true), 0.0, hi, 1e-12, 0.0)
}
