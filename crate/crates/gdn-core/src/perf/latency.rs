//! Closed-form latency, energy, and the design-prediction discrepancy
//! report.

use crate::dataflow::{compute_interval, PipelineConfig, SimError};
use crate::reference;
use serde::Serialize;

/// Closed-form per-token latency:
/// `cycles = n_iter * interval + t_load`, converted with the configured
/// clock. Agrees with [`crate::dataflow::simulate_token`] whenever the
/// compute stage dominates the iteration (it does for every measured
/// configuration).
pub fn latency_model(pc: &PipelineConfig) -> Result<(u64, f64), SimError> {
    let interval = compute_interval(pc)?;
    let cycles = pc.n_iter() * interval + pc.t_load_cycles()?;
    let us = cycles as f64 * pc.clock_period_ns / 1_000.0;
    Ok((cycles, us))
}

/// Energy is power times time; exact, no modelling.
pub fn energy_per_token(power_watts: f64, latency_seconds: f64) -> f64 {
    power_watts * latency_seconds
}

/// One row of the design-prediction discrepancy report.
#[derive(Debug, Clone, Serialize)]
pub struct PredictionRow {
    pub h_iter: usize,
    /// `n_iter * interval` cycles at 300 MHz, with no load term — the
    /// formula the design-phase predictions claim to use.
    pub formula_us: f64,
    /// The latency the design documentation actually printed.
    pub printed_us: f64,
    pub delta_us: f64,
    /// Extra cycles the printed value implies beyond the formula.
    pub implied_extra_cycles: f64,
}

/// Recomputes the design-phase latency predictions from their stated
/// formula and reports the mismatch against the printed values.
///
/// The printed predictions cannot be reproduced as stated: each implies
/// roughly 3,400 cycles per token beyond `n_iter * 2,106`. The report
/// documents the gap instead of guessing the unstated constant.
pub fn prediction_discrepancy_report() -> Vec<PredictionRow> {
    let period_ns = 1_000.0 / reference::SYNTH_CLOCK_MHZ;
    reference::PREDICTED_LATENCY_300MHZ_US
        .iter()
        .map(|&(h_iter, printed_us)| {
            let n_iter = (32 / h_iter) as f64;
            let formula_us = n_iter * reference::STEADY_INTERVAL_CYCLES as f64 * period_ns / 1_000.0;
            let delta_us = printed_us - formula_us;
            PredictionRow {
                h_iter,
                formula_us,
                printed_us,
                delta_us,
                implied_extra_cycles: delta_us * 1_000.0 / period_ns,
            }
        })
        .collect()
}
