//! Pipeline configuration, per-phase costs, and the compute interval.

use crate::config::ModelConfig;
use crate::reference;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid pipeline config: {0}")]
    Config(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("state does not fit on chip: need {need} bytes, capacity {capacity}")]
    StateTooLarge { need: u64, capacity: u64 },
}

/// How the non-iteration (input load) cycle budget is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TLoadModel {
    /// Calibrated table derived from measured totals minus
    /// iterations x interval. Only defined for the measured
    /// heads-per-iteration settings.
    Calibrated,
    /// Fixed cycle count supplied by the user.
    Fixed(u64),
    /// Affine in the token payload: `base + token_words / words_per_cycle`.
    Affine { base_cycles: u64 },
}

/// Accelerator parameters for one design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Value heads processed per dataflow iteration.
    pub h_iter: usize,
    /// Column parallelism within a state pass (elements per cycle per head).
    pub p_k: usize,
    pub model: ModelConfig,
    pub clock_period_ns: f64,
    /// FP32 adder latency; sets the initiation-interval requirement.
    pub fadd_latency_cycles: u64,
    /// Pipeline startup / dataflow scheduling overhead added to the ideal
    /// interval.
    pub pipeline_overhead_cycles: u64,
    pub t_load: TLoadModel,
    /// Measured interval override (models the wide-datapath inflation).
    pub interval_override_cycles: Option<u64>,
    /// Output words moved per cycle by the store stage.
    pub axi_words_per_cycle: u64,
    /// On-chip capacity the persistent state must fit in; checked before
    /// simulation proceeds.
    pub onchip_capacity_bytes: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            h_iter: 8,
            p_k: 16,
            model: ModelConfig::default(),
            clock_period_ns: 3.333,
            fadd_latency_cycles: 5,
            pipeline_overhead_cycles: 34,
            t_load: TLoadModel::Calibrated,
            interval_override_cycles: None,
            axi_words_per_cycle: 16,
            onchip_capacity_bytes: None,
        }
    }
}

impl PipelineConfig {
    /// Design point with the calibrated load budget and, for the wide
    /// 16-head configuration, the measured interval override.
    pub fn calibrated(h_iter: usize) -> Self {
        let mut pc = Self {
            h_iter,
            t_load: TLoadModel::Calibrated,
            ..Self::default()
        };
        if h_iter == 16 {
            pc.interval_override_cycles = Some(reference::WIDE_CONFIG_INTERVAL_CYCLES);
        }
        pc
    }

    pub fn with_clock_mhz(mut self, mhz: f64) -> Self {
        self.clock_period_ns = 1_000.0 / mhz;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.model
            .validate()
            .map_err(|e| SimError::Config(e.to_string()))?;
        if self.h_iter == 0 || self.model.h_v % self.h_iter != 0 {
            return Err(SimError::Config(format!(
                "h_iter ({}) must divide h_v ({})",
                self.h_iter, self.model.h_v
            )));
        }
        if self.p_k == 0 || self.model.d % self.p_k != 0 {
            return Err(SimError::Config(format!(
                "p_k ({}) must divide d ({})",
                self.p_k, self.model.d
            )));
        }
        if self.clock_period_ns <= 0.0 {
            return Err(SimError::Config("clock period must be positive".into()));
        }
        if self.axi_words_per_cycle == 0 {
            return Err(SimError::Config("axi_words_per_cycle must be positive".into()));
        }
        Ok(())
    }

    pub fn n_iter(&self) -> u64 {
        (self.model.h_v / self.h_iter) as u64
    }

    /// Resolves the non-iteration cycle budget.
    pub fn t_load_cycles(&self) -> Result<u64, SimError> {
        match self.t_load {
            TLoadModel::Fixed(c) => Ok(c),
            TLoadModel::Calibrated => {
                reference::lookup(&reference::CALIBRATED_NONITER_CYCLES, self.h_iter).ok_or_else(
                    || {
                        SimError::Config(format!(
                            "no calibrated load budget for h_iter = {}; use a fixed or affine load model",
                            self.h_iter
                        ))
                    },
                )
            }
            TLoadModel::Affine { base_cycles } => {
                let words = crate::kernel::count_token_bytes(&self.model)
                    / self.model.word_bytes as u64;
                Ok(base_cycles + words.div_ceil(self.axi_words_per_cycle))
            }
        }
    }
}

/// Cycle cost of each fused-pipeline phase.
///
/// The two state passes each cost `d^2 / p_k`; the scalar phases cost
/// `d / p_k` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseCosts {
    pub dot: u64,
    pub read_pass: u64,
    pub delta: u64,
    pub correct: u64,
    pub write_pass: u64,
}

impl PhaseCosts {
    /// Interval of the fused pipeline before scheduling overhead:
    /// `2 d^2/p_k + 3 d/p_k`.
    pub fn ideal_interval(&self) -> u64 {
        self.dot + self.read_pass + self.delta + self.correct + self.write_pass
    }
}

pub fn phase_costs(pc: &PipelineConfig) -> Result<PhaseCosts, SimError> {
    pc.validate()?;
    let d = pc.model.d as u64;
    let p_k = pc.p_k as u64;
    let pass = d * d / p_k;
    let scalar = d / p_k;
    Ok(PhaseCosts {
        dot: scalar,
        read_pass: pass,
        delta: scalar,
        correct: scalar,
        write_pass: pass,
    })
}

/// Achieved initiation interval of the tiled accumulation loops.
///
/// The loop-carried dependency is the partial-sum register, revisited once
/// per `d / p_k` tiles; II = 1 whenever that recurrence distance covers the
/// adder latency, else the schedule stretches by `ceil(latency / distance)`.
pub fn check_initiation_interval(pc: &PipelineConfig) -> Result<u64, SimError> {
    pc.validate()?;
    let distance = (pc.model.d / pc.p_k) as u64;
    if distance >= pc.fadd_latency_cycles {
        Ok(1)
    } else {
        Ok(pc.fadd_latency_cycles.div_ceil(distance))
    }
}

/// Compute-stage interval in cycles: the measured override if present,
/// otherwise `achieved_ii * ideal + overhead`.
pub fn compute_interval(pc: &PipelineConfig) -> Result<u64, SimError> {
    if let Some(c) = pc.interval_override_cycles {
        pc.validate()?;
        return Ok(c);
    }
    let ii = check_initiation_interval(pc)?;
    Ok(ii * phase_costs(pc)?.ideal_interval() + pc.pipeline_overhead_cycles)
}
