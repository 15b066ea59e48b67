//! Cycle-level model of the accelerator datapath.
//!
//! The datapath holds every state matrix in on-chip BRAM and processes
//! value heads in groups of `h_iter` per dataflow iteration. Each
//! iteration runs three overlapped stages (prepare, compute, store); the
//! compute stage is the fused five-phase pipeline whose interval is two
//! state passes plus three short scalar phases. This module predicts
//! per-token cycle counts, checks the initiation-interval argument, and
//! verifies bank-conflict freedom of the BRAM layout.

mod banking;
mod pipeline;
mod schedule;
mod token;

pub use banking::{bram_conflict_check, BankLayout};
pub use pipeline::{
    check_initiation_interval, compute_interval, phase_costs, PhaseCosts, PipelineConfig,
    SimError, TLoadModel,
};
pub use schedule::three_stage_makespan;
pub use token::{calibrate_overheads, simulate_token, CycleReport, StageKind, TimelineEntry};
