//! Gated DeltaNet (GDN) single-token decode kernels together with a
//! cycle-level performance model of a persistent-state FPGA dataflow
//! accelerator for that recurrence.
//!
//! The crate has four functional layers:
//!
//! * [`kernel`] — exact functional implementations of the GDN decode step
//!   (naive three-pass and fused two-pass forms), gate computation, grouped
//!   value attention head mapping, a binary64 golden reference, and
//!   instrumented FLOP / state-access counters.
//! * [`dataflow`] — the accelerator model: tiled five-phase compute
//!   pipeline, initiation-interval check, BRAM bank-conflict analysis, and
//!   the prepare/compute/store dataflow schedule that produces per-token
//!   cycle reports.
//! * [`perf`] — analytical roofline, latency, energy, resource, and
//!   design-space-sweep models for cross-platform comparison.
//! * [`tensorfile`] — a minimal language-neutral tensor interchange format
//!   used for golden vectors.
//!
//! The `gdn` binary exposes all of it as a CLI; see the README.

pub mod cli;
pub mod config;
pub mod dataflow;
pub mod inputs;
pub mod kernel;
pub mod perf;
pub mod reference;
pub mod tensorfile;

pub use config::{HeadParams, ModelConfig, TokenInput};
