//! Functional GDN decode kernels with instrumented counters.
//!
//! Two single-head step implementations are provided:
//!
//! * [`decode_naive`] — the textbook three-pass form: retrieval, state
//!   update, then a third pass over the updated state for the output.
//! * [`decode_fused`] — the two-pass form used by the accelerator: the
//!   retrieval pass also produces a partial output, and the output is
//!   corrected algebraically so the updated state is never re-read.
//!
//! Both are generic over [`Real`] so the same code serves as the binary32
//! kernel and, instantiated at `f64` with plain accumulation order, as the
//! golden reference.

mod counters;
mod decode;
mod gates;
mod layer;
mod profile;
mod real;

pub use counters::{AccessCounters, OpCount, Phase, PHASES};
pub use decode::{decode_fused, decode_naive, KernelError, StateMatrix, DEFAULT_TILE};
pub use gates::{compute_gates, sigmoid, softplus, Gates};
pub use layer::{decode_layer, run_sequence, KernelKind, LayerState};
pub use profile::{count_flops, count_token_bytes, gpu_roundtrip_bytes, FlopProfile};
pub use real::Real;
