//! Closed-form makespan of a three-stage dataflow pipeline.

/// Makespan of `n` iterations through stages with constant costs
/// `(a, b, c)` and unbounded inter-stage buffering:
///
/// ```text
/// makespan = a + (n - 1) * max(a, b, c) + b + c
/// ```
///
/// The bottleneck stage runs back to back; everything else is fill and
/// drain. When several stages share the maximum the interval is that
/// shared cost (no tie-breaking ambiguity affects the result).
pub fn three_stage_makespan(a: u64, b: u64, c: u64, n: u64) -> u64 {
    assert!(n >= 1, "makespan needs at least one iteration");
    a + (n - 1) * a.max(b).max(c) + b + c
}
