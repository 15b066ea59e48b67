//! Instrumentation for state traffic and arithmetic work.
//!
//! Counters are incremented by the kernels themselves, at loop-batch
//! granularity, so the recorded totals are exact integer counts of what a
//! step actually executed. Scalar transcendentals (exp, log1p, sqrt) are
//! tallied separately from multiplies/adds so any FLOP-counting convention
//! can be read off the breakdown.

use serde::Serialize;

/// Pipeline phase an operation is attributed to.
///
/// The naive kernel maps onto the same buckets: retrieval -> `ReadPass`,
/// state update -> `WritePass`, output pass -> `Correct`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    QkDot,
    ReadPass,
    Delta,
    Correct,
    WritePass,
    Gates,
}

pub const PHASES: [Phase; 6] = [
    Phase::QkDot,
    Phase::ReadPass,
    Phase::Delta,
    Phase::Correct,
    Phase::WritePass,
    Phase::Gates,
];

impl Phase {
    fn index(self) -> usize {
        match self {
            Phase::QkDot => 0,
            Phase::ReadPass => 1,
            Phase::Delta => 2,
            Phase::Correct => 3,
            Phase::WritePass => 4,
            Phase::Gates => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::QkDot => "qk_dot",
            Phase::ReadPass => "read_pass",
            Phase::Delta => "delta",
            Phase::Correct => "correct",
            Phase::WritePass => "write_pass",
            Phase::Gates => "gates",
        }
    }
}

/// Scalar arithmetic tally. Subtractions count as adds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCount {
    pub muls: u64,
    pub adds: u64,
    pub divs: u64,
    pub transcendentals: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.muls + self.adds + self.divs + self.transcendentals
    }

    pub fn accumulate(&mut self, other: &OpCount) {
        self.muls += other.muls;
        self.adds += other.adds;
        self.divs += other.divs;
        self.transcendentals += other.transcendentals;
    }
}

/// Per-step instrumentation: state-element traffic plus a phase-tagged
/// arithmetic breakdown. Monotonically non-decreasing while a step runs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AccessCounters {
    pub state_element_reads: u64,
    pub state_element_writes: u64,
    by_phase: [OpCount; 6],
    #[serde(skip)]
    current: usize,
}

impl AccessCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.current = phase.index();
    }

    #[inline]
    pub fn read_state(&mut self, n: u64) {
        self.state_element_reads += n;
    }

    #[inline]
    pub fn write_state(&mut self, n: u64) {
        self.state_element_writes += n;
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.by_phase[self.current].muls += n;
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.by_phase[self.current].adds += n;
    }

    #[inline]
    pub fn div(&mut self, n: u64) {
        self.by_phase[self.current].divs += n;
    }

    #[inline]
    pub fn transcendental(&mut self, n: u64) {
        self.by_phase[self.current].transcendentals += n;
    }

    pub fn phase(&self, phase: Phase) -> &OpCount {
        &self.by_phase[phase.index()]
    }

    /// Total scalar arithmetic operations across all phases.
    pub fn scalar_ops(&self) -> u64 {
        self.by_phase.iter().map(OpCount::total).sum()
    }

    pub fn ops_total(&self) -> OpCount {
        let mut out = OpCount::default();
        for c in &self.by_phase {
            out.accumulate(c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_buckets_are_independent() {
        let mut c = AccessCounters::new();
        c.set_phase(Phase::ReadPass);
        c.mul(10);
        c.add(5);
        c.set_phase(Phase::Gates);
        c.transcendental(3);
        assert_eq!(c.phase(Phase::ReadPass).muls, 10);
        assert_eq!(c.phase(Phase::Gates).transcendentals, 3);
        assert_eq!(c.phase(Phase::Delta).total(), 0);
        assert_eq!(c.scalar_ops(), 18);
    }
}
