//! Arithmetic intensity and roofline bounds.

use crate::perf::platform::PlatformSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RooflineError {
    #[error("workload must move at least one off-chip byte")]
    NoTraffic,
    #[error("cannot parse bundled intensity points: {0}")]
    Parse(#[from] serde_json::Error),
}

/// A per-token workload: arithmetic volume and off-chip traffic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadProfile {
    pub label: String,
    pub flops: f64,
    pub offchip_bytes: f64,
}

impl WorkloadProfile {
    pub fn new(label: impl Into<String>, flops: f64, offchip_bytes: f64) -> Self {
        Self {
            label: label.into(),
            flops,
            offchip_bytes,
        }
    }
}

pub fn arithmetic_intensity(w: &WorkloadProfile) -> Result<f64, RooflineError> {
    if w.offchip_bytes <= 0.0 {
        return Err(RooflineError::NoTraffic);
    }
    Ok(w.flops / w.offchip_bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    MemoryBound,
    ComputeBound,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::MemoryBound => write!(f, "memory_bound"),
            Regime::ComputeBound => write!(f, "compute_bound"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RooflineBound {
    pub time_lower_bound_s: f64,
    pub regime: Regime,
    pub ridge: f64,
    pub intensity: f64,
}

/// Lower bound on execution time: `max(flops/peak, bytes/bandwidth)`.
/// The workload is memory-bound iff its intensity is below the ridge.
pub fn roofline_bound(p: &PlatformSpec, w: &WorkloadProfile) -> Result<RooflineBound, RooflineError> {
    let intensity = arithmetic_intensity(w)?;
    let ridge = p.ridge();
    let compute_time = w.flops / p.peak_flops;
    let memory_time = w.offchip_bytes / p.mem_bw_bytes_per_s;
    Ok(RooflineBound {
        time_lower_bound_s: compute_time.max(memory_time),
        regime: if intensity < ridge {
            Regime::MemoryBound
        } else {
            Regime::ComputeBound
        },
        ridge,
        intensity,
    })
}

/// Cycles for the naive three-pass step over one head: `3 d^2 / p_k`.
pub fn naive_head_cycles(d: usize, p_k: usize) -> u64 {
    3 * (d as u64) * (d as u64) / (p_k as u64)
}

/// A labelled intensity point for roofline plots.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntensityPoint {
    pub label: String,
    pub flops: f64,
    pub offchip_bytes: f64,
    /// True for the bundled sketch values that were not measured here.
    #[serde(default)]
    pub non_authoritative: bool,
}

#[derive(Deserialize)]
struct BundledPoints {
    points: Vec<IntensityPoint>,
}

const BUILTIN_POINTS: &str = include_str!("../../data/intensity_points.json");

/// Representative decode profiles for other architectures, bundled for
/// plot context only. Every point is flagged `non_authoritative`.
pub fn bundled_intensity_points() -> Result<Vec<IntensityPoint>, RooflineError> {
    let parsed: BundledPoints = serde_json::from_str(BUILTIN_POINTS)?;
    Ok(parsed.points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perf::platform::load_platforms;

    #[test]
    fn intensity_basics() {
        let w = WorkloadProfile::new("x", 4.2e6, 4_243_968.0);
        let i = arithmetic_intensity(&w).unwrap();
        assert!((i - 0.99).abs() < 0.01, "{i}");

        let w = WorkloadProfile::new("x", 4.2e6, 49_664.0);
        let i = arithmetic_intensity(&w).unwrap();
        assert!((i - 84.6).abs() < 0.1, "{i}");

        let w = WorkloadProfile::new("x", 123.0, 123.0);
        assert_eq!(arithmetic_intensity(&w).unwrap(), 1.0);

        let w = WorkloadProfile::new("x", 1.0, 0.0);
        assert!(arithmetic_intensity(&w).is_err());
    }

    #[test]
    fn gpu_profile_is_memory_bound_with_microsecond_bound() {
        let specs = load_platforms(None).unwrap();
        let h100 = specs.get("h100").unwrap();
        let w = WorkloadProfile::new("gdn-gpu", 4.2e6, 4_243_968.0);
        let b = roofline_bound(h100, &w).unwrap();
        assert_eq!(b.regime, Regime::MemoryBound);
        assert!((b.time_lower_bound_s * 1e6 - 2.12).abs() < 0.01);
        assert!((b.ridge - 25.5).abs() < 0.1);
    }

    #[test]
    fn intensity_at_ridge_balances_both_terms() {
        let specs = load_platforms(None).unwrap();
        let h100 = specs.get("h100").unwrap();
        let bytes = 1.0e6;
        let w = WorkloadProfile::new("ridge", h100.ridge() * bytes, bytes);
        let compute_time = w.flops / h100.peak_flops;
        let memory_time = w.offchip_bytes / h100.mem_bw_bytes_per_s;
        assert!((compute_time - memory_time).abs() < 1e-15);
        assert_eq!(roofline_bound(h100, &w).unwrap().regime, Regime::ComputeBound);
    }

    #[test]
    fn naive_cycles_formula() {
        assert_eq!(naive_head_cycles(128, 16), 3_072);
        assert_eq!(naive_head_cycles(64, 64), 3 * 64);
    }

    #[test]
    fn fused_interval_speedup_over_naive() {
        let speedup = naive_head_cycles(128, 16) as f64 / 2_106.0;
        assert!((speedup - 1.46).abs() < 0.005, "{speedup}");
    }

    #[test]
    fn bundled_points_are_flagged() {
        let points = bundled_intensity_points().unwrap();
        assert!(!points.is_empty());
        assert!(points.iter().all(|p| p.non_authoritative));
        // Context sketch: every subquadratic profile sits below 1 FLOP/B.
        for p in points.iter().filter(|p| p.label != "mhsa-gqa") {
            assert!(p.flops / p.offchip_bytes < 1.0, "{}", p.label);
        }
    }
}
