//! Platform specifications, loadable from JSON.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlatformError {
    #[error("cannot read platform file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse platform file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown platform '{0}'")]
    Unknown(String),
    #[error("invalid platform spec '{name}': {reason}")]
    Invalid { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub peak_flops: f64,
    pub mem_bw_bytes_per_s: f64,
    pub onchip_bytes: u64,
    pub tdp_watts: f64,
    #[serde(default)]
    pub clock_hz: Option<f64>,
    #[serde(default)]
    pub bram_18k_blocks: Option<u64>,
    #[serde(default)]
    pub dsp_slices: Option<u64>,
    #[serde(default)]
    pub notes: Option<String>,
}

impl PlatformSpec {
    pub fn validate(&self) -> Result<(), PlatformError> {
        let bad = |reason: &str| PlatformError::Invalid {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.peak_flops <= 0.0 {
            return Err(bad("peak_flops must be positive"));
        }
        if self.mem_bw_bytes_per_s <= 0.0 {
            return Err(bad("mem_bw_bytes_per_s must be positive"));
        }
        if self.onchip_bytes == 0 {
            return Err(bad("onchip_bytes must be positive"));
        }
        if self.tdp_watts <= 0.0 {
            return Err(bad("tdp_watts must be positive"));
        }
        Ok(())
    }

    /// Ridge point: intensity at which the platform transitions from
    /// memory- to compute-bound.
    pub fn ridge(&self) -> f64 {
        self.peak_flops / self.mem_bw_bytes_per_s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Platforms {
    pub platforms: Vec<PlatformSpec>,
}

impl Platforms {
    pub fn get(&self, name: &str) -> Result<&PlatformSpec, PlatformError> {
        self.platforms
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| PlatformError::Unknown(name.to_string()))
    }
}

const BUILTIN_PLATFORMS: &str = include_str!("../../data/platforms.json");

/// Loads platform specs from `path`, or the built-in set when `None`.
pub fn load_platforms(path: Option<&Path>) -> Result<Platforms, PlatformError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => BUILTIN_PLATFORMS.to_string(),
    };
    let specs: Platforms = serde_json::from_str(&text)?;
    for p in &specs.platforms {
        p.validate()?;
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_platforms_parse_and_validate() {
        let specs = load_platforms(None).unwrap();
        let h100 = specs.get("h100").unwrap();
        assert!((h100.ridge() - 25.5).abs() < 0.1);
        let u55c = specs.get("u55c").unwrap();
        assert_eq!(u55c.onchip_bytes, 17_616_076);
        assert_eq!(u55c.dsp_slices, Some(9_024));
        assert!(specs.get("tpu").is_err());
    }
}
