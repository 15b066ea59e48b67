//! Model shape configuration and per-token inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid model config: {0}")]
    Invalid(String),
}

/// Shape of one GDN layer.
///
/// The default matches the production configuration this crate models:
/// head dimension 128, 16 query/key heads, 32 value heads in a 2:1 grouped
/// value attention (GVA) arrangement, FP32 words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Head dimension `d`; every state matrix is `d x d`.
    pub d: usize,
    /// Number of query/key heads.
    pub h_q: usize,
    /// Number of value heads; each owns one persistent state matrix.
    pub h_v: usize,
    /// Value heads served by each query/key head (`h_v = gva_ratio * h_q`).
    pub gva_ratio: usize,
    /// Bytes per element of the modelled datapath (4 = binary32).
    pub word_bytes: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            d: 128,
            h_q: 16,
            h_v: 32,
            gva_ratio: 2,
            word_bytes: 4,
        }
    }
}

impl ModelConfig {
    pub fn new(d: usize, h_q: usize, h_v: usize, gva_ratio: usize) -> Result<Self, ConfigError> {
        let cfg = Self {
            d,
            h_q,
            h_v,
            gva_ratio,
            word_bytes: 4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 || self.h_q == 0 || self.h_v == 0 || self.word_bytes == 0 {
            return Err(ConfigError::Invalid("all counts must be positive".into()));
        }
        if self.gva_ratio == 0 {
            return Err(ConfigError::Invalid("gva_ratio must be >= 1".into()));
        }
        if self.h_v != self.gva_ratio * self.h_q {
            return Err(ConfigError::Invalid(format!(
                "h_v ({}) must equal gva_ratio ({}) * h_q ({})",
                self.h_v, self.gva_ratio, self.h_q
            )));
        }
        Ok(())
    }

    /// Query/key head serving value head `h` (contiguous pairing).
    pub fn qk_head(&self, value_head: usize) -> usize {
        value_head / self.gva_ratio
    }

    /// Bytes of persistent state across all value heads.
    pub fn state_bytes(&self) -> u64 {
        self.h_v as u64 * (self.d as u64).pow(2) * self.word_bytes as u64
    }
}

/// One token's worth of layer inputs.
///
/// `q`/`k` are per query/key head; `v`, `alpha` (decay gate input) and
/// `b` (update gate input) are per value head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenInput {
    pub q: Vec<Vec<f32>>,
    pub k: Vec<Vec<f32>>,
    pub v: Vec<Vec<f32>>,
    pub alpha: Vec<f32>,
    pub b: Vec<f32>,
}

impl TokenInput {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        Self {
            q: vec![vec![0.0; cfg.d]; cfg.h_q],
            k: vec![vec![0.0; cfg.d]; cfg.h_q],
            v: vec![vec![0.0; cfg.d]; cfg.h_v],
            alpha: vec![0.0; cfg.h_v],
            b: vec![0.0; cfg.h_v],
        }
    }

    pub fn validate(&self, cfg: &ModelConfig) -> Result<(), ConfigError> {
        let shape_ok = self.q.len() == cfg.h_q
            && self.k.len() == cfg.h_q
            && self.v.len() == cfg.h_v
            && self.alpha.len() == cfg.h_v
            && self.b.len() == cfg.h_v
            && self.q.iter().all(|x| x.len() == cfg.d)
            && self.k.iter().all(|x| x.len() == cfg.d)
            && self.v.iter().all(|x| x.len() == cfg.d);
        if !shape_ok {
            return Err(ConfigError::Invalid(
                "token input shape does not match model config".into(),
            ));
        }
        let finite = self
            .q
            .iter()
            .chain(self.k.iter())
            .chain(self.v.iter())
            .flatten()
            .chain(self.alpha.iter())
            .chain(self.b.iter())
            .all(|x| x.is_finite());
        if !finite {
            return Err(ConfigError::Invalid("token input contains non-finite values".into()));
        }
        Ok(())
    }
}

/// Learned per-head gate parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadParams {
    pub a_log: Vec<f32>,
    pub dt_bias: Vec<f32>,
}

impl HeadParams {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        Self {
            a_log: vec![0.0; cfg.h_v],
            dt_bias: vec![0.0; cfg.h_v],
        }
    }

    pub fn validate(&self, cfg: &ModelConfig) -> Result<(), ConfigError> {
        if self.a_log.len() != cfg.h_v || self.dt_bias.len() != cfg.h_v {
            return Err(ConfigError::Invalid("head params length mismatch".into()));
        }
        if !self
            .a_log
            .iter()
            .chain(self.dt_bias.iter())
            .all(|x| x.is_finite())
        {
            return Err(ConfigError::Invalid("head params contain non-finite values".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = ModelConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.state_bytes(), 2_097_152);
    }

    #[test]
    fn gva_mapping_uses_floor_division() {
        let cfg = ModelConfig::default();
        assert_eq!(cfg.qk_head(0), 0);
        assert_eq!(cfg.qk_head(1), 0);
        assert_eq!(cfg.qk_head(5), 2);
        assert_eq!(cfg.qk_head(31), 15);
    }

    #[test]
    fn mismatched_head_counts_rejected() {
        assert!(ModelConfig::new(128, 16, 31, 2).is_err());
        assert!(ModelConfig::new(0, 16, 32, 2).is_err());
    }

    #[test]
    fn token_input_validation_catches_nan() {
        let cfg = ModelConfig::default();
        let mut input = TokenInput::zeros(&cfg);
        input.validate(&cfg).unwrap();
        input.v[3][7] = f32::NAN;
        assert!(input.validate(&cfg).is_err());
    }
}
