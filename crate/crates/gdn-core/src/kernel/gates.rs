//! Scalar gate computation.
//!
//! Per value head the decode step consumes two gates derived from the
//! token inputs and learned parameters:
//!
//! ```text
//! g    = exp(-sigmoid(alpha) * exp(a_log) * softplus(dt_bias))   decay
//! beta = sigmoid(b)                                              update
//! ```
//!
//! Both scalar functions are evaluated branch-wise so that inputs with
//! magnitudes up to several hundred neither overflow nor lose the
//! documented ranges: `0 < g <= 1` and `0 < beta < 1`. Results are clamped
//! to the nearest representable values inside those ranges, using binary32
//! limits so the guarantee survives a cast to `f32` in kernel mode.

use crate::config::{HeadParams, ModelConfig};
use crate::kernel::counters::{AccessCounters, Phase};
use crate::kernel::decode::KernelError;
use serde::Serialize;

/// Smallest positive value (and largest value below one) that still
/// round-trips through binary32 without collapsing to 0 or 1.
const GATE_FLOOR: f64 = f32::MIN_POSITIVE as f64;
/// Predecessor of 1.0 in binary32 (1 - 2^-24).
const BETA_CEIL: f64 = 0.999_999_940_395_355_2;

/// Logistic function, split at zero so `exp` never sees a large positive
/// argument.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(x))` in overflow-safe form: `max(x, 0) + log1p(exp(-|x|))`.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Per-head gate values, always computed in binary64.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gates {
    /// Decay gates, one per value head, each in (0, 1].
    pub g: Vec<f64>,
    /// Update gates, one per value head, each in (0, 1).
    pub beta: Vec<f64>,
}

/// Evaluates the gate formulas for every value head.
///
/// Errors on non-finite inputs. Counter attribution: each sigmoid costs
/// one transcendental, one add and one div; each softplus two
/// transcendentals and one add; the decay combine two muls and one
/// final transcendental.
pub fn compute_gates(
    alpha: &[f32],
    b: &[f32],
    params: &HeadParams,
    cfg: &ModelConfig,
    counters: &mut AccessCounters,
) -> Result<Gates, KernelError> {
    if alpha.len() != cfg.h_v || b.len() != cfg.h_v {
        return Err(KernelError::Shape(format!(
            "gate inputs must have h_v = {} entries, got {} / {}",
            cfg.h_v,
            alpha.len(),
            b.len()
        )));
    }
    params
        .validate(cfg)
        .map_err(|e| KernelError::Shape(e.to_string()))?;
    if !alpha.iter().chain(b.iter()).all(|x| x.is_finite()) {
        return Err(KernelError::Domain("non-finite gate input".into()));
    }

    counters.set_phase(Phase::Gates);
    let mut g = Vec::with_capacity(cfg.h_v);
    let mut beta = Vec::with_capacity(cfg.h_v);
    for h in 0..cfg.h_v {
        let decay_rate =
            sigmoid(alpha[h] as f64) * (params.a_log[h] as f64).exp() * softplus(params.dt_bias[h] as f64);
        g.push((-decay_rate).exp().clamp(GATE_FLOOR, 1.0));
        beta.push(sigmoid(b[h] as f64).clamp(GATE_FLOOR, BETA_CEIL));
        // sigmoid x2, softplus, exp(a_log), exp(-rate), combine muls.
        counters.transcendental(6);
        counters.add(3);
        counters.div(2);
        counters.mul(2);
    }
    Ok(Gates { g, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gates_for(alpha: f32, b: f32, a_log: f32, dt_bias: f32) -> (f64, f64) {
        let cfg = ModelConfig::new(4, 1, 1, 1).unwrap();
        let params = HeadParams {
            a_log: vec![a_log],
            dt_bias: vec![dt_bias],
        };
        let mut c = AccessCounters::new();
        let gates = compute_gates(&[alpha], &[b], &params, &cfg, &mut c).unwrap();
        (gates.g[0], gates.beta[0])
    }

    #[test]
    fn zero_b_gives_half_beta() {
        let (_, beta) = gates_for(0.0, 0.0, 0.0, 0.0);
        assert_eq!(beta, 0.5);
    }

    #[test]
    fn very_negative_a_log_freezes_decay() {
        let (g, _) = gates_for(1.0, 0.0, -100.0, 1.0);
        assert!((g - 1.0).abs() < 1e-12, "g = {g}");
    }

    #[test]
    fn all_zero_inputs_give_inverse_sqrt_two() {
        // sigmoid(0) = 1/2, exp(0) = 1, softplus(0) = ln 2,
        // so g = exp(-ln(2)/2) = 2^(-1/2).
        let (g, _) = gates_for(0.0, 0.0, 0.0, 0.0);
        let expect = 2.0f64.powf(-0.5);
        assert!((g - expect).abs() < 1e-15, "g = {g}, expect {expect}");
        assert!((g - 0.70711).abs() < 5e-6);
    }

    #[test]
    fn extreme_inputs_stay_in_range() {
        for &x in &[-300.0f32, -50.0, -2.0, 0.0, 2.0, 50.0, 300.0] {
            let (g, beta) = gates_for(x, x, x, x);
            assert!(g > 0.0 && g <= 1.0, "g({x}) = {g}");
            assert!(beta > 0.0 && beta < 1.0, "beta({x}) = {beta}");
            // The clamped values must survive a cast to binary32.
            assert!((g as f32) > 0.0 && (g as f32) <= 1.0);
            assert!((beta as f32) > 0.0 && (beta as f32) < 1.0);
        }
    }

    #[test]
    fn non_finite_input_is_domain_error() {
        let cfg = ModelConfig::new(4, 1, 1, 1).unwrap();
        let params = HeadParams::zeros(&cfg);
        let mut c = AccessCounters::new();
        let err = compute_gates(&[f32::INFINITY], &[0.0], &params, &cfg, &mut c).unwrap_err();
        assert!(matches!(err, KernelError::Domain(_)));
    }

    #[test]
    fn stable_sigmoid_matches_plain_formula_in_safe_range() {
        for i in -40..=40 {
            let x = i as f64 * 0.5;
            let plain = 1.0 / (1.0 + (-x).exp());
            assert!((sigmoid(x) - plain).abs() < 1e-15);
        }
    }

    #[test]
    fn softplus_never_overflows() {
        assert!(softplus(700.0).is_finite());
        assert_eq!(softplus(0.0), 2.0f64.ln());
        assert!(softplus(-700.0) >= 0.0);
    }
}
