//! Whole-layer decode: GVA head mapping, per-head gates, state threading.

use crate::config::{HeadParams, ModelConfig, TokenInput};
use crate::kernel::counters::AccessCounters;
use crate::kernel::decode::{decode_fused, decode_naive, KernelError, StateMatrix, DEFAULT_TILE};
use crate::kernel::gates::compute_gates;
use crate::kernel::real::Real;
use serde::{Deserialize, Serialize};

/// Which single-head step the layer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Naive,
    /// Fused two-pass step with the given column tile width.
    Fused {
        tile: usize,
    },
}

impl Default for KernelKind {
    fn default() -> Self {
        KernelKind::Fused { tile: DEFAULT_TILE }
    }
}

/// The persistent recurrent state: one `d x d` matrix per value head.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerState<T> {
    heads: Vec<StateMatrix<T>>,
}

impl<T: Real> LayerState<T> {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        Self {
            heads: (0..cfg.h_v).map(|_| StateMatrix::zeros(cfg.d)).collect(),
        }
    }

    pub fn from_heads(heads: Vec<StateMatrix<T>>) -> Self {
        Self { heads }
    }

    pub fn head(&self, h: usize) -> &StateMatrix<T> {
        &self.heads[h]
    }

    pub fn head_mut(&mut self, h: usize) -> &mut StateMatrix<T> {
        &mut self.heads[h]
    }

    pub fn num_heads(&self) -> usize {
        self.heads.len()
    }

    pub fn matches(&self, cfg: &ModelConfig) -> bool {
        self.heads.len() == cfg.h_v && self.heads.iter().all(|s| s.dim() == cfg.d)
    }

    /// Converts element precision (e.g. binary32 kernel state to binary64
    /// oracle state; f32 -> f64 is exact).
    pub fn convert<U: Real>(&self) -> LayerState<U> {
        LayerState {
            heads: self
                .heads
                .iter()
                .map(|s| s.map(|x| U::from_f64(x.to_f64())))
                .collect(),
        }
    }

    /// Flattened row-major elements, heads in order.
    pub fn to_flat(&self) -> Vec<T> {
        self.heads
            .iter()
            .flat_map(|s| s.as_slice().iter().copied())
            .collect()
    }

    pub fn from_flat(cfg: &ModelConfig, data: &[T]) -> Result<Self, KernelError> {
        let per_head = cfg.d * cfg.d;
        if data.len() != cfg.h_v * per_head {
            return Err(KernelError::Shape(format!(
                "state payload has {} elements, expected {}",
                data.len(),
                cfg.h_v * per_head
            )));
        }
        let heads = data
            .chunks_exact(per_head)
            .map(|c| StateMatrix::from_flat(cfg.d, c.to_vec()))
            .collect::<Result<_, _>>()?;
        Ok(Self { heads })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.heads
            .iter()
            .zip(&other.heads)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// One decode step over every value head.
///
/// Value head `h` uses query/key head `h / gva_ratio`; gates come from
/// [`compute_gates`]; heads are updated independently and deterministically.
pub fn decode_layer<T: Real>(
    input: &TokenInput,
    state: &mut LayerState<T>,
    params: &HeadParams,
    cfg: &ModelConfig,
    kernel: KernelKind,
    counters: &mut AccessCounters,
) -> Result<Vec<Vec<T>>, KernelError> {
    input
        .validate(cfg)
        .map_err(|e| KernelError::Shape(e.to_string()))?;
    if !state.matches(cfg) {
        return Err(KernelError::Shape("layer state does not match config".into()));
    }

    let gates = compute_gates(&input.alpha, &input.b, params, cfg, counters)?;

    let q: Vec<Vec<T>> = input
        .q
        .iter()
        .map(|v| v.iter().map(|&x| T::from_f32(x)).collect())
        .collect();
    let k: Vec<Vec<T>> = input
        .k
        .iter()
        .map(|v| v.iter().map(|&x| T::from_f32(x)).collect())
        .collect();

    let mut outputs = Vec::with_capacity(cfg.h_v);
    for h in 0..cfg.h_v {
        let p = cfg.qk_head(h);
        let v_h: Vec<T> = input.v[h].iter().map(|&x| T::from_f32(x)).collect();
        let g = T::from_f64(gates.g[h]);
        let beta = T::from_f64(gates.beta[h]);
        let o = match kernel {
            KernelKind::Naive => {
                decode_naive(&q[p], &k[p], &v_h, state.head_mut(h), g, beta, counters)?
            }
            KernelKind::Fused { tile } => decode_fused(
                &q[p],
                &k[p],
                &v_h,
                state.head_mut(h),
                g,
                beta,
                tile,
                counters,
            )?,
        };
        outputs.push(o);
    }
    Ok(outputs)
}

/// Autoregressive decode over a token sequence, threading the state.
///
/// Equivalent to folding [`decode_layer`]; errors on an empty sequence.
pub fn run_sequence<T: Real>(
    inputs: &[TokenInput],
    init: &LayerState<T>,
    params: &HeadParams,
    cfg: &ModelConfig,
    kernel: KernelKind,
    counters: &mut AccessCounters,
) -> Result<(Vec<Vec<Vec<T>>>, LayerState<T>), KernelError> {
    if inputs.is_empty() {
        return Err(KernelError::Argument("token sequence is empty".into()));
    }
    let mut state = init.clone();
    let mut outputs = Vec::with_capacity(inputs.len());
    for input in inputs {
        outputs.push(decode_layer(input, &mut state, params, cfg, kernel, counters)?);
    }
    Ok((outputs, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inputs::generate_sequence;

    #[test]
    fn layer_uses_paired_qk_heads() {
        // Craft inputs where only qk head 2 is nonzero; then only value
        // heads 4 and 5 (its GVA pair) can produce nonzero outputs from a
        // nonzero v.
        let cfg = ModelConfig::default();
        let mut input = TokenInput::zeros(&cfg);
        input.q[2] = vec![1.0; cfg.d];
        input.k[2] = vec![1.0; cfg.d];
        for h in 0..cfg.h_v {
            input.v[h] = vec![1.0; cfg.d];
        }
        let params = HeadParams::zeros(&cfg);
        let mut state = LayerState::<f32>::zeros(&cfg);
        let mut c = AccessCounters::new();
        let out = decode_layer(&input, &mut state, &params, &cfg, KernelKind::default(), &mut c)
            .unwrap();
        for (h, o) in out.iter().enumerate() {
            let nonzero = o.iter().any(|&x| x != 0.0);
            assert_eq!(nonzero, h == 4 || h == 5, "head {h}");
        }
    }

    #[test]
    fn single_token_sequence_equals_one_layer_step() {
        let cfg = ModelConfig::default();
        let seq = generate_sequence(42, 1, &cfg);
        let mut c = AccessCounters::new();

        let mut state = seq.init_state.clone();
        let direct = decode_layer(
            &seq.tokens[0],
            &mut state,
            &seq.params,
            &cfg,
            KernelKind::default(),
            &mut c,
        )
        .unwrap();

        let (outs, final_state) = run_sequence(
            &seq.tokens,
            &seq.init_state,
            &seq.params,
            &cfg,
            KernelKind::default(),
            &mut c,
        )
        .unwrap();
        assert_eq!(outs.len(), 1);
        assert_eq!(outs[0], direct);
        assert_eq!(final_state.max_abs_diff(&state), 0.0);
    }

    #[test]
    fn empty_sequence_is_an_error() {
        let cfg = ModelConfig::default();
        let params = HeadParams::zeros(&cfg);
        let state = LayerState::<f32>::zeros(&cfg);
        let mut c = AccessCounters::new();
        let err = run_sequence(&[], &state, &params, &cfg, KernelKind::default(), &mut c);
        assert!(matches!(err, Err(KernelError::Argument(_))));
    }

    #[test]
    fn decayed_sequence_approaches_scaled_initial_state() {
        // b -> -inf drives beta -> 0, so each step is (numerically) pure
        // decay and the final state is (prod g_t) * S0 per head.
        let cfg = ModelConfig::default();
        let mut seq = generate_sequence(5, 4, &cfg);
        for t in &mut seq.tokens {
            t.b = vec![-50.0; cfg.h_v];
        }
        let mut c = AccessCounters::new();
        let (_, final_state) = run_sequence(
            &seq.tokens,
            &seq.init_state,
            &seq.params,
            &cfg,
            KernelKind::default(),
            &mut c,
        )
        .unwrap();

        // Recompute the per-head decay product from the gate formula.
        for h in 0..cfg.h_v {
            let mut product = 1.0f64;
            for t in &seq.tokens {
                let gates = compute_gates(&t.alpha, &t.b, &seq.params, &cfg, &mut c).unwrap();
                product *= gates.g[h];
            }
            let expect = seq.init_state.head(h).map(|x| (x as f64 * product) as f32);
            let diff = final_state.head(h).max_abs_diff(&expect);
            assert!(diff < 1e-6, "head {h}: {diff}");
        }
    }

    #[test]
    fn fused_and_naive_layer_outputs_agree() {
        let cfg = ModelConfig::default();
        let seq = generate_sequence(77, 1, &cfg);
        let mut c = AccessCounters::new();

        let mut sn = seq.init_state.clone();
        let on = decode_layer(&seq.tokens[0], &mut sn, &seq.params, &cfg, KernelKind::Naive, &mut c)
            .unwrap();
        let mut sf = seq.init_state.clone();
        let of = decode_layer(
            &seq.tokens[0],
            &mut sf,
            &seq.params,
            &cfg,
            KernelKind::default(),
            &mut c,
        )
        .unwrap();

        for h in 0..cfg.h_v {
            for i in 0..cfg.d {
                let (a, b) = (on[h][i], of[h][i]);
                assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "h={h} i={i}");
            }
        }
    }
}
