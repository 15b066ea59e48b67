//! Single-head decode steps, naive and fused.

use crate::kernel::counters::{AccessCounters, Phase};
use crate::kernel::real::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Column tile width of the fused read/write passes. Matches the default
/// column parallelism of the modelled datapath.
pub const DEFAULT_TILE: usize = 16;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// Dense `d x d` state matrix, row-major.
///
/// Retrieval treats the matrix transposed: `r[i] = sum_j S[j][i] * k[j]`,
/// i.e. each output element reduces down one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMatrix<T> {
    d: usize,
    data: Vec<T>,
}

impl<T: Real> StateMatrix<T> {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![T::ZERO; d * d],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, KernelError> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(KernelError::Shape("state matrix must be square".into()));
        }
        Ok(Self {
            d,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_flat(d: usize, data: Vec<T>) -> Result<Self, KernelError> {
        if data.len() != d * d {
            return Err(KernelError::Shape(format!(
                "state payload has {} elements, expected {}",
                data.len(),
                d * d
            )));
        }
        Ok(Self { d, data })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.d + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.d + col] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> StateMatrix<U> {
        StateMatrix {
            d: self.d,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max)
    }
}

fn check_shapes<T: Real>(
    q: &[T],
    k: &[T],
    v: &[T],
    state: &StateMatrix<T>,
) -> Result<usize, KernelError> {
    let d = state.dim();
    if q.len() != d || k.len() != d || v.len() != d {
        return Err(KernelError::Shape(format!(
            "q/k/v lengths {}/{}/{} do not match state dim {}",
            q.len(),
            k.len(),
            v.len(),
            d
        )));
    }
    Ok(d)
}

/// Plain sequential dot product; the accumulation order of the golden
/// reference. Counts d muls and d adds.
#[cfg(test)]
fn dot_plain<T: Real>(x: &[T], y: &[T]) -> T {
    let mut acc = T::ZERO;
    for (&a, &b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

/// Tiled dot product mirroring the hardware order: the reduction axis is
/// split into tiles of `tile` elements, each tile is combined with a
/// pairwise partial-sum tree, and tile partials accumulate sequentially.
/// Same operation count as `dot_plain` (d muls, d adds), different order.
fn dot_tiled<T: Real>(x: &[T], y: &[T], tile: usize, scratch: &mut Vec<T>) -> T {
    let mut acc = T::ZERO;
    let mut base = 0;
    while base < x.len() {
        let end = (base + tile).min(x.len());
        scratch.clear();
        for i in base..end {
            scratch.push(x[i] * y[i]);
        }
        // Pairwise tree reduction in place.
        let mut n = scratch.len();
        while n > 1 {
            let half = n / 2;
            for i in 0..half {
                let hi = scratch[n - 1 - i];
                scratch[i] = scratch[i] + hi;
            }
            n -= half;
        }
        acc += scratch[0];
        base = end;
    }
    acc
}

/// Naive three-pass decode step for one value head, mutating the state in
/// place and returning the output vector.
///
/// Pass structure: retrieval reads the full state, the update reads and
/// writes it, and the output reduction reads the *updated* state again —
/// exactly 3d^2 element reads and d^2 writes.
pub fn decode_naive<T: Real>(
    q: &[T],
    k: &[T],
    v: &[T],
    state: &mut StateMatrix<T>,
    g: T,
    beta: T,
    counters: &mut AccessCounters,
) -> Result<Vec<T>, KernelError> {
    let d = check_shapes(q, k, v, state)?;

    // Retrieval: r = S^T k.
    counters.set_phase(Phase::ReadPass);
    let mut r = vec![T::ZERO; d];
    for (i, ri) in r.iter_mut().enumerate() {
        let mut acc = T::ZERO;
        for j in 0..d {
            acc += state.get(j, i) * k[j];
        }
        *ri = acc;
    }
    counters.read_state((d * d) as u64);
    counters.mul((d * d) as u64);
    counters.add((d * d) as u64);

    // Delta correction.
    counters.set_phase(Phase::Delta);
    let delta_v: Vec<T> = v
        .iter()
        .zip(&r)
        .map(|(&vi, &ri)| beta * (vi - ri))
        .collect();
    counters.add(d as u64);
    counters.mul(d as u64);

    // State update: S <- g*S + k (delta_v)^T, one read and one write per
    // element.
    counters.set_phase(Phase::WritePass);
    for j in 0..d {
        for (i, &dv) in delta_v.iter().enumerate() {
            let decayed = g * state.get(j, i);
            state.set(j, i, decayed + k[j] * dv);
        }
    }
    counters.read_state((d * d) as u64);
    counters.write_state((d * d) as u64);
    counters.mul(2 * (d * d) as u64);
    counters.add((d * d) as u64);

    // Output: o = S^T q / sqrt(d), a third full pass over the new state.
    counters.set_phase(Phase::Correct);
    let inv_sqrt_d = T::from_f64(1.0 / (d as f64).sqrt());
    counters.transcendental(1);
    counters.div(1);
    let mut o = vec![T::ZERO; d];
    for (i, oi) in o.iter_mut().enumerate() {
        let mut acc = T::ZERO;
        for j in 0..d {
            acc += state.get(j, i) * q[j];
        }
        *oi = acc * inv_sqrt_d;
    }
    counters.read_state((d * d) as u64);
    counters.mul((d * d + d) as u64);
    counters.add((d * d) as u64);

    Ok(o)
}

/// Fused five-phase decode step for one value head.
///
/// The read pass loads each state element once and feeds both the
/// retrieval and the partial-output accumulators; the output correction
/// `o = (o_hat + (q . k) * delta_v) / sqrt(d)` then removes the need to
/// re-read the updated state, leaving 2d^2 element reads and d^2 writes.
///
/// `tile` is the column-parallel tile width used for accumulation order
/// (see [`dot_tiled`]); pass [`DEFAULT_TILE`] for the hardware default.
pub fn decode_fused<T: Real>(
    q: &[T],
    k: &[T],
    v: &[T],
    state: &mut StateMatrix<T>,
    g: T,
    beta: T,
    tile: usize,
    counters: &mut AccessCounters,
) -> Result<Vec<T>, KernelError> {
    let d = check_shapes(q, k, v, state)?;
    if tile == 0 {
        return Err(KernelError::Argument("tile width must be positive".into()));
    }
    let mut scratch = Vec::with_capacity(tile);

    // Phase 1: query-key dot product.
    counters.set_phase(Phase::QkDot);
    let qk = dot_tiled(q, k, tile, &mut scratch);
    counters.mul(d as u64);
    counters.add(d as u64);

    // Phase 2: single read pass producing both r and the partial output.
    counters.set_phase(Phase::ReadPass);
    let mut r = vec![T::ZERO; d];
    let mut o_hat = vec![T::ZERO; d];
    let mut col_k = vec![T::ZERO; d];
    for i in 0..d {
        for (j, slot) in col_k.iter_mut().enumerate() {
            *slot = state.get(j, i);
        }
        r[i] = dot_tiled(&col_k, k, tile, &mut scratch);
        o_hat[i] = g * dot_tiled(&col_k, q, tile, &mut scratch);
    }
    counters.read_state((d * d) as u64);
    counters.mul((2 * d * d + d) as u64);
    counters.add((2 * d * d) as u64);

    // Phase 3: delta correction.
    counters.set_phase(Phase::Delta);
    let delta_v: Vec<T> = v
        .iter()
        .zip(&r)
        .map(|(&vi, &ri)| beta * (vi - ri))
        .collect();
    counters.add(d as u64);
    counters.mul(d as u64);

    // Phase 4: output correction.
    counters.set_phase(Phase::Correct);
    let inv_sqrt_d = T::from_f64(1.0 / (d as f64).sqrt());
    counters.transcendental(1);
    counters.div(1);
    let o: Vec<T> = o_hat
        .iter()
        .zip(&delta_v)
        .map(|(&oh, &dv)| (oh + qk * dv) * inv_sqrt_d)
        .collect();
    counters.mul(2 * d as u64);
    counters.add(d as u64);

    // Phase 5: single write pass, column by column.
    counters.set_phase(Phase::WritePass);
    for (i, &dv) in delta_v.iter().enumerate() {
        for j in 0..d {
            let decayed = g * state.get(j, i);
            state.set(j, i, decayed + k[j] * dv);
        }
    }
    counters.read_state((d * d) as u64);
    counters.write_state((d * d) as u64);
    counters.mul(2 * (d * d) as u64);
    counters.add((d * d) as u64);

    Ok(o)
}
