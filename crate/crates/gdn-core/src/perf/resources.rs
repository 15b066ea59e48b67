//! Fabric resource estimates per design point.
//!
//! Descriptive, not predictive: the measured anchor points are returned
//! verbatim and other head counts interpolate a two-point linear fit
//! between the narrowest and widest anchors. BRAM plateaus once the head
//! dimension of the state array is fully partitioned.

use crate::reference;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResourceEstimate {
    pub h_iter: usize,
    pub bram_18k: u64,
    pub dsp: u64,
    pub ff_pct: f64,
    pub lut_pct: f64,
    /// True when the row is a measured anchor rather than a fit.
    pub anchored: bool,
}

/// Linear fit through the two extreme anchors, evaluated at `h_iter`.
pub fn linear_fit(h_iter: usize, lo: (usize, f64), hi: (usize, f64)) -> f64 {
    let (h0, y0) = (lo.0 as f64, lo.1);
    let (h1, y1) = (hi.0 as f64, hi.1);
    y0 + (y1 - y0) * (h_iter as f64 - h0) / (h1 - h0)
}

pub fn estimate_resources(h_iter: usize) -> ResourceEstimate {
    if let Some(&(h, bram, dsp, ff, lut)) = reference::RESOURCE_ANCHORS
        .iter()
        .find(|(h, ..)| *h == h_iter)
    {
        return ResourceEstimate {
            h_iter: h,
            bram_18k: bram,
            dsp,
            ff_pct: ff,
            lut_pct: lut,
            anchored: true,
        };
    }

    let first = reference::RESOURCE_ANCHORS[0];
    let last = reference::RESOURCE_ANCHORS[reference::RESOURCE_ANCHORS.len() - 1];
    let dsp = linear_fit(h_iter, (first.0, first.2 as f64), (last.0, last.2 as f64));
    let ff = linear_fit(h_iter, (first.0, first.3), (last.0, last.3));
    let lut = linear_fit(h_iter, (first.0, first.4), (last.0, last.4));
    ResourceEstimate {
        h_iter,
        bram_18k: if h_iter <= 2 { first.1 } else { last.1 },
        dsp: dsp.max(0.0).round() as u64,
        ff_pct: ff.max(0.0),
        lut_pct: lut.max(0.0),
        anchored: false,
    }
}
