//! Local autocorrelation matrices over time-frequency neighborhoods and
//! their singular values.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sh::ShIndex;
use crate::stft::TfTensor;

/// Smoothing extent of the autocorrelation estimate: `time_frames`
/// consecutive frames starting at the bin's frame, and `freq_bins` bins
/// centered on the bin's frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinNeighborhood {
    time_frames: usize,
    freq_bins: usize,
}

impl BinNeighborhood {
    pub fn new(time_frames: usize, freq_bins: usize) -> Result<Self> {
        if time_frames == 0 || freq_bins == 0 {
            return Err(Error::InvalidInput("neighborhood extents must be positive".into()));
        }
        Ok(Self {
            time_frames,
            freq_bins,
        })
    }

    /// Default 2 frames × 9 bins: 18 snapshots, enough for a full-rank
    /// order-3 estimate (16 channels).
    pub fn default_for_order3() -> Self {
        Self {
            time_frames: 2,
            freq_bins: 9,
        }
    }

    pub fn time_frames(&self) -> usize {
        self.time_frames
    }

    pub fn freq_bins(&self) -> usize {
        self.freq_bins
    }

    pub fn snapshots(&self) -> usize {
        self.time_frames * self.freq_bins
    }

    /// Snapshot count must reach the channel count `(N+1)²` for a full-rank
    /// estimate.
    pub fn validate_for_order(&self, order: u32) -> Result<()> {
        if self.snapshots() < ShIndex::count(order) {
            return Err(Error::InvalidInput(format!(
                "{} snapshots cannot give a full-rank order-{order} estimate ({} channels)",
                self.snapshots(),
                ShIndex::count(order)
            )));
        }
        Ok(())
    }

    /// Frequency extent below/above the center bin.
    pub(crate) fn bin_range(&self) -> (usize, usize) {
        ((self.freq_bins - 1) / 2, self.freq_bins / 2)
    }
}

/// Snapshot-averaged autocorrelation
/// `R = (1/(J_τ J_k)) Σ a(τ′,k′) a(τ′,k′)^H` over the neighborhood of
/// `(frame, bin)`. Returns `None` when the neighborhood does not fit inside
/// the tensor (edge bins are skipped, not zero-padded).
pub fn local_autocorr(
    t: &TfTensor,
    frame: usize,
    bin: usize,
    hood: &BinNeighborhood,
) -> Option<DMatrix<Complex64>> {
    let (below, above) = hood.bin_range();
    if frame + hood.time_frames() > t.frames() || bin < below || bin + above >= t.bins() {
        return None;
    }
    let ch = t.channels();
    let mut r = DMatrix::<Complex64>::zeros(ch, ch);
    for f in frame..frame + hood.time_frames() {
        for b in (bin - below)..=(bin + above) {
            let v = t.snapshot(f, b);
            for i in 0..ch {
                for j in i..ch {
                    r[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
    }
    let scale = 1.0 / hood.snapshots() as f64;
    for i in 0..ch {
        for j in i..ch {
            r[(i, j)] *= scale;
            if j > i {
                r[(j, i)] = r[(i, j)].conj();
            }
        }
    }
    Some(r)
}

/// Singular values of a square complex matrix, descending.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}
