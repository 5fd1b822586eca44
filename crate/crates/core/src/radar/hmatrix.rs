//! Time-varying channel matrix rebuilt from target estimates, and FMCW
//! cancellation.

use std::f64::consts::PI;

use super::rd::TargetEstimate;
use crate::channel::{apply_taps, LtvTap};
use crate::error::{config_err, Result};
use crate::numerics::{ComplexSignal, C64};

/// Banded `size x size` matrix with entry `(n, n - d_p) =
/// h_p exp(j 2 pi nu_p (origin + n))`; `origin` is the absolute sample index
/// of row 0 so Doppler phase stays coherent across blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrixEstimate {
    pub taps: Vec<LtvTap>,
    pub origin: usize,
    pub size: usize,
}

/// Converts detections (with gains filled in) into sample-domain taps.
pub fn targets_to_taps(targets: &[TargetEstimate], fs: f64) -> Vec<LtvTap> {
    targets
        .iter()
        .map(|t| LtvTap {
            delay: t.delay_samples(fs),
            doppler: t.doppler / fs,
            gain: t.gain,
        })
        .collect()
}

pub fn reconstruct_channel(targets: &[TargetEstimate], fs: f64, origin: usize, size: usize) -> ChannelMatrixEstimate {
    ChannelMatrixEstimate {
        taps: targets_to_taps(targets, fs),
        origin,
        size,
    }
}

impl ChannelMatrixEstimate {
    pub fn from_taps(taps: Vec<LtvTap>, origin: usize, size: usize) -> Self {
        ChannelMatrixEstimate { taps, origin, size }
    }

    pub fn entry(&self, n: usize, col: usize) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        if col > n || n >= self.size {
            return v;
        }
        for t in &self.taps {
            if n - col == t.delay {
                v += t.gain * C64::from_polar(1.0, 2.0 * PI * (t.doppler * (self.origin + n) as f64).rem_euclid(1.0));
            }
        }
        v
    }

    /// `H x` for a block of `size` samples.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.size {
            return config_err(format!("block of {} samples, matrix is {}", x.len(), self.size));
        }
        Ok(apply_taps(&self.taps, x, self.origin))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.size * self.size];
        for n in 0..self.size {
            for t in &self.taps {
                if t.delay <= n {
                    out[n * self.size + n - t.delay] += t.gain
                        * C64::from_polar(1.0, 2.0 * PI * (t.doppler * (self.origin + n) as f64).rem_euclid(1.0));
                }
            }
        }
        out
    }
}

/// `y - H s_fmcw` over the whole frame, so chirp energy spilling across
/// block boundaries is removed too.
pub fn cancel_fmcw(y: &ComplexSignal, taps: &[LtvTap], s_fmcw: &ComplexSignal) -> Result<ComplexSignal> {
    if y.len() != s_fmcw.len() {
        return config_err(format!(
            "received frame has {} samples, FMCW reference {}",
            y.len(),
            s_fmcw.len()
        ));
    }
    let echo = apply_taps(taps, s_fmcw.samples(), 0);
    ComplexSignal::new(
        y.samples().iter().zip(&echo).map(|(a, b)| a - b).collect(),
        y.sample_rate(),
    )
}
