use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::numerics::{ComplexSignal, C64};

/// Chirp train parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmcwParams {
    /// Sweep bandwidth in Hz.
    pub bandwidth: f64,
    /// Chirp duration in seconds.
    pub chirp_duration: f64,
    /// Chirps per frame.
    pub chirps: usize,
    /// Frame duration in seconds.
    pub frame_duration: f64,
    pub power: f64,
}

/// Whole samples in `duration` at rate `fs`, tolerant to rounding noise.
pub fn samples_in(duration: f64, fs: f64) -> usize {
    (duration * fs + 1e-6).floor() as usize
}

impl FmcwParams {
    /// 23.04 MHz sweep over 72 samples at 30.72 MHz, 64 chirps.
    pub fn desk() -> Self {
        FmcwParams {
            bandwidth: 23.04e6,
            chirp_duration: 2.34375e-6,
            chirps: 64,
            frame_duration: 64.0 * 2.34375e-6,
            power: 1.0,
        }
    }

    /// 100 MHz sweep, 2.4 us chirps, 2 ms frame.
    pub fn full_scale() -> Self {
        let tau = 2.4e-6;
        let frame = 2e-3;
        FmcwParams {
            bandwidth: 100e6,
            chirp_duration: tau,
            chirps: (frame / tau + 1e-9).floor() as usize,
            frame_duration: frame,
            power: 1.0,
        }
    }

    /// Samples per chirp, `floor(tau * fs)`.
    pub fn chirp_len(&self, fs: f64) -> usize {
        samples_in(self.chirp_duration, fs)
    }

    /// Samples in the frame: the longer of the chirp train and `T * fs`.
    pub fn frame_len(&self, fs: f64) -> usize {
        (self.chirps * self.chirp_len(fs)).max(samples_in(self.frame_duration, fs))
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth <= fs) {
            return config_err(format!(
                "sweep bandwidth {} Hz must lie in (0, {fs}] to avoid aliasing",
                self.bandwidth
            ));
        }
        if self.chirps == 0 || self.chirp_len(fs) < 2 {
            return config_err("need at least one chirp of two or more samples");
        }
        if self.chirps as f64 * self.chirp_duration > self.frame_duration * (1.0 + 1e-9) {
            return config_err(format!(
                "{} chirps of {} s exceed the {} s frame",
                self.chirps, self.chirp_duration, self.frame_duration
            ));
        }
        if !(self.power >= 0.0) {
            return config_err("FMCW power must be non-negative");
        }
        Ok(())
    }

    /// Unit-amplitude reference chirp `exp(j pi beta (n/fs)^2 / tau)`.
    pub fn reference_chirp(&self, fs: f64) -> Vec<C64> {
        let rate = PI * self.bandwidth / self.chirp_duration;
        (0..self.chirp_len(fs))
            .map(|n| {
                let t = n as f64 / fs;
                C64::from_polar(1.0, rate * t * t)
            })
            .collect()
    }
}

/// `K` back-to-back up-chirps at amplitude `sqrt(P)`, zero-padded to the
/// frame length.
pub fn fmcw_generate(params: &FmcwParams, fs: f64) -> Result<ComplexSignal> {
    params.validate(fs)?;
    let amp = params.power.sqrt();
    let chirp: Vec<C64> = params.reference_chirp(fs).into_iter().map(|c| c * amp).collect();
    let mut out = Vec::with_capacity(params.frame_len(fs));
    for _ in 0..params.chirps {
        out.extend_from_slice(&chirp);
    }
    out.resize(params.frame_len(fs), C64::new(0.0, 0.0));
    ComplexSignal::new(out, fs)
}
