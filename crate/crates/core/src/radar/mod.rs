//! Radar-side receiver of the joint FMCW/OFDM frame: range-Doppler sensing,
//! channel reconstruction, FMCW cancellation and OFDM equalisation.

mod equalize;
mod hmatrix;
mod ls;
mod pipeline;
mod rd;

pub use equalize::{cfr_diagonal, cfr_matrix, equalize_ofdm, EqualizedFrame, ERASURE_FLOOR};
pub use hmatrix::{cancel_fmcw, reconstruct_channel, targets_to_taps, ChannelMatrixEstimate};
pub use ls::{estimate_gains, fit_gains, LsFit};
pub use pipeline::{
    jrc_receive, receive_ofdm, sense, JrcReception, SensingConfig, SensingReport, DEFAULT_PRUNE_SIGNIFICANCE,
};
pub use rd::{
    dechirp, delay_doppler_to_physical, extract_targets, periodogram, CpiMatrix, RangeDopplerMap, TargetEstimate,
    DEFAULT_THRESHOLD_DB,
};

use crate::waveforms::FmcwParams;

/// Sampling and sweep figures that calibrate map bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarGeometry {
    pub sample_rate: f64,
    pub bandwidth: f64,
    pub chirp_len: usize,
    pub chirps: usize,
}

impl RadarGeometry {
    pub fn new(fmcw: &FmcwParams, fs: f64) -> Self {
        RadarGeometry {
            sample_rate: fs,
            bandwidth: fmcw.bandwidth,
            chirp_len: fmcw.chirp_len(fs),
            chirps: fmcw.chirps,
        }
    }

    /// Seconds of delay per range bin, `1 / bandwidth`.
    pub fn delay_per_range_bin(&self) -> f64 {
        1.0 / self.bandwidth
    }

    /// Hz per Doppler bin: one over the CPI length.
    pub fn doppler_per_bin(&self) -> f64 {
        self.sample_rate / (self.chirps * self.chirp_len) as f64
    }
}
