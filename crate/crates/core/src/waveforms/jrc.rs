use serde::{Deserialize, Serialize};

use super::fmcw::{samples_in, FmcwParams};
use super::ofdm::OfdmParams;
use crate::error::{config_err, Result};
use crate::numerics::ComplexSignal;

/// Joint radar-communication frame: a chirp train with OFDM symbols
/// superimposed after the first chirp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JrcParams {
    pub fmcw: FmcwParams,
    pub ofdm: OfdmParams,
    pub carrier_hz: f64,
}

impl JrcParams {
    /// 30.72 MHz desk frame: 64 chirps of 72 samples, 8 OFDM symbols of 548.
    pub fn desk() -> Self {
        Self::fitted(FmcwParams::desk(), OfdmParams::desk())
    }

    /// 122.88 MHz frame with a 2048-point OFDM lattice.
    pub fn full_scale() -> Self {
        Self::fitted(FmcwParams::full_scale(), OfdmParams::full_scale())
    }

    /// Uses as many OFDM symbols as fit between the first chirp and the end
    /// of the frame.
    pub fn fitted(fmcw: FmcwParams, mut ofdm: OfdmParams) -> Self {
        let fs = ofdm.sample_rate();
        let room = fmcw.frame_len(fs).saturating_sub(fmcw.chirp_len(fs));
        ofdm.symbols = room / ofdm.symbol_len();
        JrcParams {
            fmcw,
            ofdm,
            carrier_hz: 28e9,
        }
    }

    pub fn sample_rate(&self) -> f64 {
        self.ofdm.sample_rate()
    }

    pub fn chirp_len(&self) -> usize {
        self.fmcw.chirp_len(self.sample_rate())
    }

    pub fn frame_len(&self) -> usize {
        self.fmcw.frame_len(self.sample_rate())
    }

    /// First sample of the OFDM payload.
    pub fn ofdm_offset(&self) -> usize {
        self.chirp_len()
    }

    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.fmcw.validate(self.sample_rate())?;
        if self.ofdm.symbols == 0 {
            return config_err("frame too short for a single OFDM symbol");
        }
        if self.ofdm_offset() + self.ofdm.frame_len() > self.frame_len() {
            return config_err("OFDM payload overruns the frame");
        }
        Ok(())
    }
}

/// Adds `ofdm` to `fmcw` starting `floor(offset * fs)` samples in.
pub fn build_jrc_frame(fmcw: &ComplexSignal, ofdm: &ComplexSignal, offset: f64) -> Result<ComplexSignal> {
    let fs = fmcw.sample_rate();
    if (ofdm.sample_rate() - fs).abs() > 1e-9 * fs {
        return config_err("FMCW and OFDM sample rates differ");
    }
    let start = samples_in(offset, fs);
    if start + ofdm.len() > fmcw.len() {
        return config_err(format!(
            "OFDM payload ({} samples from {start}) overruns the {}-sample frame",
            ofdm.len(),
            fmcw.len()
        ));
    }
    let mut out = fmcw.samples().to_vec();
    for (o, v) in out[start..].iter_mut().zip(ofdm.samples()) {
        *o += v;
    }
    ComplexSignal::new(out, fs)
}
