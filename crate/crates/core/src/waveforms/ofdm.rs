use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::numerics::{fft_in_place, ComplexSignal, Normalization, C64};

/// CP-OFDM lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmParams {
    /// FFT size N.
    pub fft_size: usize,
    /// Number of loaded subcarriers, placed symmetrically around an unused DC bin.
    pub allocated: usize,
    /// Subcarrier spacing in Hz.
    pub subcarrier_spacing: f64,
    /// Cyclic prefix length in samples.
    pub cp_len: usize,
    /// OFDM symbols per frame.
    pub symbols: usize,
    /// Average transmit power per time-domain sample.
    pub power: f64,
}

impl OfdmParams {
    /// 512-point desk configuration: 416 loaded subcarriers, 60 kHz spacing.
    pub fn desk() -> Self {
        OfdmParams {
            fft_size: 512,
            allocated: 416,
            subcarrier_spacing: 60e3,
            cp_len: 36,
            symbols: 1,
            power: 1.0,
        }
    }

    /// 2048-point, 1666 loaded subcarriers, 60 kHz spacing.
    pub fn full_scale() -> Self {
        OfdmParams {
            fft_size: 2048,
            allocated: 1666,
            subcarrier_spacing: 60e3,
            cp_len: 144,
            symbols: 1,
            power: 1.0,
        }
    }

    pub fn sample_rate(&self) -> f64 {
        self.fft_size as f64 * self.subcarrier_spacing
    }

    /// Samples per OFDM symbol including the CP.
    pub fn symbol_len(&self) -> usize {
        self.fft_size + self.cp_len
    }

    pub fn frame_len(&self) -> usize {
        self.symbols * self.symbol_len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size == 0 || self.allocated == 0 || self.allocated >= self.fft_size {
            return config_err(format!(
                "need 0 < allocated ({}) < fft_size ({})",
                self.allocated, self.fft_size
            ));
        }
        if !(self.subcarrier_spacing > 0.0) {
            return config_err("subcarrier spacing must be positive");
        }
        if self.cp_len > self.fft_size {
            return config_err("cyclic prefix longer than the symbol body");
        }
        if !(self.power >= 0.0) {
            return config_err("OFDM power must be non-negative");
        }
        Ok(())
    }

    /// FFT bin of each allocated subcarrier: the lower half sits just below
    /// DC (wrapping to the top of the FFT), the upper half starts at bin 1.
    pub fn subcarrier_bins(&self) -> Vec<usize> {
        let half = self.allocated / 2;
        (0..self.allocated)
            .map(|i| {
                if i < half {
                    self.fft_size - half + i
                } else {
                    i - half + 1
                }
            })
            .collect()
    }

    /// Frequency-domain amplitude that gives the configured time-domain power
    /// when every loaded subcarrier carries a unit-energy symbol.
    pub fn gain(&self) -> f64 {
        (self.power * self.fft_size as f64 / self.allocated as f64).sqrt()
    }
}

/// Unitary IDFT of each symbol's spectrum scaled by `gain`, with CP.
pub(crate) fn modulate_with_gain(grid: &[C64], params: &OfdmParams, gain: f64) -> Result<ComplexSignal> {
    params.validate()?;
    if grid.len() != params.symbols * params.allocated {
        return config_err(format!(
            "grid has {} entries, expected {} symbols x {} subcarriers",
            grid.len(),
            params.symbols,
            params.allocated
        ));
    }
    let n = params.fft_size;
    let bins = params.subcarrier_bins();
    let mut out = Vec::with_capacity(params.frame_len());
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for row in grid.chunks_exact(params.allocated) {
        buf.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (&b, &x) in bins.iter().zip(row) {
            buf[b] = x * gain;
        }
        fft_in_place(&mut buf, true, Normalization::Unitary);
        out.extend_from_slice(&buf[n - params.cp_len..]);
        out.extend_from_slice(&buf);
    }
    ComplexSignal::new(out, params.sample_rate())
}

/// Modulates a symbol-major grid (`symbols x allocated`) into CP-OFDM.
pub fn ofdm_modulate(grid: &[C64], params: &OfdmParams) -> Result<ComplexSignal> {
    modulate_with_gain(grid, params, params.gain())
}

/// Full N-point unitary spectrum of one received symbol after CP removal.
pub fn symbol_spectrum(block: &[C64], params: &OfdmParams) -> Vec<C64> {
    let mut buf = block[params.cp_len..params.cp_len + params.fft_size].to_vec();
    fft_in_place(&mut buf, false, Normalization::Unitary);
    buf
}

/// Loaded-subcarrier values of every symbol, divided by `gain` when positive.
pub(crate) fn demodulate_with_gain(signal: &[C64], params: &OfdmParams, gain: f64) -> Result<Vec<C64>> {
    params.validate()?;
    if signal.len() < params.frame_len() {
        return config_err(format!(
            "signal of {} samples shorter than a {}-sample frame",
            signal.len(),
            params.frame_len()
        ));
    }
    let bins = params.subcarrier_bins();
    let scale = if gain > 0.0 { 1.0 / gain } else { 1.0 };
    let mut out = Vec::with_capacity(params.symbols * params.allocated);
    for block in signal.chunks_exact(params.symbol_len()).take(params.symbols) {
        let spec = symbol_spectrum(block, params);
        out.extend(bins.iter().map(|&b| spec[b] * scale));
    }
    Ok(out)
}

/// Inverse of [`ofdm_modulate`] through an ideal channel. With zero
/// configured power the raw unitary bins are returned.
pub fn ofdm_demodulate(signal: &ComplexSignal, params: &OfdmParams) -> Result<Vec<C64>> {
    demodulate_with_gain(signal.samples(), params, params.gain())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;
    use std::f64::consts::PI;

    fn small() -> OfdmParams {
        OfdmParams {
            fft_size: 64,
            allocated: 48,
            subcarrier_spacing: 15e3,
            cp_len: 16,
            symbols: 3,
            power: 2.0,
        }
    }

    fn random_grid(p: &OfdmParams, rng: &mut SimRng) -> Vec<C64> {
        (0..p.symbols * p.allocated)
            .map(|_| rng.complex_gaussian(1.0))
            .collect()
    }

    #[test]
    fn bins_are_distinct_and_skip_dc() {
        for p in [small(), OfdmParams::desk(), OfdmParams::full_scale()] {
            let mut bins = p.subcarrier_bins();
            assert!(!bins.contains(&0));
            bins.sort_unstable();
            bins.dedup();
            assert_eq!(bins.len(), p.allocated);
        }
    }

    #[test]
    fn round_trip() {
        let p = small();
        let mut rng = SimRng::new(1);
        let grid = random_grid(&p, &mut rng);
        let back = ofdm_demodulate(&ofdm_modulate(&grid, &p).unwrap(), &p).unwrap();
        for (a, b) in grid.iter().zip(&back) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn single_subcarrier_is_a_complex_exponential() {
        let p = OfdmParams { symbols: 1, ..small() };
        let i = 30;
        let bin = p.subcarrier_bins()[i];
        let mut grid = vec![C64::new(0.0, 0.0); p.allocated];
        grid[i] = C64::new(1.0, 0.0);
        let x = ofdm_modulate(&grid, &p).unwrap();
        let body = &x.samples()[p.cp_len..];
        let amp = (p.power / p.allocated as f64).sqrt();
        for (n, v) in body.iter().enumerate() {
            let expected = C64::from_polar(amp, 2.0 * PI * (bin * n) as f64 / p.fft_size as f64);
            assert!((v - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn cp_copies_the_tail() {
        let p = small();
        let mut rng = SimRng::new(2);
        let x = ofdm_modulate(&random_grid(&p, &mut rng), &p).unwrap();
        for sym in x.samples().chunks_exact(p.symbol_len()) {
            assert_eq!(&sym[..p.cp_len], &sym[p.fft_size..]);
        }
    }

    #[test]
    fn average_power_matches_configuration() {
        let p = OfdmParams {
            symbols: 200,
            ..small()
        };
        let mut rng = SimRng::new(3);
        let grid: Vec<C64> = (0..p.symbols * p.allocated).map(|_| rng.uniform_phase()).collect();
        let x = ofdm_modulate(&grid, &p).unwrap();
        let body_power: f64 = x
            .samples()
            .chunks_exact(p.symbol_len())
            .map(|s| crate::numerics::energy(&s[p.cp_len..]))
            .sum::<f64>()
            / (p.symbols * p.fft_size) as f64;
        assert!((body_power - p.power).abs() < 1e-9);
    }

    #[test]
    fn static_channel_scales_each_subcarrier_by_its_cfr() {
        use crate::channel::{channel_frequency_response, draw_fading};
        let p = small();
        let mut rng = SimRng::new(4);
        let ch = draw_fading(10, 0.5, &mut rng).unwrap();
        let grid = random_grid(&p, &mut rng);
        let x = ofdm_modulate(&grid, &p).unwrap();
        let y = ComplexSignal::new(ch.filter(x.samples()), p.sample_rate()).unwrap();
        let back = ofdm_demodulate(&y, &p).unwrap();
        let cfr = channel_frequency_response(&ch, p.fft_size).unwrap();
        let bins = p.subcarrier_bins();
        for (s, row) in back.chunks_exact(p.allocated).enumerate() {
            for (i, v) in row.iter().enumerate() {
                let expected = cfr[bins[i]] * grid[s * p.allocated + i];
                assert!((v - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let p = small();
        assert!(ofdm_modulate(&[C64::new(0.0, 0.0); 5], &p).is_err());
        let bad = OfdmParams {
            allocated: 64,
            ..small()
        };
        assert!(bad.validate().is_err());
        let short = ComplexSignal::zeros(10, 1.0).unwrap();
        assert!(ofdm_demodulate(&short, &p).is_err());
    }
}
