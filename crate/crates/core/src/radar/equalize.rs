//! Pilot-free equalisation of the OFDM payload with the radar-derived
//! channel.

use std::f64::consts::PI;

use super::hmatrix::ChannelMatrixEstimate;
use crate::channel::LtvTap;
use crate::error::{config_err, Result};
use crate::noma::symbol_llrs;
use crate::numerics::{fft_in_place, Normalization, QamConstellation, C64};
use crate::waveforms::{symbol_spectrum, OfdmParams};

/// Subcarriers whose frequency response magnitude is below this are erased.
pub const ERASURE_FLOOR: f64 = 1e-12;

/// Dense `N x N` frequency-domain channel `F B H A F^H` (unitary DFT, CP
/// insertion `A`, CP removal `B`) of one OFDM symbol, row-major.
pub fn cfr_matrix(h: &ChannelMatrixEstimate, ofdm: &OfdmParams) -> Result<Vec<C64>> {
    let n = ofdm.fft_size;
    let g = ofdm.cp_len;
    if h.size != n + g {
        return config_err(format!("channel block of {} samples, symbol has {}", h.size, n + g));
    }
    let mut theta = vec![C64::new(0.0, 0.0); n * n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        col.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        col[k] = C64::new(1.0, 0.0);
        fft_in_place(&mut col, true, Normalization::Unitary);
        let mut x = col[n - g..].to_vec();
        x.extend_from_slice(&col);
        let y = h.apply(&x)?;
        let mut out = y[g..].to_vec();
        fft_in_place(&mut out, false, Normalization::Unitary);
        for (row, v) in out.iter().enumerate() {
            theta[row * n + k] = *v;
        }
    }
    Ok(theta)
}

/// Diagonal of [`cfr_matrix`] in closed form:
/// `theta_k = (1/N) sum_n' sum_p g_p(n' + N_g) exp(-j 2 pi k d_p / N)` with
/// `g_p(n)` the tap's time-varying gain; terms reaching into the previous
/// symbol (`n' + N_g < d_p`) are dropped as in the banded matrix.
pub fn cfr_diagonal(taps: &[LtvTap], origin: usize, ofdm: &OfdmParams) -> Vec<C64> {
    let n = ofdm.fft_size;
    let g = ofdm.cp_len;
    let mut acc: Vec<(usize, C64)> = Vec::with_capacity(taps.len());
    for t in taps {
        let start = t.delay.saturating_sub(g);
        let sum: C64 = (start..n)
            .map(|i| C64::from_polar(1.0, 2.0 * PI * (t.doppler * (origin + g + i) as f64).rem_euclid(1.0)))
            .sum();
        acc.push((t.delay, t.gain * sum / n as f64));
    }
    (0..n)
        .map(|k| {
            acc.iter()
                .map(|&(d, s)| s * C64::from_polar(1.0, -2.0 * PI * ((k * d) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Per-subcarrier estimates of a frame of OFDM symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizedFrame {
    /// Estimated data symbols, symbol-major over loaded subcarriers.
    pub symbols: Vec<C64>,
    /// Effective gain `theta * G` each estimate was divided by.
    pub gains: Vec<C64>,
    pub erased: Vec<bool>,
}

/// One-tap equalisation with the diagonal of the CFR matrix;
/// inter-carrier leakage is left as interference. `y` starts at absolute
/// sample `origin` and holds the OFDM symbols back to back.
pub fn equalize_ofdm(y: &[C64], taps: &[LtvTap], ofdm: &OfdmParams, origin: usize) -> Result<EqualizedFrame> {
    ofdm.validate()?;
    if y.len() < ofdm.frame_len() {
        return config_err(format!("{} samples cannot hold {} OFDM symbols", y.len(), ofdm.symbols));
    }
    let bins = ofdm.subcarrier_bins();
    let gain = ofdm.gain();
    let total = ofdm.symbols * bins.len();
    let mut out = EqualizedFrame {
        symbols: Vec::with_capacity(total),
        gains: Vec::with_capacity(total),
        erased: Vec::with_capacity(total),
    };
    for (s, block) in y.chunks_exact(ofdm.symbol_len()).take(ofdm.symbols).enumerate() {
        let theta = cfr_diagonal(taps, origin + s * ofdm.symbol_len(), ofdm);
        let spec = symbol_spectrum(block, ofdm);
        for &b in &bins {
            let g = theta[b] * gain;
            if theta[b].norm() < ERASURE_FLOOR {
                out.symbols.push(C64::new(0.0, 0.0));
                out.gains.push(C64::new(0.0, 0.0));
                out.erased.push(true);
            } else {
                out.symbols.push(g.conj() * spec[b] / g.norm_sqr());
                out.gains.push(g);
                out.erased.push(false);
            }
        }
    }
    Ok(out)
}

impl EqualizedFrame {
    /// Max-log bit LLRs given noise variance `noise_var` per unitary bin;
    /// erased subcarriers give zero LLRs.
    pub fn llrs(&self, constellation: &QamConstellation, noise_var: f64) -> Vec<f64> {
        let q = constellation.bits_per_symbol();
        let received: Vec<C64> = self.symbols.iter().zip(&self.gains).map(|(d, g)| d * g).collect();
        let noise = vec![noise_var; received.len()];
        let zero = [C64::new(0.0, 0.0)];
        let mut out = symbol_llrs(&received, &self.gains, &noise, constellation, 1.0, &zero, 0.0);
        for (i, &e) in self.erased.iter().enumerate() {
            if e {
                out[i * q..(i + 1) * q].iter_mut().for_each(|v| *v = 0.0);
            }
        }
        out
    }
}
