use serde::{Deserialize, Serialize};

use super::ofdm::{demodulate_with_gain, modulate_with_gain, OfdmParams};
use crate::error::{config_err, Result};
use crate::numerics::{qam_map, ComplexSignal, QamConstellation, C64};

/// Power scaling of the active subcarriers of the index-modulated user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImPowerMode {
    /// Amplitude `sqrt(k p1 / m)`: total power equals that of an OFDM user
    /// with per-subcarrier power `p1` on the same subcarriers.
    #[default]
    TotalMatched,
    /// Amplitude `sqrt(k p1 / (m N))`.
    Literal,
}

/// OFDM with index modulation: `groups` subblocks of `k` subcarriers, `m` of
/// them active, interleaved across the band.
#[derive(Debug, Clone, PartialEq)]
pub struct ImParams {
    k: usize,
    m: usize,
    groups: usize,
    constellation: QamConstellation,
    patterns: Vec<Vec<usize>>,
    pub power_mode: ImPowerMode,
}

/// All `m`-subsets of `0..k` in lexicographic order.
pub fn combinations(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m > k {
        return out;
    }
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..m).rev().find(|&i| cur[i] < k - m + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub(crate) fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl ImParams {
    pub fn new(k: usize, m: usize, groups: usize, qam_order: usize) -> Result<Self> {
        if m == 0 || m >= k {
            return config_err(format!("need 0 < m < k, got m={m}, k={k}"));
        }
        if groups == 0 {
            return config_err("at least one subblock required");
        }
        let constellation = QamConstellation::new(qam_order)?;
        let c = binomial(k, m);
        let q1 = usize::BITS as usize - 1 - c.leading_zeros() as usize;
        let patterns = combinations(k, m).into_iter().take(1 << q1).collect();
        Ok(ImParams {
            k,
            m,
            groups,
            constellation,
            patterns,
            power_mode: ImPowerMode::TotalMatched,
        })
    }

    /// (k, m, M) = (4, 3, QPSK) over the 416 loaded subcarriers of the desk
    /// lattice.
    pub fn desk() -> Self {
        Self::new(4, 3, 104, 4).expect("valid")
    }

    pub fn with_power_mode(mut self, mode: ImPowerMode) -> Self {
        self.power_mode = mode;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn constellation(&self) -> &QamConstellation {
        &self.constellation
    }

    /// Active-position sets, 0-based within a subblock.
    pub fn patterns(&self) -> &[Vec<usize>] {
        &self.patterns
    }

    /// Index bits per subblock, `floor(log2 C(k, m))`.
    pub fn index_bits(&self) -> usize {
        self.patterns.len().trailing_zeros() as usize
    }

    pub fn symbol_bits(&self) -> usize {
        self.m * self.constellation.bits_per_symbol()
    }

    pub fn bits_per_subblock(&self) -> usize {
        self.index_bits() + self.symbol_bits()
    }

    pub fn subcarriers(&self) -> usize {
        self.k * self.groups
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.groups * self.bits_per_subblock()
    }

    /// Allocated-subcarrier index of position `i` of subblock `beta`.
    pub fn subcarrier(&self, beta: usize, i: usize) -> usize {
        i * self.groups + beta
    }

    pub fn subblock_subcarriers(&self, beta: usize) -> Vec<usize> {
        (0..self.k).map(|i| self.subcarrier(beta, i)).collect()
    }

    /// Amplitude applied to active subcarriers for user power `p1`.
    pub fn amplitude(&self, p1: f64, fft_size: usize) -> f64 {
        let base = self.k as f64 * p1 / self.m as f64;
        match self.power_mode {
            ImPowerMode::TotalMatched => base.sqrt(),
            ImPowerMode::Literal => (base / fft_size as f64).sqrt(),
        }
    }

    /// Pattern selected by index bits, most significant bit first.
    pub fn pattern_index(&self, index_bits: &[u8]) -> usize {
        index_bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }

    pub fn pattern_bits(&self, index: usize) -> Vec<u8> {
        let q1 = self.index_bits();
        (0..q1).map(|j| ((index >> (q1 - 1 - j)) & 1) as u8).collect()
    }
}

/// Maps bits to unit-scale subcarrier values (zeros on inactive positions),
/// in allocated-subcarrier order, one OFDM symbol per `bits_per_symbol`
/// chunk. Also returns the pattern index of every subblock.
pub fn im_map(bits: &[u8], im: &ImParams) -> Result<(Vec<C64>, Vec<usize>)> {
    let per_symbol = im.bits_per_symbol();
    if bits.is_empty() || !bits.len().is_multiple_of(per_symbol) {
        return config_err(format!(
            "IM mapper expects a multiple of {per_symbol} bits, got {}",
            bits.len()
        ));
    }
    let q1 = im.index_bits();
    let n = im.subcarriers();
    let mut out = Vec::with_capacity(bits.len() / per_symbol * n);
    let mut patterns = Vec::new();
    for sym_bits in bits.chunks_exact(per_symbol) {
        let mut row = vec![C64::new(0.0, 0.0); n];
        for (beta, block) in sym_bits.chunks_exact(im.bits_per_subblock()).enumerate() {
            let pidx = im.pattern_index(&block[..q1]);
            let symbols = qam_map(&block[q1..], &im.constellation)?;
            for (&pos, s) in im.patterns[pidx].iter().zip(symbols) {
                row[im.subcarrier(beta, pos)] = s;
            }
            patterns.push(pidx);
        }
        out.extend(row);
    }
    Ok((out, patterns))
}

/// Per-subblock minimum-distance detection of unit-scale subcarrier values.
pub fn im_demap(values: &[C64], im: &ImParams) -> Vec<u8> {
    let n = im.subcarriers();
    let q = im.constellation.bits_per_symbol();
    let mut bits = Vec::with_capacity(values.len() / n * im.bits_per_symbol());
    for row in values.chunks_exact(n) {
        for beta in 0..im.groups {
            let y: Vec<C64> = im.subblock_subcarriers(beta).iter().map(|&s| row[s]).collect();
            let mut best = (f64::INFINITY, 0, Vec::new());
            for (pidx, pattern) in im.patterns.iter().enumerate() {
                let mut d: f64 = y.iter().map(|v| v.norm_sqr()).sum();
                let mut labels = Vec::with_capacity(im.m);
                for &pos in pattern {
                    let label = im.constellation.nearest(y[pos]);
                    d += (y[pos] - im.constellation.point(label)).norm_sqr() - y[pos].norm_sqr();
                    labels.push(label);
                }
                if d < best.0 {
                    best = (d, pidx, labels);
                }
            }
            bits.extend(im.pattern_bits(best.1));
            for label in best.2 {
                bits.extend((0..q).map(|i| QamConstellation::bit(label, i)));
            }
        }
    }
    bits
}

/// Index-modulated OFDM at per-subcarrier power `p1`. Returns the waveform and
/// the active allocated-subcarrier indices of every subblock.
pub fn im_modulate(bits: &[u8], im: &ImParams, ofdm: &OfdmParams, p1: f64) -> Result<(ComplexSignal, Vec<Vec<usize>>)> {
    if im.subcarriers() != ofdm.allocated {
        return config_err(format!(
            "IM spans {} subcarriers but OFDM allocates {}",
            im.subcarriers(),
            ofdm.allocated
        ));
    }
    if bits.len() != ofdm.symbols * im.bits_per_symbol() {
        return config_err(format!(
            "expected {} bits for {} symbols, got {}",
            ofdm.symbols * im.bits_per_symbol(),
            ofdm.symbols,
            bits.len()
        ));
    }
    let (values, patterns) = im_map(bits, im)?;
    let amp = im.amplitude(p1, ofdm.fft_size);
    let grid: Vec<C64> = values.iter().map(|v| v * amp).collect();
    let unit_gain = (ofdm.fft_size as f64 / ofdm.allocated as f64).sqrt();
    let signal = modulate_with_gain(&grid, ofdm, unit_gain)?;
    let active = patterns
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let beta = i % im.groups;
            im.patterns[p].iter().map(|&pos| im.subcarrier(beta, pos)).collect()
        })
        .collect();
    Ok((signal, active))
}

/// Hard detection of an [`im_modulate`] waveform through an ideal channel.
pub fn im_demodulate(signal: &ComplexSignal, im: &ImParams, ofdm: &OfdmParams, p1: f64) -> Result<Vec<u8>> {
    let unit_gain = (ofdm.fft_size as f64 / ofdm.allocated as f64).sqrt();
    let amp = im.amplitude(p1, ofdm.fft_size);
    if !(amp > 0.0) {
        return config_err("IM power must be positive to demodulate");
    }
    let values: Vec<C64> = demodulate_with_gain(signal.samples(), ofdm, unit_gain)?
        .into_iter()
        .map(|v| v / amp)
        .collect();
    Ok(im_demap(&values, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;

    #[test]
    fn lexicographic_table_for_4_choose_3() {
        let im = ImParams::new(4, 3, 1, 4).unwrap();
        assert_eq!(
            im.patterns(),
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
        );
        assert_eq!(im.index_bits(), 2);
        assert_eq!(im.pattern_index(&[0, 0]), 0);
        for p in 0..4 {
            assert_eq!(im.pattern_index(&im.pattern_bits(p)), p);
        }
    }

    #[test]
    fn truncation_to_power_of_two() {
        let im = ImParams::new(4, 2, 1, 4).unwrap();
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(im.patterns().len(), 4);
        assert_eq!(im.index_bits(), 2);
        assert_eq!(combinations(5, 2).len(), 10);
    }

    #[test]
    fn equal_rate_with_plain_ofdm() {
        let im = ImParams::desk();
        assert_eq!(im.bits_per_subblock(), 8);
        assert_eq!(im.bits_per_symbol(), 416 * 2);
    }

    #[test]
    fn interleaved_grouping_is_a_bijection() {
        let im = ImParams::desk();
        let mut seen = vec![false; im.subcarriers()];
        for beta in 0..im.groups() {
            for s in im.subblock_subcarriers(beta) {
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(im.subcarrier(3, 2), 2 * 104 + 3);
    }

    #[test]
    fn round_trip_through_ideal_channel() {
        let im = ImParams::desk();
        let ofdm = OfdmParams {
            symbols: 2,
            ..OfdmParams::desk()
        };
        let mut rng = SimRng::new(1);
        for mode in [ImPowerMode::TotalMatched, ImPowerMode::Literal] {
            let im = im.clone().with_power_mode(mode);
            let bits = rng.bits(2 * im.bits_per_symbol());
            let (x, active) = im_modulate(&bits, &im, &ofdm, 0.7).unwrap();
            assert_eq!(active.len(), 2 * im.groups());
            assert_eq!(im_demodulate(&x, &im, &ofdm, 0.7).unwrap(), bits);
        }
    }

    #[test]
    fn total_matched_power_equals_ofdm_user() {
        let im = ImParams::desk();
        let ofdm = OfdmParams::desk();
        let mut rng = SimRng::new(2);
        let p1 = 1.3;
        let (values, _) = im_map(&rng.bits(im.bits_per_symbol()), &im).unwrap();
        let amp = im.amplitude(p1, ofdm.fft_size);
        let total: f64 = values.iter().map(|v| (v * amp).norm_sqr()).sum();
        // QPSK has constant modulus so the match is exact per realisation
        assert!((total - ofdm.allocated as f64 * p1).abs() < 1e-9);
    }

    #[test]
    fn length_errors() {
        let im = ImParams::desk();
        assert!(im_map(&[0; 7], &im).is_err());
        assert!(ImParams::new(4, 4, 1, 4).is_err());
        assert!(ImParams::new(4, 0, 1, 4).is_err());
    }
}
