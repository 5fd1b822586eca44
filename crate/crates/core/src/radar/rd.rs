//! Stretch processing, range-Doppler periodogram and peak picking.

use serde::Serialize;

use super::RadarGeometry;
use crate::error::{config_err, Result};
use crate::numerics::{fft_in_place, Normalization, C64};
use crate::SPEED_OF_LIGHT;

/// Dechirped samples, one row per chirp (slow time) and one column per
/// fast-time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CpiMatrix {
    chirps: usize,
    chirp_len: usize,
    data: Vec<C64>,
}

impl CpiMatrix {
    pub fn new(chirps: usize, chirp_len: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != chirps * chirp_len {
            return config_err(format!(
                "{} samples do not form a {chirps} x {chirp_len} matrix",
                data.len()
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(crate::Error::Numerical("non-finite CPI entry".into()));
        }
        Ok(CpiMatrix {
            chirps,
            chirp_len,
            data,
        })
    }

    pub fn chirps(&self) -> usize {
        self.chirps
    }

    pub fn chirp_len(&self) -> usize {
        self.chirp_len
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.data[k * self.chirp_len + l]
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.data[k * self.chirp_len..(k + 1) * self.chirp_len]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn energy(&self) -> f64 {
        crate::numerics::energy(&self.data)
    }
}

/// Multiplies each chirp interval by the conjugate reference chirp and
/// stacks the intervals as rows.
pub fn dechirp(y: &[C64], reference: &[C64], chirps: usize) -> Result<CpiMatrix> {
    let nc = reference.len();
    if y.len() < chirps * nc {
        return config_err(format!("{} samples cannot fill {chirps} chirps of {nc}", y.len()));
    }
    let data = y[..chirps * nc]
        .chunks_exact(nc)
        .flat_map(|chunk| chunk.iter().zip(reference).map(|(a, r)| a * r.conj()))
        .collect();
    CpiMatrix::new(chirps, nc, data)
}

/// `P(m, n)`: rows are Doppler bins `m` (slow-time DFT), columns are raw
/// fast-time DFT bins `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    chirps: usize,
    chirp_len: usize,
    power: Vec<f64>,
    geometry: RadarGeometry,
}

/// Squared magnitude of the non-unitary 2D DFT, slow time first, scaled by
/// `1 / (K N_c)`.
pub fn periodogram(cpi: &CpiMatrix, geometry: RadarGeometry) -> RangeDopplerMap {
    let (k, nc) = (cpi.chirps, cpi.chirp_len);
    let mut buf = cpi.data.clone();
    let mut col = vec![C64::new(0.0, 0.0); k];
    for l in 0..nc {
        for (i, c) in col.iter_mut().enumerate() {
            *c = buf[i * nc + l];
        }
        fft_in_place(&mut col, false, Normalization::None);
        for (i, c) in col.iter().enumerate() {
            buf[i * nc + l] = *c;
        }
    }
    for row in buf.chunks_exact_mut(nc) {
        fft_in_place(row, false, Normalization::None);
    }
    let scale = 1.0 / (k * nc) as f64;
    RangeDopplerMap {
        chirps: k,
        chirp_len: nc,
        power: buf.iter().map(|v| v.norm_sqr() * scale).collect(),
        geometry,
    }
}

impl RangeDopplerMap {
    pub fn doppler_bins(&self) -> usize {
        self.chirps
    }

    pub fn range_bins(&self) -> usize {
        self.chirp_len
    }

    pub fn geometry(&self) -> &RadarGeometry {
        &self.geometry
    }

    /// Power at Doppler bin `m` and raw fast-time bin `n`.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.power[m * self.chirp_len + n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.power
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn median(&self) -> f64 {
        let mut v = self.power.clone();
        let mid = v.len() / 2;
        let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
        *m
    }

    /// Signed Doppler bin of row `m`.
    pub fn signed_doppler(&self, m: usize) -> i64 {
        let k = self.chirps as i64;
        let m = m as i64;
        if m < (k + 1) / 2 {
            m
        } else {
            m - k
        }
    }

    /// Range bin of raw fast-time bin `n`: the dechirped beat tone of a
    /// delayed return sits at a negative frequency.
    pub fn range_bin(&self, n: usize) -> usize {
        (self.chirp_len - n) % self.chirp_len
    }

    /// Raw column holding `range_bin`.
    pub fn column_of_range(&self, range_bin: usize) -> usize {
        (self.chirp_len - range_bin % self.chirp_len) % self.chirp_len
    }

    /// Row holding a signed Doppler bin.
    pub fn row_of_doppler(&self, doppler_bin: i64) -> usize {
        doppler_bin.rem_euclid(self.chirps as i64) as usize
    }

    /// Threshold over the median that a map of independent exponential cells
    /// exceeds anywhere with probability `pfa`.
    pub fn noise_threshold_db(&self, pfa: f64) -> f64 {
        let cells = self.power.len() as f64;
        // P(cell > t * median) = 2^-t for exponential cells
        let per_cell = 1.0 - (1.0 - pfa).powf(1.0 / cells);
        let t = -per_cell.log2();
        10.0 * t.log10()
    }
}

/// One detected reflector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetEstimate {
    pub range_bin: usize,
    pub doppler_bin: i64,
    /// Seconds, `range_bin / bandwidth`.
    pub delay: f64,
    /// Hz.
    pub doppler: f64,
    pub gain: C64,
    pub peak_power: f64,
}

impl TargetEstimate {
    pub fn delay_samples(&self, fs: f64) -> usize {
        (self.delay * fs).round() as usize
    }
}

/// Default detection floor above the map median.
pub const DEFAULT_THRESHOLD_DB: f64 = 12.0;

/// Greedy peak picking: take the global maximum, blank a +/-1 bin window
/// around it (circularly), repeat. Cells that are not local maxima of the map
/// over their 3x3 neighbourhood are skipped, which keeps the skirts of strong
/// returns from registering as targets. Stops after `max_targets` peaks or when the
/// next peak is below `median * 10^(threshold_db / 10)`.
pub fn extract_targets(map: &RangeDopplerMap, max_targets: Option<usize>, threshold_db: f64) -> Vec<TargetEstimate> {
    let floor = map.median() * 10f64.powf(threshold_db / 10.0);
    let (k, nc) = (map.chirps, map.chirp_len);
    let mut blanked = vec![false; map.power.len()];
    let limit = max_targets.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    while out.len() < limit {
        let best = map
            .power
            .iter()
            .enumerate()
            .filter(|(i, _)| !blanked[*i])
            .max_by(|a, b| a.1.total_cmp(b.1));
        let Some((idx, &peak)) = best else { break };
        if peak < floor || peak <= 0.0 {
            break;
        }
        let (m, n) = (idx / nc, idx % nc);
        let is_local_max = [k - 1, 0, 1].iter().all(|&dm| {
            [nc - 1, 0, 1]
                .iter()
                .all(|&dn| map.power[((m + dm) % k) * nc + (n + dn) % nc] <= peak)
        });
        if !is_local_max {
            blanked[idx] = true;
            continue;
        }
        for dm in [k - 1, 0, 1] {
            for dn in [nc - 1, 0, 1] {
                blanked[((m + dm) % k) * nc + (n + dn) % nc] = true;
            }
        }
        let range_bin = map.range_bin(n);
        let doppler_bin = map.signed_doppler(m);
        out.push(TargetEstimate {
            range_bin,
            doppler_bin,
            delay: range_bin as f64 * map.geometry.delay_per_range_bin(),
            doppler: doppler_bin as f64 * map.geometry.doppler_per_bin(),
            gain: C64::new(0.0, 0.0),
            peak_power: peak,
        });
    }
    if let Some(want) = max_targets {
        if out.len() < want {
            log::debug!("found {} of {want} requested peaks above the floor", out.len());
        }
    }
    out
}

/// `(range m, velocity m/s)` with `range = c * delay` and
/// `velocity = c * doppler / f_c`.
pub fn delay_doppler_to_physical(est: &TargetEstimate, carrier_hz: f64) -> Result<(f64, f64)> {
    if !(carrier_hz > 0.0) {
        return config_err("carrier frequency must be positive");
    }
    Ok((SPEED_OF_LIGHT * est.delay, SPEED_OF_LIGHT * est.doppler / carrier_hz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;
    use std::f64::consts::PI;

    fn geom(k: usize, nc: usize) -> RadarGeometry {
        RadarGeometry {
            sample_rate: nc as f64,
            bandwidth: nc as f64,
            chirp_len: nc,
            chirps: k,
        }
    }

    fn tone(k: usize, nc: usize, m: usize, n: usize) -> CpiMatrix {
        let data = (0..k * nc)
            .map(|i| {
                let (a, b) = (i / nc, i % nc);
                C64::from_polar(1.0, 2.0 * PI * ((m * a) as f64 / k as f64 + (n * b) as f64 / nc as f64))
            })
            .collect();
        CpiMatrix::new(k, nc, data).unwrap()
    }

    #[test]
    fn all_ones_peak() {
        let cpi = CpiMatrix::new(8, 8, vec![C64::new(1.0, 0.0); 64]).unwrap();
        let map = periodogram(&cpi, geom(8, 8));
        assert!((map.get(0, 0) - 64.0).abs() < 1e-12);
        assert!(map.as_slice()[1..].iter().all(|&p| p < 1e-20));
    }

    #[test]
    fn on_grid_tone_and_parseval() {
        let cpi = tone(16, 12, 5, 7);
        let map = periodogram(&cpi, geom(16, 12));
        for m in 0..16 {
            for n in 0..12 {
                let p = map.get(m, n);
                if (m, n) == (5, 7) {
                    assert!((p - 192.0).abs() < 1e-9);
                } else {
                    assert!(p < 1e-18, "{m} {n} {p}");
                }
            }
        }
        let mut rng = SimRng::new(1);
        let noise = CpiMatrix::new(16, 12, (0..192).map(|_| rng.complex_gaussian(1.0)).collect()).unwrap();
        let map = periodogram(&noise, geom(16, 12));
        assert!((map.total() - noise.energy()).abs() < 1e-6 * noise.energy());
    }

    #[test]
    fn orthogonal_superposition() {
        let (x, y) = (tone(8, 8, 1, 2), tone(8, 8, 6, 3));
        let sum = CpiMatrix::new(
            8,
            8,
            x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let (px, py, ps) = (
            periodogram(&x, geom(8, 8)),
            periodogram(&y, geom(8, 8)),
            periodogram(&sum, geom(8, 8)),
        );
        assert!((ps.get(1, 2) - px.get(1, 2) - py.get(1, 2)).abs() < 1e-9);
        assert!((ps.get(6, 3) - px.get(6, 3) - py.get(6, 3)).abs() < 1e-9);
    }

    #[test]
    fn dechirp_of_clean_chirp_is_dc() {
        let reference: Vec<C64> = (0..16)
            .map(|n| C64::from_polar(1.0, PI * 0.5 * (n * n) as f64 / 16.0))
            .collect();
        let y: Vec<C64> = reference.iter().cycle().take(64).copied().collect();
        let cpi = dechirp(&y, &reference, 4).unwrap();
        assert!(cpi.as_slice().iter().all(|v| (v - 1.0).norm() < 1e-12));
        assert!(dechirp(&y[..60], &reference, 4).is_err());
        let zero = dechirp(&[C64::new(0.0, 0.0); 64], &reference, 4).unwrap();
        assert_eq!(zero.energy(), 0.0);
    }

    #[test]
    fn greedy_extraction_with_guard() {
        let mut power = vec![0.01; 64];
        power[9] = 100.0; // (1, 1)
        power[10] = 90.0; // inside the guard of (1, 1)
        power[5 * 8 + 5] = 50.0;
        let map = RangeDopplerMap {
            chirps: 8,
            chirp_len: 8,
            power,
            geometry: geom(8, 8),
        };
        let t = extract_targets(&map, Some(3), DEFAULT_THRESHOLD_DB);
        assert_eq!(t.len(), 2);
        // a shoulder two bins out of a peak is not a local maximum
        let mut shoulder = map.clone();
        shoulder.power[11] = 85.0;
        shoulder.power[12] = 80.0;
        let s = extract_targets(&shoulder, None, DEFAULT_THRESHOLD_DB);
        assert_eq!(s.len(), 2);
        assert_eq!((t[0].doppler_bin, t[0].range_bin), (1, 7));
        assert_eq!((t[1].doppler_bin, t[1].range_bin), (-3, 3));
        let one = extract_targets(&map, Some(1), DEFAULT_THRESHOLD_DB);
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn bin_bookkeeping() {
        let map = periodogram(&tone(8, 6, 0, 0), geom(8, 6));
        for r in 0..6 {
            assert_eq!(map.range_bin(map.column_of_range(r)), r);
        }
        for d in -4..4 {
            assert_eq!(map.signed_doppler(map.row_of_doppler(d)), d);
        }
    }

    #[test]
    fn physical_conversion() {
        let mut est = TargetEstimate {
            range_bin: 1,
            doppler_bin: 0,
            delay: 1.0 / 100e6,
            doppler: 0.0,
            gain: C64::new(1.0, 0.0),
            peak_power: 1.0,
        };
        let (r, v) = delay_doppler_to_physical(&est, 28e9).unwrap();
        assert!((r - 2.998).abs() < 1e-3);
        assert_eq!(v, 0.0);
        est.doppler = 933.33;
        let (_, v) = delay_doppler_to_physical(&est, 28e9).unwrap();
        assert!((v - 10.0).abs() < 1e-2, "{v}");
        assert!(delay_doppler_to_physical(&est, 0.0).is_err());
    }
}
