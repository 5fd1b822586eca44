//! Exhaustive-enumeration detectors. Far slower than the factored ones in
//! [`detect`](super::detect); they exist to check them hypothesis by
//! hypothesis.

use super::detect::{metric, NOISE_FLOOR};
use crate::fec::LLR_CLIP;
use crate::numerics::{QamConstellation, C64};
use crate::waveforms::ImParams;

fn llr_from_minima(min1: f64, min0: f64) -> f64 {
    let d = min1 - min0;
    if d.is_nan() {
        0.0
    } else {
        d.clamp(-LLR_CLIP, LLR_CLIP)
    }
}

/// One subcarrier of a QAM target against every `(target, interferer)` pair.
pub fn symbol_llrs_exhaustive(
    r: C64,
    h: C64,
    noise: f64,
    target: &QamConstellation,
    a_t: f64,
    interferer: &[C64],
    a_i: f64,
) -> Vec<f64> {
    let q = target.bits_per_symbol();
    let nv = noise.max(NOISE_FLOOR);
    let mut min0 = vec![f64::INFINITY; q];
    let mut min1 = vec![f64::INFINITY; q];
    for (label, &u) in target.points().iter().enumerate() {
        for &w in interferer {
            let d = metric(r, h, u, a_t, w, a_i, nv);
            for i in 0..q {
                let slot = if QamConstellation::bit(label, i) == 0 {
                    &mut min0[i]
                } else {
                    &mut min1[i]
                };
                if d < *slot {
                    *slot = d;
                }
            }
        }
    }
    min1.iter().zip(&min0).map(|(&a, &b)| llr_from_minima(a, b)).collect()
}

/// One IM subblock (`k` received values) against every
/// `(pattern, m target symbols, k interferer symbols)` hypothesis.
pub fn im_llrs_exhaustive(
    r: &[C64],
    h: &[C64],
    noise: f64,
    im: &ImParams,
    a_t: f64,
    interferer: &[C64],
    a_i: f64,
) -> Vec<f64> {
    let k = im.k();
    let c = im.constellation();
    let order = c.order();
    let q = c.bits_per_symbol();
    let nbits = im.bits_per_subblock();
    let nv = noise.max(NOISE_FLOOR);
    let zero = C64::new(0.0, 0.0);
    let mut min0 = vec![f64::INFINITY; nbits];
    let mut min1 = vec![f64::INFINITY; nbits];
    let interferer_tuples = interferer.len().pow(k as u32);
    for (pidx, pattern) in im.patterns().iter().enumerate() {
        let index_bits = im.pattern_bits(pidx);
        for t in 0..order.pow(im.m() as u32) {
            let labels: Vec<usize> = (0..im.m()).map(|j| (t / order.pow(j as u32)) % order).collect();
            let mut u = vec![zero; k];
            for (j, &pos) in pattern.iter().enumerate() {
                u[pos] = c.point(labels[j]);
            }
            let mut bits = index_bits.clone();
            for &l in &labels {
                bits.extend((0..q).map(|i| QamConstellation::bit(l, i)));
            }
            for w in 0..interferer_tuples {
                let mut total = 0.0;
                for i in 0..k {
                    let wi = interferer[(w / interferer.len().pow(i as u32)) % interferer.len()];
                    total += metric(r[i], h[i], u[i], a_t, wi, a_i, nv);
                }
                for (b, &bit) in bits.iter().enumerate() {
                    let slot = if bit == 0 { &mut min0[b] } else { &mut min1[b] };
                    if total < *slot {
                        *slot = total;
                    }
                }
            }
        }
    }
    min1.iter().zip(&min0).map(|(&a, &b)| llr_from_minima(a, b)).collect()
}
