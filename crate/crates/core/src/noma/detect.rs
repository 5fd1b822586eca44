//! Max-log LLR detection of superimposed users.
//!
//! Every metric is `|r - h (a_t u + a_i w)|^2 / noise` with `u` the target
//! user's symbol, `w` the interferer's symbol and `(a_t, a_i)` their
//! amplitudes. LLRs are `min over bit = 1` minus `min over bit = 0`, clipped
//! to [`LLR_CLIP`], so a positive value favours bit 0.

use super::config::{NomaConfig, Scheme, User};
use crate::error::{config_err, Result};
use crate::fec::LLR_CLIP;
use crate::numerics::{QamConstellation, C64};
use crate::waveforms::ImParams;

/// Noise variance floor so noiseless inputs give large but finite metrics.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Per-coded-bit LLRs of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub user: User,
    pub llrs: Vec<f64>,
}

#[inline]
pub(crate) fn metric(r: C64, h: C64, u: C64, a_t: f64, w: C64, a_i: f64, noise: f64) -> f64 {
    (r - h * (u * a_t + w * a_i)).norm_sqr() / noise
}

#[inline]
fn clip(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(-LLR_CLIP, LLR_CLIP)
    }
}

/// The interferer alphabet `{0} u S`.
pub fn augmented_alphabet(c: &QamConstellation) -> Vec<C64> {
    std::iter::once(C64::new(0.0, 0.0))
        .chain(c.points().iter().copied())
        .collect()
}

/// Symbol-wise max-log LLRs of a QAM target user, one symbol per subcarrier,
/// minimising over `interferer` points at amplitude `a_i`.
pub fn symbol_llrs(
    r: &[C64],
    h: &[C64],
    noise: &[f64],
    target: &QamConstellation,
    a_t: f64,
    interferer: &[C64],
    a_i: f64,
) -> Vec<f64> {
    let q = target.bits_per_symbol();
    let mut out = Vec::with_capacity(r.len() * q);
    let mut d = vec![0.0; target.order()];
    for n in 0..r.len() {
        let nv = noise[n].max(NOISE_FLOOR);
        for (label, &u) in target.points().iter().enumerate() {
            d[label] = interferer
                .iter()
                .map(|&w| metric(r[n], h[n], u, a_t, w, a_i, nv))
                .fold(f64::INFINITY, f64::min);
        }
        for i in 0..q {
            let mut m0 = f64::INFINITY;
            let mut m1 = f64::INFINITY;
            for (label, &v) in d.iter().enumerate() {
                if QamConstellation::bit(label, i) == 0 {
                    m0 = m0.min(v);
                } else {
                    m1 = m1.min(v);
                }
            }
            out.push(clip(m1 - m0));
        }
    }
    out
}

/// Max-log LLRs of the index-modulated user over every subblock, in the bit
/// order of [`im_map`](crate::waveforms::im_map): index bits then symbol bits
/// per subblock. `r`, `h`, `noise` are indexed by allocated subcarrier.
///
/// Hypotheses are (pattern, m symbols) pairs; the interferer is minimised
/// position by position, which attains the same minimum as enumerating all
/// interferer tuples.
pub fn im_llrs(r: &[C64], h: &[C64], noise: &[f64], im: &ImParams, a_t: f64, interferer: &[C64], a_i: f64) -> Vec<f64> {
    let k = im.k();
    let m = im.m();
    let c = im.constellation();
    let order = c.order();
    let q = c.bits_per_symbol();
    let q1 = im.index_bits();
    let nbits = im.bits_per_subblock();
    let tuples = order.pow(m as u32);
    let mut out = Vec::with_capacity(im.groups() * nbits);
    // table[i][0] = inactive, table[i][1 + label] = active with that label
    let mut table = vec![0.0; k * (order + 1)];
    let zero = C64::new(0.0, 0.0);
    let mut min0 = vec![0.0; nbits];
    let mut min1 = vec![0.0; nbits];
    for beta in 0..im.groups() {
        for i in 0..k {
            let s = im.subcarrier(beta, i);
            let nv = noise[s].max(NOISE_FLOOR);
            for v in 0..=order {
                let u = if v == 0 { zero } else { c.point(v - 1) };
                table[i * (order + 1) + v] = interferer
                    .iter()
                    .map(|&w| metric(r[s], h[s], u, a_t, w, a_i, nv))
                    .fold(f64::INFINITY, f64::min);
            }
        }
        min0.iter_mut().for_each(|x| *x = f64::INFINITY);
        min1.iter_mut().for_each(|x| *x = f64::INFINITY);
        let mut slot_of = vec![usize::MAX; k];
        for (pidx, pattern) in im.patterns().iter().enumerate() {
            slot_of.iter_mut().for_each(|x| *x = usize::MAX);
            for (j, &pos) in pattern.iter().enumerate() {
                slot_of[pos] = j;
            }
            for t in 0..tuples {
                // label of slot j is digit j of t in base `order`
                let mut total = 0.0;
                for (i, &slot) in slot_of.iter().enumerate() {
                    let v = if slot == usize::MAX {
                        0
                    } else {
                        1 + (t / order.pow(slot as u32)) % order
                    };
                    total += table[i * (order + 1) + v];
                }
                for b in 0..nbits {
                    let bit = if b < q1 {
                        (pidx >> (q1 - 1 - b)) & 1
                    } else {
                        let j = (b - q1) / q;
                        let label = (t / order.pow(j as u32)) % order;
                        (label >> ((b - q1) % q)) & 1
                    };
                    if bit == 0 {
                        if total < min0[b] {
                            min0[b] = total;
                        }
                    } else if total < min1[b] {
                        min1[b] = total;
                    }
                }
            }
        }
        out.extend(min1.iter().zip(&min0).map(|(a, b)| clip(a - b)));
    }
    out
}

fn check_lengths(r: &[C64], h: &[C64]) -> Result<()> {
    if r.len() != h.len() {
        return config_err(format!("{} received samples but {} channel gains", r.len(), h.len()));
    }
    Ok(())
}

/// Conventional power-domain NOMA: LLRs of `target`'s QPSK/QAM bits with the
/// other user's symbols as interference drawn from the same alphabet.
pub fn llr_ofdm_ofdm(r: &[C64], h: &[C64], cfg: &NomaConfig, target: User) -> Result<LlrFrame> {
    check_lengths(r, h)?;
    let c = cfg.im.constellation();
    let (a1, a2) = (cfg.p1.sqrt(), cfg.p2.sqrt());
    let (a_t, a_i) = match target {
        User::One => (a1, a2),
        User::Two => (a2, a1),
    };
    let noise = vec![cfg.noise_var; r.len()];
    Ok(LlrFrame {
        user: target,
        llrs: symbol_llrs(r, h, &noise, c, a_t, c.points(), a_i),
    })
}

/// OFDM-IM decoded first: LLRs of user 1's bits for every subblock, with
/// user 2's OFDM symbols as interference.
pub fn llr_im_first(r: &[C64], h: &[C64], cfg: &NomaConfig) -> Result<LlrFrame> {
    check_lengths(r, h)?;
    if r.len() != cfg.im.subcarriers() {
        return config_err(format!(
            "expected {} subcarriers, got {}",
            cfg.im.subcarriers(),
            r.len()
        ));
    }
    let (a1, a2) = im_amplitudes(cfg)?;
    let noise = vec![cfg.noise_var; r.len()];
    Ok(LlrFrame {
        user: User::One,
        llrs: im_llrs(r, h, &noise, &cfg.im, a1, cfg.im.constellation().points(), a2),
    })
}

/// OFDM decoded first: LLRs of user 2's bits with the IM user's subcarrier
/// values (zero or a QAM point) as interference.
pub fn llr_ofdm_first(r: &[C64], h: &[C64], cfg: &NomaConfig) -> Result<LlrFrame> {
    check_lengths(r, h)?;
    let (a1, a2) = im_amplitudes(cfg)?;
    let c = cfg.im.constellation();
    let noise = vec![cfg.noise_var; r.len()];
    Ok(LlrFrame {
        user: User::Two,
        llrs: symbol_llrs(r, h, &noise, c, a2, &augmented_alphabet(c), a1),
    })
}

fn im_amplitudes(cfg: &NomaConfig) -> Result<(f64, f64)> {
    if cfg.scheme != Scheme::ImOfdm {
        return config_err("index-modulation detection needs the OFDM-IM scheme");
    }
    Ok(cfg.amplitudes())
}
