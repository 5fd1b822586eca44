//! Achievable-rate expressions for both superposition schemes.

use serde::Serialize;

use super::config::{NomaConfig, Scheme};
use crate::error::{config_err, Result};
use crate::numerics::C64;
use crate::waveforms::ImParams;

/// Largest `C(k,m) * M^m` accepted by [`im_rate_bound`]; the bound costs the
/// square of this many determinant evaluations.
pub const IM_RATE_GUARD: usize = 100_000;

/// Rates in bits/s/Hz summed over the subcarriers considered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub r1: f64,
    pub r2: f64,
    pub subcarriers: usize,
    pub scheme: Scheme,
    pub note: &'static str,
}

impl RateReport {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

fn check_noise(cfg: &NomaConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.noise_var <= 0.0 {
        return config_err("rates need a positive noise variance");
    }
    Ok(())
}

/// Power-domain NOMA with two OFDM users: user 1 decoded treating user 2 as
/// noise, user 2 after perfect cancellation.
pub fn rate_ofdm_noma(cfg: &NomaConfig, h1: &[C64], h2: &[C64]) -> Result<RateReport> {
    check_noise(cfg)?;
    if h1.len() != h2.len() {
        return config_err("both users need a gain for every subcarrier");
    }
    let s2 = cfg.noise_var;
    let r1 = h1
        .iter()
        .map(|h| {
            let g = h.norm_sqr();
            (1.0 + cfg.p1 * g / (s2 + cfg.p2 * g)).log2()
        })
        .sum();
    let r2 = h2.iter().map(|h| (1.0 + cfg.p2 * h.norm_sqr() / s2).log2()).sum();
    Ok(RateReport {
        r1,
        r2,
        subcarriers: h1.len(),
        scheme: Scheme::OfdmOfdm,
        note: "user 1 first, perfect cancellation for user 2",
    })
}

/// IM user 1 plus OFDM user 2.
///
/// `r2` is the OFDM user's rate after removing its own signal: subcarriers
/// carrying an IM symbol see it as interference. With `active` given, that
/// mask decides per subcarrier; otherwise each subcarrier is active with
/// probability `m/k` and the two terms are averaged. `r1` is the per
/// subcarrier IM lower bound from [`im_rate_bound`] times the subcarrier count.
pub fn rate_im_noma(cfg: &NomaConfig, h2: &[C64], active: Option<&[bool]>) -> Result<RateReport> {
    check_noise(cfg)?;
    if let Some(mask) = active {
        if mask.len() != h2.len() {
            return config_err("activation mask and channel differ in length");
        }
    }
    let im = &cfg.im;
    let a1 = cfg.amplitudes().0;
    let frac = im.m() as f64 / im.k() as f64;
    let s2 = cfg.noise_var;
    let mut r2 = 0.0;
    for (n, h) in h2.iter().enumerate() {
        let g = h.norm_sqr();
        let idle = (1.0 + cfg.p2 * g / s2).log2();
        let busy = (1.0 + cfg.p2 * g / (s2 + a1 * a1 * g)).log2();
        r2 += match active {
            Some(mask) if mask[n] => busy,
            Some(_) => idle,
            None => frac * busy + (1.0 - frac) * idle,
        };
    }
    let r1 = im_rate_bound(im, cfg.p1, s2)? * h2.len() as f64;
    Ok(RateReport {
        r1,
        r2,
        subcarriers: h2.len(),
        scheme: Scheme::ImOfdm,
        note: "IM user bound after perfect OFDM removal, no fading in the bound",
    })
}

/// Per-subcarrier lower bound on the IM user's rate, in bits/s/Hz.
///
/// Runs over every pair of (pattern, symbol tuple) hypotheses; the guard
/// [`IM_RATE_GUARD`] limits the hypothesis count.
pub fn im_rate_bound(im: &ImParams, p1: f64, noise_var: f64) -> Result<f64> {
    if !(p1 >= 0.0) || !(noise_var > 0.0) {
        return config_err("IM rate bound needs p1 >= 0 and positive noise");
    }
    let (k, m) = (im.k(), im.m());
    let c = im.constellation();
    let order = c.order();
    let patterns = im.patterns();
    let tuples = order
        .checked_pow(m as u32)
        .filter(|t| t.saturating_mul(patterns.len()) <= IM_RATE_GUARD);
    let Some(tuples) = tuples else {
        return config_err(format!(
            "IM rate bound over C({k},{m}) patterns and {order}-ary symbols exceeds {IM_RATE_GUARD} hypotheses"
        ));
    };
    let scale = p1 * k as f64 / (2.0 * noise_var * m as f64);
    let zero = C64::new(0.0, 0.0);
    // subcarrier values of every hypothesis, zero where inactive
    let hyps: Vec<Vec<C64>> = patterns
        .iter()
        .flat_map(|pattern| {
            (0..tuples).map(move |t| {
                let mut v = vec![zero; k];
                for (slot, &pos) in pattern.iter().enumerate() {
                    v[pos] = c.point((t / order.pow(slot as u32)) % order);
                }
                v
            })
        })
        .collect();
    let total = hyps.len() as f64;
    let mut acc = 0.0;
    for x in &hyps {
        let inner: f64 = hyps
            .iter()
            .map(|y| {
                let det: f64 = x.iter().zip(y).map(|(a, b)| 1.0 + scale * (a - b).norm_sqr()).product();
                1.0 / det
            })
            .sum();
        acc += inner.log2();
    }
    let ceiling = (m as f64 * (order as f64).log2() + (patterns.len() as f64).log2()) / k as f64;
    Ok((ceiling - acc / (total * k as f64)).max(0.0))
}
