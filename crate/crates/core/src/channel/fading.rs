use crate::error::{config_err, Result};
use crate::numerics::{fft_in_place, Normalization, SimRng, C64};

/// Block-fading tapped delay line for one downlink user.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingChannel {
    pub taps: Vec<C64>,
    pub pdp_decay: f64,
    pub user_id: usize,
}

/// Mean tap powers `eta * exp(-gamma * l)` normalised to sum to one.
pub fn exponential_pdp(taps: usize, decay: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..taps).map(|l| (-decay * l as f64).exp()).collect();
    let eta = 1.0 / raw.iter().sum::<f64>();
    raw.into_iter().map(|p| p * eta).collect()
}

/// Draws `taps` independent CN(0, pdp_l) gains.
pub fn draw_fading(taps: usize, decay: f64, rng: &mut SimRng) -> Result<FadingChannel> {
    if taps == 0 {
        return config_err("fading channel needs at least one tap");
    }
    let taps = exponential_pdp(taps, decay)
        .into_iter()
        .map(|p| rng.complex_gaussian(p))
        .collect();
    Ok(FadingChannel {
        taps,
        pdp_decay: decay,
        user_id: 0,
    })
}

/// N-point (non-unitary) DFT of the zero-padded taps: the per-subcarrier gain
/// seen after CP removal.
pub fn channel_frequency_response(ch: &FadingChannel, fft_size: usize) -> Result<Vec<C64>> {
    if ch.taps.len() > fft_size {
        return config_err(format!(
            "{} taps do not fit in an FFT of size {fft_size}",
            ch.taps.len()
        ));
    }
    let mut buf = vec![C64::new(0.0, 0.0); fft_size];
    buf[..ch.taps.len()].copy_from_slice(&ch.taps);
    fft_in_place(&mut buf, false, Normalization::None);
    Ok(buf)
}

impl FadingChannel {
    pub fn with_user(mut self, user_id: usize) -> Self {
        self.user_id = user_id;
        self
    }

    /// Linear convolution truncated to the input length.
    pub fn filter(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        for (n, out) in y.iter_mut().enumerate() {
            for (l, h) in self.taps.iter().enumerate().take(n + 1) {
                *out += h * x[n - l];
            }
        }
        y
    }
}
