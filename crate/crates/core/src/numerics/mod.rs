//! Complex sample containers, unitary DFTs, seeded randomness and QAM.

mod qam;
mod rng;

use std::cell::RefCell;

pub use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

pub use qam::{qam_demap, qam_map, QamConstellation};
pub use rng::SimRng;

use crate::error::{config_err, Result};

/// Time-domain complex baseband samples tagged with their sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<C64>,
    sample_rate: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<C64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return config_err(format!("sample rate must be positive, got {sample_rate}"));
        }
        Ok(ComplexSignal { samples, sample_rate })
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); len], sample_rate)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.energy() / self.samples.len() as f64
        }
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }
}

pub fn energy(x: &[C64]) -> f64 {
    x.iter().map(|s| s.norm_sqr()).sum()
}

/// Scaling applied by [`fft_in_place`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// 1/sqrt(N) in both directions.
    Unitary,
    /// No scaling (textbook DFT sum).
    None,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place DFT of `buf` using a per-thread cached plan.
pub fn fft_in_place(buf: &mut [C64], inverse: bool, norm: Normalization) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    plan.process(buf);
    if norm == Normalization::Unitary {
        let s = 1.0 / (n as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

/// Unitary DFT of a signal; `inverse` selects the direction.
pub fn dft(signal: &ComplexSignal, size: usize, inverse: bool) -> Result<ComplexSignal> {
    if size == 0 {
        return config_err("DFT size must be at least 1");
    }
    if signal.len() != size {
        return config_err(format!("DFT size {size} does not match signal length {}", signal.len()));
    }
    let mut out = signal.samples.clone();
    fft_in_place(&mut out, inverse, Normalization::Unitary);
    ComplexSignal::new(out, signal.sample_rate)
}

/// Adds circularly-symmetric complex Gaussian noise with per-sample variance
/// `noise_var` (half per real dimension).
pub fn awgn(signal: &ComplexSignal, noise_var: f64, rng: &mut SimRng) -> Result<ComplexSignal> {
    if !(noise_var >= 0.0) {
        return config_err(format!("noise variance must be non-negative, got {noise_var}"));
    }
    let mut out = signal.clone();
    add_awgn(&mut out.samples, noise_var, rng);
    Ok(out)
}

pub fn add_awgn(x: &mut [C64], noise_var: f64, rng: &mut SimRng) {
    if noise_var == 0.0 {
        return;
    }
    for v in x.iter_mut() {
        *v += rng.complex_gaussian(noise_var);
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
