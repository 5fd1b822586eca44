use std::f64::consts::PI;

use crate::error::{config_err, Result};
use crate::numerics::{ComplexSignal, C64};
use crate::SPEED_OF_LIGHT;

/// One specular reflector: delay, Doppler shift and composite complex gain
/// (attenuation, propagation phase and initial phase folded together).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarTarget {
    pub delay_s: f64,
    pub doppler_hz: f64,
    pub gain: C64,
}

impl RadarTarget {
    /// Target described by monostatic-style range `R = c * delay` and radial
    /// velocity `v = c * doppler / f_c`.
    pub fn from_physical(range_m: f64, velocity_mps: f64, carrier_hz: f64, gain: C64) -> Self {
        RadarTarget {
            delay_s: range_m / SPEED_OF_LIGHT,
            doppler_hz: carrier_hz * velocity_mps / SPEED_OF_LIGHT,
            gain,
        }
    }

    pub fn delay_samples(&self, fs: f64) -> usize {
        (self.delay_s * fs).round() as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadarScene {
    pub targets: Vec<RadarTarget>,
}

/// Sample-domain view of a target: integer delay, Doppler in cycles/sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtvTap {
    pub delay: usize,
    pub doppler: f64,
    pub gain: C64,
}

impl RadarScene {
    pub fn new(targets: Vec<RadarTarget>) -> Self {
        RadarScene { targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Quantises delays to the sample grid.
    pub fn taps(&self, fs: f64) -> Result<Vec<LtvTap>> {
        self.targets
            .iter()
            .enumerate()
            .map(|(p, t)| {
                if !(t.delay_s >= 0.0) {
                    return config_err(format!("target {p} has negative delay {}", t.delay_s));
                }
                Ok(LtvTap {
                    delay: t.delay_samples(fs),
                    doppler: t.doppler_hz / fs,
                    gain: t.gain,
                })
            })
            .collect()
    }

    pub fn max_delay_samples(&self, fs: f64) -> usize {
        self.targets.iter().map(|t| t.delay_samples(fs)).max().unwrap_or(0)
    }

    pub fn total_power(&self) -> f64 {
        self.targets.iter().map(|t| t.gain.norm_sqr()).sum()
    }
}

/// `y[n] = sum_p h_p x[n - d_p] exp(j 2 pi nu_p (origin + n))`, samples before
/// the start of `x` taken as zero.
pub fn apply_taps(taps: &[LtvTap], x: &[C64], origin: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); x.len()];
    for tap in taps {
        if tap.delay >= x.len() {
            continue;
        }
        for n in tap.delay..x.len() {
            let cycles = (tap.doppler * (origin + n) as f64).rem_euclid(1.0);
            let rot = if tap.doppler == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                C64::from_polar(1.0, 2.0 * PI * cycles)
            };
            y[n] += tap.gain * x[n - tap.delay] * rot;
        }
    }
    y
}

/// Passes a signal through the delay/Doppler multipath of `scene`.
pub fn apply_ltv(scene: &RadarScene, x: &ComplexSignal, fs: f64) -> Result<ComplexSignal> {
    let taps = scene.taps(fs)?;
    if let Some((p, t)) = taps
        .iter()
        .enumerate()
        .find(|(_, t)| t.delay >= x.len() && !x.is_empty())
    {
        return config_err(format!(
            "target {p} delay of {} samples exceeds signal length {}",
            t.delay,
            x.len()
        ));
    }
    ComplexSignal::new(apply_taps(&taps, x.samples(), 0), x.sample_rate())
}
