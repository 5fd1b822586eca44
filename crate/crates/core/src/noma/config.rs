use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::waveforms::ImParams;

/// Which waveform each user transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Both users on plain OFDM.
    OfdmOfdm,
    /// User 1 on OFDM-IM, user 2 on OFDM.
    ImOfdm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeOrder {
    #[serde(alias = "u1")]
    User1First,
    #[serde(alias = "u2")]
    User2First,
    #[default]
    Auto,
}

/// How the first-decoded user's signal is rebuilt before cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reconstruction {
    /// Posterior symbol means from decoder APP LLRs.
    #[default]
    Soft,
    /// Hard decisions of the decoder, remapped.
    Hard,
    /// The transmitted symbols themselves (upper-bound diagnostic).
    Genie,
}

/// User index, 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }
}

/// Downlink two-user superposition setup.
#[derive(Debug, Clone, PartialEq)]
pub struct NomaConfig {
    /// Per-subcarrier power of user 1.
    pub p1: f64,
    /// Per-subcarrier power of user 2.
    pub p2: f64,
    pub noise_var: f64,
    pub scheme: Scheme,
    pub decode_order: DecodeOrder,
    pub reconstruction: Reconstruction,
    /// Index-modulation layout of user 1 (ignored for OFDM+OFDM).
    pub im: ImParams,
    /// FFT size, needed by the literal IM power scaling.
    pub fft_size: usize,
}

impl NomaConfig {
    /// Desk defaults: equal powers, QPSK, (4,3) IM over 416 subcarriers.
    pub fn new(scheme: Scheme, p1: f64, p2: f64, noise_var: f64) -> Self {
        NomaConfig {
            p1,
            p2,
            noise_var,
            scheme,
            decode_order: DecodeOrder::Auto,
            reconstruction: Reconstruction::Soft,
            im: ImParams::desk(),
            fft_size: 512,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p1 >= 0.0 && self.p2 >= 0.0) {
            return config_err("user powers must be non-negative");
        }
        if !(self.noise_var >= 0.0) {
            return config_err("noise variance must be non-negative");
        }
        Ok(())
    }

    /// `10 log10(p1 / p2)`.
    pub fn power_difference_db(&self) -> f64 {
        10.0 * (self.p1 / self.p2).log10()
    }

    /// Frequency-domain amplitudes of (user 1, user 2) on an active
    /// subcarrier.
    pub fn amplitudes(&self) -> (f64, f64) {
        let a1 = match self.scheme {
            Scheme::OfdmOfdm => self.p1.sqrt(),
            Scheme::ImOfdm => self.im.amplitude(self.p1, self.fft_size),
        };
        (a1, self.p2.sqrt())
    }

    /// The user whose signal is detected and cancelled first.
    pub fn first_user(&self) -> User {
        match self.decode_order {
            DecodeOrder::User1First => User::One,
            DecodeOrder::User2First => User::Two,
            DecodeOrder::Auto => {
                if self.p1 >= self.p2 {
                    User::One
                } else {
                    User::Two
                }
            }
        }
    }
}
