//! Baseband simulation toolkit for waveform-domain non-orthogonal multiple access.
//!
//! Two coexistence use cases are covered:
//!
//! * power-balanced downlink NOMA where an OFDM user and an OFDM-IM user share
//!   the same subcarriers, separated by max-log multi-user detection and
//!   LDPC-aided soft successive interference cancellation ([`noma`]);
//! * joint radar sensing and communication where an FMCW chirp train is
//!   superimposed on an OFDM payload and the radar returns are reused as a
//!   pilot-free channel estimate for the communication link ([`radar`]).
//!
//! The lower layers ([`numerics`], [`channel`], [`fec`], [`waveforms`]) are
//! usable on their own.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod channel;
pub mod error;
pub mod fec;
pub mod noma;
pub mod numerics;
pub mod radar;
pub mod waveforms;

pub use error::{Error, Result};
pub use numerics::{ComplexSignal, C64};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
