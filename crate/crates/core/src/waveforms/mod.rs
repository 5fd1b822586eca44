//! OFDM, index-modulated OFDM and FMCW synthesis, and the frame that
//! superimposes a chirp train on an OFDM payload.

mod fmcw;
mod im;
mod jrc;
mod ofdm;

pub use fmcw::{fmcw_generate, samples_in, FmcwParams};
pub use im::{combinations, im_demap, im_demodulate, im_map, im_modulate, ImParams, ImPowerMode};
pub use jrc::{build_jrc_frame, JrcParams};
pub use ofdm::{ofdm_demodulate, ofdm_modulate, symbol_spectrum, OfdmParams};
