//! Two-user downlink superposition: detection, cancellation and rates.

mod config;
mod detect;
pub mod exhaustive;
mod rates;
mod sic;

pub use config::{DecodeOrder, NomaConfig, Reconstruction, Scheme, User};
pub use detect::{
    augmented_alphabet, im_llrs, llr_im_first, llr_ofdm_first, llr_ofdm_ofdm, symbol_llrs, LlrFrame, NOISE_FLOOR,
};
pub use rates::{im_rate_bound, rate_im_noma, rate_ofdm_noma, RateReport, IM_RATE_GUARD};
pub use sic::{
    encode_user, sic_receive, superimpose, FrameLayout, SicDiagnostics, SicOutput, UserTx, UserWaveform, SIC_MAX_ITER,
};
