//! Frequency-selective Rayleigh fading, delay/Doppler multipath scenes and
//! large-scale path loss.

mod fading;
mod ltv;
mod path_loss;
mod scene;

pub use fading::{channel_frequency_response, draw_fading, exponential_pdp, FadingChannel};
pub use ltv::{apply_ltv, apply_taps, LtvTap, RadarScene, RadarTarget};
pub use path_loss::{path_loss, PathLossParams};
pub use scene::{GainSpec, SceneFile, TargetSpec};
