//! End-to-end sensing and joint radar-communication reception.

use super::equalize::{equalize_ofdm, EqualizedFrame};
use super::hmatrix::{cancel_fmcw, targets_to_taps};
use super::ls::fit_gains;
use super::rd::{dechirp, extract_targets, periodogram, RangeDopplerMap, TargetEstimate, DEFAULT_THRESHOLD_DB};
use super::RadarGeometry;
use crate::channel::LtvTap;
use crate::error::{config_err, Result};
use crate::numerics::{ComplexSignal, QamConstellation};
use crate::waveforms::{fmcw_generate, FmcwParams, JrcParams};

/// Significance below which a fitted gain is treated as noise;
/// a pure-noise gain exceeds it with probability `exp(-4)`.
pub const DEFAULT_PRUNE_SIGNIFICANCE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SensingConfig {
    /// Stop after this many peaks.
    pub max_targets: Option<usize>,
    /// Detection floor over the map median.
    pub threshold_db: f64,
    /// First sample of the LS window; `N_c / 4` when unset.
    pub ls_offset: Option<usize>,
    /// Rotate LS columns by each target's estimated Doppler ramp.
    pub doppler_in_ls: bool,
    /// Detections delayed by more samples than this are discarded.
    pub max_delay_samples: Option<usize>,
    /// Detections are admitted strongest first and kept only if their LS
    /// gain reaches this `|h|^2 / var(h)`; removes map sidelobes that
    /// cleared the threshold.
    pub prune_significance: Option<f64>,
}

impl Default for SensingConfig {
    fn default() -> Self {
        SensingConfig {
            max_targets: None,
            threshold_db: DEFAULT_THRESHOLD_DB,
            ls_offset: None,
            doppler_in_ls: true,
            max_delay_samples: None,
            prune_significance: Some(DEFAULT_PRUNE_SIGNIFICANCE),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingReport {
    pub map: RangeDopplerMap,
    /// Detections with LS gains filled in, strongest first.
    pub targets: Vec<TargetEstimate>,
}

/// Dechirp, periodogram, peak picking and LS gain estimation on a received
/// frame whose first chirp carries no OFDM.
///
/// Detections that quantise to the same sample delay cannot be separated by
/// the LS fit; only the strongest of each such group is kept.
pub fn sense(y: &ComplexSignal, fmcw: &FmcwParams, cfg: &SensingConfig) -> Result<SensingReport> {
    let fs = y.sample_rate();
    fmcw.validate(fs)?;
    let geometry = RadarGeometry::new(fmcw, fs);
    let reference = fmcw.reference_chirp(fs);
    let cpi = dechirp(y.samples(), &reference, fmcw.chirps)?;
    let map = periodogram(&cpi, geometry);
    let mut targets: Vec<TargetEstimate> = Vec::new();
    let max_delay = cfg.max_delay_samples.unwrap_or(usize::MAX);
    for t in extract_targets(&map, cfg.max_targets, cfg.threshold_db) {
        if t.delay_samples(fs) > max_delay {
            continue;
        }
        if targets.iter().any(|k| k.delay_samples(fs) == t.delay_samples(fs)) {
            log::debug!("dropping weaker detection at range bin {}", t.range_bin);
            continue;
        }
        targets.push(t);
    }
    let nc = reference.len();
    let offset = cfg.ls_offset.unwrap_or(nc / 4);
    let amp = fmcw.power.sqrt();
    let transmitted: Vec<_> = reference.iter().map(|c| c * amp).collect();
    let fit_for = |set: &[TargetEstimate]| {
        let delays: Vec<usize> = set.iter().map(|t| t.delay_samples(fs)).collect();
        let dopplers: Vec<f64> = set.iter().map(|t| t.doppler / fs).collect();
        fit_gains(
            y.samples(),
            &transmitted,
            &delays,
            cfg.doppler_in_ls.then_some(dopplers.as_slice()),
            offset,
        )
    };
    if let Some(limit) = cfg.prune_significance {
        // forward selection in order of map strength: a detection is kept
        // only if it explains first-chirp energy the stronger ones do not
        let mut kept: Vec<TargetEstimate> = Vec::with_capacity(targets.len());
        for t in targets {
            kept.push(t);
            let significant = match fit_for(&kept) {
                Ok(fit) => fit.dof > 0 && fit.significance().last().is_some_and(|&z| z >= limit),
                Err(_) => false,
            };
            if !significant {
                kept.pop();
            }
        }
        targets = kept;
    }
    let fit = fit_for(&targets)?;
    for (t, g) in targets.iter_mut().zip(fit.gains) {
        t.gain = g;
    }
    Ok(SensingReport { map, targets })
}

/// Equalises the OFDM payload of an FMCW-free frame with `taps` and returns
/// the per-bit LLRs alongside the symbol estimates.
pub fn receive_ofdm(
    residual: &ComplexSignal,
    taps: &[LtvTap],
    params: &JrcParams,
    noise_var: f64,
) -> Result<(EqualizedFrame, Vec<f64>)> {
    let start = params.ofdm_offset();
    let end = start + params.ofdm.frame_len();
    if residual.len() < end {
        return config_err(format!(
            "frame of {} samples ends before the OFDM payload ({end})",
            residual.len()
        ));
    }
    let eq = equalize_ofdm(&residual.samples()[start..end], taps, &params.ofdm, start)?;
    let llrs = eq.llrs(&QamConstellation::qpsk(), noise_var);
    Ok((eq, llrs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JrcReception {
    pub sensing: SensingReport,
    pub taps: Vec<LtvTap>,
    pub equalized: EqualizedFrame,
    pub llrs: Vec<f64>,
}

/// Radar-aided pilot-free receiver: sense the scene from the chirps, rebuild
/// the channel, strip the FMCW echo, then equalise and demap the OFDM
/// symbols.
pub fn jrc_receive(
    y: &ComplexSignal,
    params: &JrcParams,
    sensing: &SensingConfig,
    noise_var: f64,
) -> Result<JrcReception> {
    params.validate()?;
    let fs = params.sample_rate();
    // the payload's cyclic prefix bounds the delays the link is designed for
    let mut sensing = sensing.clone();
    sensing.max_delay_samples.get_or_insert(params.ofdm.cp_len);
    let report = sense(y, &params.fmcw, &sensing)?;
    let taps = targets_to_taps(&report.targets, fs);
    let s_fmcw = fmcw_generate(&params.fmcw, fs)?;
    let residual = cancel_fmcw(y, &taps, &s_fmcw)?;
    let (equalized, llrs) = receive_ofdm(&residual, &taps, params, noise_var)?;
    Ok(JrcReception {
        sensing: report,
        taps,
        equalized,
        llrs,
    })
}
