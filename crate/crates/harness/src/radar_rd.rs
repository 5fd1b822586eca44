//! Range-Doppler sensing of a scene illuminated by the joint FMCW/OFDM frame.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use wdnoma::channel::{apply_ltv, RadarScene, SceneFile};
use wdnoma::numerics::{add_awgn, db_to_linear, ComplexSignal, SimRng};
use wdnoma::radar::{sense, RadarGeometry, RangeDopplerMap, SensingConfig, TargetEstimate};
use wdnoma::waveforms::JrcParams;

use crate::config::{desk_scene, ExperimentConfig, Scenario};
use crate::error::{config_err, Result};
use crate::jrc_ber::{random_payload, transmit};
use crate::output::{write_iq, write_json, write_rd_map, write_table};
use crate::stats::{coords, MetricRecord};

/// Map cell a target should land in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruthBin {
    pub range_bin: usize,
    pub doppler_bin: i64,
}

impl TruthBin {
    pub fn of(delay_s: f64, doppler_hz: f64, geometry: &RadarGeometry) -> Self {
        let r = (delay_s * geometry.bandwidth).round() as i64;
        TruthBin {
            range_bin: r.rem_euclid(geometry.chirp_len as i64) as usize,
            doppler_bin: (doppler_hz / geometry.doppler_per_bin()).round() as i64,
        }
    }

    /// Within one range and one Doppler bin, circularly.
    pub fn matches(&self, est: &TargetEstimate, geometry: &RadarGeometry) -> bool {
        let circ = |a: i64, b: i64, n: i64| {
            let d = (a - b).rem_euclid(n);
            d.min(n - d)
        };
        circ(self.range_bin as i64, est.range_bin as i64, geometry.chirp_len as i64) <= 1
            && circ(self.doppler_bin, est.doppler_bin, geometry.chirps as i64) <= 1
    }
}

/// Outcome of one sensing trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialDetection {
    pub targets: usize,
    pub detected: usize,
    pub false_alarms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstTrial {
    pub truth: Vec<TruthBin>,
    pub estimates: Vec<TargetEstimate>,
}

#[derive(Debug, Clone)]
pub struct RadarOutput {
    pub records: Vec<MetricRecord>,
    pub trials: Vec<TrialDetection>,
    pub first: FirstTrial,
    pub first_map: RangeDopplerMap,
    pub first_frame: Option<ComplexSignal>,
}

impl RadarOutput {
    /// Fraction of trials in which every target was found.
    pub fn all_detected_rate(&self) -> f64 {
        let hits = self.trials.iter().filter(|t| t.detected == t.targets).count();
        hits as f64 / self.trials.len() as f64
    }

    pub fn save(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let mut files = vec![write_table(dir, "radar_detection", &self.records, cfg)?];
        files.push(write_rd_map(dir, "radar_rd_map", &self.first_map)?);
        let est = dir.join("radar_estimates.json");
        write_json(&est, &self.first)?;
        files.push(est);
        let per = dir.join("radar_trials.json");
        write_json(&per, &self.trials)?;
        files.push(per);
        if let Some(frame) = &self.first_frame {
            files.push(write_iq(dir, "radar_rx", frame)?);
        }
        Ok(files)
    }
}

struct TrialResult {
    detection: TrialDetection,
    first: Option<(FirstTrial, RangeDopplerMap, ComplexSignal)>,
}

fn radar_trial(
    params: &JrcParams,
    scene: &SceneFile,
    sensing: &SensingConfig,
    noise_var: f64,
    rng: &mut SimRng,
    keep: bool,
) -> Result<TrialResult> {
    let fs = params.sample_rate();
    let geometry = RadarGeometry::new(&params.fmcw, fs);
    let realized: RadarScene = scene.realize(rng)?;
    let grid = random_payload(params, rng)?;
    let tx = transmit(params, &grid)?;
    let mut y = apply_ltv(&realized, &tx.frame, fs)?;
    add_awgn(y.samples_mut(), noise_var, rng);
    let report = sense(&y, &params.fmcw, sensing)?;
    let truth: Vec<TruthBin> = realized
        .targets
        .iter()
        .map(|t| TruthBin::of(t.delay_s, t.doppler_hz, &geometry))
        .collect();
    let detected = truth
        .iter()
        .filter(|t| report.targets.iter().any(|e| t.matches(e, &geometry)))
        .count();
    let false_alarms = report
        .targets
        .iter()
        .filter(|e| !truth.iter().any(|t| t.matches(e, &geometry)))
        .count();
    let first = keep.then(|| {
        (
            FirstTrial {
                truth: truth.clone(),
                estimates: report.targets.clone(),
            },
            report.map.clone(),
            y,
        )
    });
    Ok(TrialResult {
        detection: TrialDetection {
            targets: truth.len(),
            detected,
            false_alarms,
        },
        first,
    })
}

pub fn run_radar_rd(cfg: &ExperimentConfig) -> Result<RadarOutput> {
    if cfg.scenario != Scenario::RadarRd {
        return config_err("run_radar_rd needs scenario radar-rd");
    }
    cfg.validate()?;
    let sec = cfg.radar()?;
    let params = cfg.jrc_params();
    params.validate()?;
    let scene = match &sec.scene {
        Some(s) => s.load()?,
        None => desk_scene(&params),
    };
    let noise_var = (params.fmcw.power + params.ofdm.power) / db_to_linear(sec.snr_db);
    let sensing = SensingConfig {
        max_targets: sec.max_targets,
        threshold_db: sec.threshold_db,
        ..Default::default()
    };
    let root = SimRng::new(cfg.seed);
    let results: Vec<TrialResult> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = root.substream(SimRng::stream_key(&[2, t]));
            radar_trial(&params, &scene, &sensing, noise_var, &mut rng, t == 0)
        })
        .collect::<Result<_>>()?;
    let mut trials = Vec::with_capacity(results.len());
    let mut first = None;
    for r in results {
        trials.push(r.detection);
        if r.first.is_some() {
            first = r.first;
        }
    }
    let (first, first_map, frame) = first.expect("trial 0 always runs");
    let n = trials.len() as u64;
    let at = || coords([("snr_db", sec.snr_db.to_string())]);
    let all = trials.iter().filter(|t| t.detected == t.targets).count() as u64;
    let hits: u64 = trials.iter().map(|t| t.detected as u64).sum();
    let total: u64 = trials.iter().map(|t| t.targets as u64).sum();
    let fa: Vec<f64> = trials.iter().map(|t| t.false_alarms as f64).collect();
    let empty = trials.iter().filter(|t| t.detected + t.false_alarms == 0).count() as u64;
    let records = vec![
        MetricRecord::proportion(at(), "all_detected", all, n),
        MetricRecord::proportion(at(), "target_detection", hits, total),
        MetricRecord::mean(at(), "false_alarms_per_trial", &fa),
        MetricRecord::proportion(at(), "empty_estimate", empty, n),
    ];
    Ok(RadarOutput {
        records,
        trials,
        first,
        first_map,
        first_frame: sec.export_iq.then_some(frame),
    })
}
