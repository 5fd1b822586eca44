//! Coded BER of the radar-aided pilot-free receiver against a perfect-CSI,
//! FMCW-free reference on the same frames, channels and noise.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wdnoma::channel::{apply_ltv, SceneFile};
use wdnoma::fec::{conv_encode, viterbi_decode, ConvCode};
use wdnoma::numerics::{add_awgn, db_to_linear, qam_map, ComplexSignal, QamConstellation, SimRng, C64};
use wdnoma::radar::{jrc_receive, receive_ofdm, SensingConfig};
use wdnoma::waveforms::{build_jrc_frame, fmcw_generate, ofdm_modulate, JrcParams};

use crate::config::{desk_scene, ExperimentConfig, Scenario};
use crate::error::{config_err, Result};
use crate::output::{line_plot_svg, write_plot, write_table, Series};
use crate::stats::{coords, required_snr, ErrorPoint, Flag, MetricRecord};

/// Transmitted frame and its two components.
#[derive(Debug, Clone)]
pub struct JrcTx {
    pub frame: ComplexSignal,
    pub fmcw: ComplexSignal,
    /// The frame with the chirps removed.
    pub ofdm_only: ComplexSignal,
}

/// Uncoded random QPSK filling every payload resource element.
pub fn random_payload(params: &JrcParams, rng: &mut SimRng) -> Result<Vec<C64>> {
    let bits = rng.bits(2 * params.ofdm.symbols * params.ofdm.allocated);
    Ok(qam_map(&bits, &QamConstellation::qpsk())?)
}

pub fn transmit(params: &JrcParams, grid: &[C64]) -> Result<JrcTx> {
    let fs = params.sample_rate();
    let fmcw = fmcw_generate(&params.fmcw, fs)?;
    let ofdm = ofdm_modulate(grid, &params.ofdm)?;
    let frame = build_jrc_frame(&fmcw, &ofdm, params.fmcw.chirp_duration)?;
    let silent = ComplexSignal::zeros(fmcw.len(), fs)?;
    let ofdm_only = build_jrc_frame(&silent, &ofdm, params.fmcw.chirp_duration)?;
    Ok(JrcTx { frame, fmcw, ofdm_only })
}

/// Bit errors of both receivers on one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameErrors {
    pub proposed: u64,
    pub reference: u64,
    pub bits: u64,
}

/// Everything fixed across frames of a JRC sweep.
#[derive(Debug, Clone)]
pub struct JrcLink {
    pub params: JrcParams,
    pub code: ConvCode,
    pub info_len: usize,
    pub sensing: SensingConfig,
    pub scene: SceneFile,
}

impl JrcLink {
    pub fn new(params: JrcParams, scene: SceneFile, interleaver_depth: usize, sensing: SensingConfig) -> Result<Self> {
        params.validate()?;
        let code = ConvCode::default().with_interleaver(interleaver_depth);
        let info_len = code.info_len_for(2 * params.ofdm.symbols * params.ofdm.allocated);
        if info_len == 0 {
            return config_err("payload too small for a single information bit");
        }
        Ok(JrcLink {
            params,
            code,
            info_len,
            sensing,
            scene,
        })
    }

    /// Noise variance giving `snr_db` for the superimposed frame,
    /// `(P_FMCW + P_OFDM) / sigma^2`.
    pub fn noise_var(&self, snr_db: f64) -> f64 {
        (self.params.fmcw.power + self.params.ofdm.power) / db_to_linear(snr_db)
    }

    pub fn frame(&self, noise_var: f64, rng: &mut SimRng) -> Result<FrameErrors> {
        let p = &self.params;
        let fs = p.sample_rate();
        let payload_bits = 2 * p.ofdm.symbols * p.ofdm.allocated;
        let info = rng.bits(self.info_len);
        let mut coded = conv_encode(&info, &self.code)?;
        let coded_len = coded.len();
        coded.extend(rng.bits(payload_bits - coded_len));
        let grid = qam_map(&coded, &QamConstellation::qpsk())?;
        let tx = transmit(p, &grid)?;
        let scene = self.scene.realize(rng)?;
        let mut noise = vec![C64::new(0.0, 0.0); tx.frame.len()];
        add_awgn(&mut noise, noise_var, rng);
        let mut y = apply_ltv(&scene, &tx.frame, fs)?;
        let mut yr = apply_ltv(&scene, &tx.ofdm_only, fs)?;
        for ((a, b), w) in y.samples_mut().iter_mut().zip(yr.samples_mut()).zip(&noise) {
            *a += w;
            *b += w;
        }
        let rx = jrc_receive(&y, p, &self.sensing, noise_var)?;
        let (_, ref_llrs) = receive_ofdm(&yr, &scene.taps(fs)?, p, noise_var)?;
        let count = |llrs: &[f64]| -> Result<u64> {
            let bits = viterbi_decode(&llrs[..coded_len], &self.code)?;
            Ok(bits.iter().zip(&info).filter(|(a, b)| a != b).count() as u64)
        };
        Ok(FrameErrors {
            proposed: count(&rx.llrs)?,
            reference: count(&ref_llrs)?,
            bits: self.info_len as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JrcOutput {
    /// BER per (pipeline, SNR).
    pub ber: Vec<MetricRecord>,
    /// Required SNR per pipeline and the gap between them.
    pub summary: Vec<MetricRecord>,
    pub frames_per_point: usize,
    pub target_ber: f64,
}

impl JrcOutput {
    fn summary_metric(&self, metric: &str, pipeline: &str) -> Option<&MetricRecord> {
        self.summary
            .iter()
            .find(|r| r.metric == metric && r.coord("pipeline") == Some(pipeline))
    }

    pub fn gap(&self) -> Option<&MetricRecord> {
        self.summary_metric("snr_gap_db", "proposed-reference")
    }

    pub fn required(&self, pipeline: &str) -> Option<&MetricRecord> {
        self.summary_metric("required_snr_db", pipeline)
    }

    pub fn save(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let mut files = vec![
            write_table(dir, "jrc_ber", &self.ber, cfg)?,
            write_table(dir, "jrc_summary", &self.summary, cfg)?,
        ];
        let series: Vec<Series> = ["proposed", "reference"]
            .iter()
            .map(|&name| {
                let pts = self
                    .ber
                    .iter()
                    .filter(|r| r.coord("pipeline") == Some(name))
                    .map(|r| {
                        let x = r.coord("snr_db").and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
                        (x, r.value)
                    })
                    .collect();
                (name.to_string(), pts)
            })
            .collect();
        let path = dir.join("jrc_ber.svg");
        write_plot(&path, &line_plot_svg("coded BER", "SNR (dB)", "BER", &series, true))?;
        files.push(path);
        Ok(files)
    }
}

pub fn run_jrc_ber(cfg: &ExperimentConfig) -> Result<JrcOutput> {
    if cfg.scenario != Scenario::JrcBer {
        return config_err("run_jrc_ber needs scenario jrc-ber");
    }
    cfg.validate()?;
    let sec = cfg.jrc()?;
    let mut params = cfg.jrc_params();
    params.fmcw.power = sec.p_fmcw;
    params.ofdm.power = sec.p_ofdm;
    let scene = match &sec.scene {
        Some(s) => s.load()?,
        None => desk_scene(&params),
    };
    let sensing = SensingConfig {
        threshold_db: sec.threshold_db,
        prune_significance: Some(sec.prune_significance),
        ..Default::default()
    };
    let link = JrcLink::new(params, scene, sec.interleaver_depth, sensing)?;
    let frames = cfg.trials.max(sec.min_info_bits.div_ceil(link.info_len));
    let snrs = sec.snr_db.values()?;
    let root = SimRng::new(cfg.seed);
    let mut ber = Vec::new();
    let mut prop_pts = Vec::new();
    let mut ref_pts = Vec::new();
    for (ni, &snr) in snrs.iter().enumerate() {
        let nv = link.noise_var(snr);
        let per: Vec<FrameErrors> = (0..frames as u64)
            .into_par_iter()
            .map(|t| link.frame(nv, &mut root.substream(SimRng::stream_key(&[3, ni as u64, t]))))
            .collect::<Result<_>>()?;
        let bits: u64 = per.iter().map(|f| f.bits).sum();
        let prop: u64 = per.iter().map(|f| f.proposed).sum();
        let refe: u64 = per.iter().map(|f| f.reference).sum();
        for (name, errors, pts) in [("proposed", prop, &mut prop_pts), ("reference", refe, &mut ref_pts)] {
            ber.push(MetricRecord::proportion(
                coords([("pipeline", name.into()), ("snr_db", snr.to_string())]),
                "ber",
                errors,
                bits,
            ));
            pts.push(ErrorPoint {
                snr_db: snr,
                errors,
                trials: bits,
            });
        }
    }
    let bits_per_point = (frames * link.info_len) as u64;
    let mut summary = Vec::new();
    let mut req = Vec::new();
    for (name, pts) in [("proposed", &prop_pts), ("reference", &ref_pts)] {
        let r = required_snr(pts, sec.target_ber).expect("grid is non-empty");
        summary.push(MetricRecord {
            coords: coords([("pipeline", name.into())]),
            metric: "required_snr_db".into(),
            value: r.value,
            count: 0,
            trials: bits_per_point,
            ci_low: r.low,
            ci_high: r.high,
            flag: r.flag,
        });
        req.push(r);
    }
    let (p, r) = (req[0], req[1]);
    summary.push(MetricRecord {
        coords: coords([("pipeline", "proposed-reference".into())]),
        metric: "snr_gap_db".into(),
        value: p.value - r.value,
        count: 0,
        trials: bits_per_point,
        ci_low: p.low - r.high,
        ci_high: p.high - r.low,
        flag: if p.flag != Flag::Ok { p.flag } else { r.flag },
    });
    Ok(JrcOutput {
        ber,
        summary,
        frames_per_point: frames,
        target_ber: sec.target_ber,
    })
}
