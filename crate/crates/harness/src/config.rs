//! Experiment description read from TOML.
//!
//! ```toml
//! scenario = "noma-bler"      # noma-bler | radar-rd | jrc-ber | rates
//! seed = 7
//! trials = 2000               # frames per sweep point
//! out = "results/noma"        # optional, CLI --out wins
//! full_scale = false
//!
//! [noma]
//! schemes = ["ofdm", "im"]
//! decode_orders = ["auto"]    # u1 | u2 | auto
//! users = [1, 2]
//! power_diff_db = { start = -6, stop = 6, step = 6 }
//! snr_db = "0:32:2"
//! target_bler = 0.01
//! taps = 10
//! pdp_decay = 1.0
//! reconstruction = "soft"     # soft | hard | genie
//! early_stop = true
//! ```
//!
//! Grids are written as a list, a `{ start, stop, step }` table or an
//! `"a:b:step"` string. Radar and JRC sections take a `scene`, either a path
//! to a scene file (relative to the config file) or an inline scene table;
//! without one the three-target desk scene is used.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wdnoma::channel::{GainSpec, SceneFile, TargetSpec};
use wdnoma::noma::{DecodeOrder, Reconstruction, Scheme};
use wdnoma::waveforms::JrcParams;

use crate::error::{config_err, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    NomaBler,
    RadarRd,
    JrcBer,
    Rates,
}

/// Waveform pair under test, by the name of user 1's waveform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    Ofdm,
    Im,
}

impl SchemeChoice {
    pub fn scheme(self) -> Scheme {
        match self {
            SchemeChoice::Ofdm => Scheme::OfdmOfdm,
            SchemeChoice::Im => Scheme::ImOfdm,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchemeChoice::Ofdm => "ofdm",
            SchemeChoice::Im => "im",
        }
    }
}

/// A sweep axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
    Text(String),
}

impl Grid {
    /// Parses `"a:b:step"` (inclusive of `b` when it lands on the lattice).
    pub fn parse_range(text: &str) -> Result<Grid> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let nums: std::result::Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
        match nums {
            Ok(v) if v.len() == 3 => Ok(Grid::Range {
                start: v[0],
                stop: v[1],
                step: v[2],
            }),
            Ok(v) if v.len() == 1 => Ok(Grid::List(v)),
            _ => config_err(format!("cannot read grid {text:?}; expected a:b:step")),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Text(t) => return Grid::parse_range(t)?.values(),
            &Grid::Range { start, stop, step } => {
                if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
                    return config_err(format!("grid {start}:{stop}:{step} needs a positive step"));
                }
                let n = ((stop - start) / step + 1e-9).floor();
                if n < 0.0 {
                    return config_err(format!("grid {start}:{stop}:{step} is empty"));
                }
                (0..=n as usize).map(|i| start + i as f64 * step).collect()
            }
        };
        if v.is_empty() {
            return config_err("grid is empty");
        }
        if v.iter().any(|x| x.is_nan()) {
            return config_err("grid contains NaN");
        }
        Ok(v)
    }
}

/// Scene given by file or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SceneSource {
    Path(PathBuf),
    Inline(SceneFile),
}

impl SceneSource {
    pub fn load(&self) -> Result<SceneFile> {
        match self {
            SceneSource::Path(p) => Ok(SceneFile::load(p)?),
            SceneSource::Inline(s) => Ok(s.clone()),
        }
    }
}

/// Three returns at 4, 8 and 12 samples of the 30.72 MHz desk clock,
/// Doppler bins +1, -2 and 0 of `params`, pdp-weighted gains with random
/// phase.
pub fn desk_scene(params: &JrcParams) -> SceneFile {
    let fs_desk = 30.72e6;
    let dbin = params.sample_rate() / (params.fmcw.chirps * params.chirp_len()) as f64;
    let targets = [(4.0, 1.0), (8.0, -2.0), (12.0, 0.0)]
        .iter()
        .map(|&(d, m)| TargetSpec {
            delay_s: Some(d / fs_desk),
            doppler_hz: Some(m * dbin),
            gain: GainSpec::Named("pdp".into()),
            ..Default::default()
        })
        .collect();
    SceneFile {
        carrier_hz: params.carrier_hz,
        pdp_decay: 1.0,
        targets,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NomaSection {
    #[serde(default = "both_schemes")]
    pub schemes: Vec<SchemeChoice>,
    #[serde(default = "auto_order")]
    pub decode_orders: Vec<DecodeOrder>,
    #[serde(default = "both_users")]
    pub users: Vec<u8>,
    pub power_diff_db: Grid,
    pub snr_db: Grid,
    #[serde(default = "default_target_bler")]
    pub target_bler: f64,
    #[serde(default = "default_taps")]
    pub taps: usize,
    #[serde(default = "one")]
    pub pdp_decay: f64,
    #[serde(default)]
    pub reconstruction: Reconstruction,
    /// Skip the rest of an SNR sweep once the upper Wilson bound is below the
    /// target.
    #[serde(default = "yes")]
    pub early_stop: bool,
}

impl Default for NomaSection {
    fn default() -> Self {
        NomaSection {
            schemes: both_schemes(),
            decode_orders: auto_order(),
            users: both_users(),
            power_diff_db: Grid::List(vec![-6.0, 0.0, 6.0]),
            snr_db: Grid::Range {
                start: 0.0,
                stop: 32.0,
                step: 2.0,
            },
            target_bler: default_target_bler(),
            taps: default_taps(),
            pdp_decay: 1.0,
            reconstruction: Reconstruction::Soft,
            early_stop: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarSection {
    #[serde(default)]
    pub scene: Option<SceneSource>,
    /// (P_FMCW + P_OFDM) / noise variance.
    #[serde(default = "twenty")]
    pub snr_db: f64,
    /// Extract exactly this many peaks instead of thresholding.
    #[serde(default)]
    pub max_targets: Option<usize>,
    #[serde(default = "default_threshold")]
    pub threshold_db: f64,
    /// Write the first trial's received frame as interleaved float32.
    #[serde(default)]
    pub export_iq: bool,
}

impl Default for RadarSection {
    fn default() -> Self {
        RadarSection {
            scene: None,
            snr_db: 20.0,
            max_targets: None,
            threshold_db: default_threshold(),
            export_iq: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JrcSection {
    pub snr_db: Grid,
    #[serde(default)]
    pub scene: Option<SceneSource>,
    /// Frames per point are raised until this many information bits are sent.
    #[serde(default = "default_min_bits")]
    pub min_info_bits: usize,
    #[serde(default = "default_target_ber")]
    pub target_ber: f64,
    #[serde(default = "one")]
    pub p_fmcw: f64,
    #[serde(default = "one")]
    pub p_ofdm: f64,
    #[serde(default = "default_depth")]
    pub interleaver_depth: usize,
    #[serde(default = "default_threshold")]
    pub threshold_db: f64,
    #[serde(default = "default_prune")]
    pub prune_significance: f64,
}

impl Default for JrcSection {
    fn default() -> Self {
        JrcSection {
            snr_db: Grid::Range {
                start: 0.0,
                stop: 12.0,
                step: 1.0,
            },
            scene: None,
            min_info_bits: default_min_bits(),
            target_ber: default_target_ber(),
            p_fmcw: 1.0,
            p_ofdm: 1.0,
            interleaver_depth: default_depth(),
            threshold_db: default_threshold(),
            prune_significance: default_prune(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub snr_db: Grid,
    pub power_diff_db: Grid,
    #[serde(default = "default_taps")]
    pub taps: usize,
    #[serde(default = "one")]
    pub pdp_decay: f64,
}

impl Default for RatesSection {
    fn default() -> Self {
        RatesSection {
            snr_db: Grid::Range {
                start: 0.0,
                stop: 30.0,
                step: 5.0,
            },
            power_diff_db: Grid::List(vec![-6.0, 0.0, 6.0]),
            taps: default_taps(),
            pdp_decay: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub full_scale: bool,
    #[serde(default)]
    pub noma: Option<NomaSection>,
    #[serde(default)]
    pub radar: Option<RadarSection>,
    #[serde(default)]
    pub jrc: Option<JrcSection>,
    #[serde(default)]
    pub rates: Option<RatesSection>,
}

impl ExperimentConfig {
    /// Config for `scenario` with that scenario's default block.
    pub fn with_defaults(scenario: Scenario) -> Self {
        let mut cfg = ExperimentConfig {
            scenario,
            seed: default_seed(),
            trials: default_trials(),
            out: None,
            full_scale: false,
            noma: None,
            radar: None,
            jrc: None,
            rates: None,
        };
        match scenario {
            Scenario::NomaBler => cfg.noma = Some(NomaSection::default()),
            Scenario::RadarRd => {
                cfg.radar = Some(RadarSection::default());
                cfg.trials = 200;
            }
            Scenario::JrcBer => {
                cfg.jrc = Some(JrcSection::default());
                cfg.trials = 1;
            }
            Scenario::Rates => {
                cfg.rates = Some(RatesSection::default());
                cfg.trials = 100;
            }
        }
        cfg
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; scene paths are resolved against its directory
    /// and inlined so the config hash covers the scene contents.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.inline_scenes(base)?;
        Ok(cfg)
    }

    pub fn inline_scenes(&mut self, base: &Path) -> Result<()> {
        let slots = [
            self.radar.as_mut().map(|r| &mut r.scene),
            self.jrc.as_mut().map(|j| &mut j.scene),
        ];
        for slot in slots.into_iter().flatten() {
            if let Some(SceneSource::Path(p)) = slot {
                let full = if p.is_relative() { base.join(&*p) } else { p.clone() };
                *slot = Some(SceneSource::Inline(SceneFile::load(&full)?));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return config_err("trials must be at least 1");
        }
        match self.scenario {
            Scenario::NomaBler => {
                let Some(n) = &self.noma else {
                    return config_err("scenario noma-bler needs a [noma] block");
                };
                n.snr_db.values()?;
                n.power_diff_db.values()?;
                if n.schemes.is_empty() || n.decode_orders.is_empty() || n.users.is_empty() {
                    return config_err("noma schemes, decode_orders and users must be non-empty");
                }
                if n.users.iter().any(|&u| u != 1 && u != 2) {
                    return config_err("noma users are 1 and 2");
                }
                if !(n.target_bler > 0.0 && n.target_bler < 1.0) {
                    return config_err("target_bler must lie in (0, 1)");
                }
                if n.taps == 0 {
                    return config_err("channel needs at least one tap");
                }
            }
            Scenario::RadarRd => {
                if self.radar.is_none() {
                    return config_err("scenario radar-rd needs a [radar] block");
                }
            }
            Scenario::JrcBer => {
                let Some(j) = &self.jrc else {
                    return config_err("scenario jrc-ber needs a [jrc] block");
                };
                j.snr_db.values()?;
                if !(j.target_ber > 0.0 && j.target_ber < 1.0) {
                    return config_err("target_ber must lie in (0, 1)");
                }
                if !(j.p_fmcw >= 0.0 && j.p_ofdm > 0.0) {
                    return config_err("p_fmcw must be non-negative and p_ofdm positive");
                }
            }
            Scenario::Rates => {
                let Some(r) = &self.rates else {
                    return config_err("scenario rates needs a [rates] block");
                };
                r.snr_db.values()?;
                r.power_diff_db.values()?;
                if r.taps == 0 {
                    return config_err("channel needs at least one tap");
                }
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the resolved config serialised as JSON. The output
    /// directory does not affect results and is left out.
    pub fn hash(&self) -> String {
        let mut resolved = self.clone();
        resolved.out = None;
        let json = serde_json::to_vec(&resolved).expect("config serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sweep section of the active scenario; `validate` guarantees presence.
    pub fn noma(&self) -> Result<&NomaSection> {
        self.noma
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [noma] block".into()))
    }

    pub fn radar(&self) -> Result<&RadarSection> {
        self.radar
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [radar] block".into()))
    }

    pub fn jrc(&self) -> Result<&JrcSection> {
        self.jrc
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [jrc] block".into()))
    }

    pub fn rates(&self) -> Result<&RatesSection> {
        self.rates
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [rates] block".into()))
    }

    pub fn jrc_params(&self) -> JrcParams {
        if self.full_scale {
            JrcParams::full_scale()
        } else {
            JrcParams::desk()
        }
    }
}

fn both_schemes() -> Vec<SchemeChoice> {
    vec![SchemeChoice::Ofdm, SchemeChoice::Im]
}

fn auto_order() -> Vec<DecodeOrder> {
    vec![DecodeOrder::Auto]
}

fn both_users() -> Vec<u8> {
    vec![1, 2]
}

fn default_target_bler() -> f64 {
    1e-2
}

fn default_target_ber() -> f64 {
    1e-2
}

fn default_taps() -> usize {
    10
}

fn default_threshold() -> f64 {
    wdnoma::radar::DEFAULT_THRESHOLD_DB
}

fn default_prune() -> f64 {
    wdnoma::radar::DEFAULT_PRUNE_SIGNIFICANCE
}

fn default_min_bits() -> usize {
    100_000
}

fn default_depth() -> usize {
    64
}

fn default_seed() -> u64 {
    1
}

fn default_trials() -> usize {
    2000
}

fn one() -> f64 {
    1.0
}

fn twenty() -> f64 {
    20.0
}

fn yes() -> bool {
    true
}
