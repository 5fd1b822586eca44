//! Block error rate of the two-user SIC receiver over power-difference and
//! SNR sweeps.
//!
//! At each point the SNR is the target user's own per-subcarrier power over
//! the noise variance: the target user has unit power and the other user sits
//! `power_diff_db` (user 1 over user 2) away. Each target user is simulated on
//! its own channel draws.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wdnoma::channel::{channel_frequency_response, draw_fading};
use wdnoma::fec::LdpcCode;
use wdnoma::noma::{
    encode_user, sic_receive, superimpose, DecodeOrder, FrameLayout, NomaConfig, Reconstruction, User, UserWaveform,
};
use wdnoma::numerics::{db_to_linear, SimRng, C64};
use wdnoma::waveforms::{ImParams, OfdmParams};

use crate::config::{ExperimentConfig, Scenario, SchemeChoice};
use crate::error::{config_err, Result};
use crate::output::{line_plot_svg, write_plot, write_table, Series};
use crate::stats::{coords, required_snr, ErrorPoint, Flag, MetricRecord};

/// Code, frame layout and subcarrier map shared by every trial.
#[derive(Debug, Clone)]
pub struct NomaSetup {
    pub code: &'static LdpcCode,
    pub layout: FrameLayout,
    pub ofdm: OfdmParams,
    /// FFT bins carrying the superimposed users.
    pub bins: Vec<usize>,
    pub im: ImParams,
    pub taps: usize,
    pub pdp_decay: f64,
}

impl NomaSetup {
    /// Desk lattice uses all 416 loaded subcarriers; the full-scale lattice
    /// uses the first 1664 of its 1666 so the (4,3) groups tile exactly.
    pub fn new(full_scale: bool, taps: usize, pdp_decay: f64) -> Result<Self> {
        let ofdm = if full_scale {
            OfdmParams::full_scale()
        } else {
            OfdmParams::desk()
        };
        let im = ImParams::new(4, 3, ofdm.allocated / 4, 4)?;
        let mut bins = ofdm.subcarrier_bins();
        bins.truncate(im.subcarriers());
        let code = LdpcCode::standard();
        let layout = FrameLayout::new(im.bits_per_symbol(), code)?;
        Ok(NomaSetup {
            code,
            layout,
            ofdm,
            bins,
            im,
            taps,
            pdp_decay,
        })
    }

    /// Codewords carried per user per frame.
    pub fn blocks_per_frame(&self) -> usize {
        self.layout.codewords
    }

    /// Link config with the target user at unit power and SNR `snr_db`.
    pub fn link(
        &self,
        scheme: SchemeChoice,
        order: DecodeOrder,
        reconstruction: Reconstruction,
        power_diff_db: f64,
        target: User,
        snr_db: f64,
    ) -> NomaConfig {
        let ratio = db_to_linear(power_diff_db);
        let (p1, p2) = match target {
            User::One => (1.0, 1.0 / ratio),
            User::Two => (ratio, 1.0),
        };
        let mut cfg = NomaConfig::new(scheme.scheme(), p1, p2, 1.0 / db_to_linear(snr_db));
        cfg.decode_order = order;
        cfg.reconstruction = reconstruction;
        cfg.im = self.im.clone();
        cfg.fft_size = self.ofdm.fft_size;
        cfg
    }

    /// One frame: encode both users, pass the superposition through the
    /// target's fading channel, run SIC and count the target's codeword
    /// errors.
    pub fn trial(&self, cfg: &NomaConfig, target: User, rng: &mut SimRng) -> Result<u64> {
        let t1 = encode_user(rng, self.code, &self.layout, &UserWaveform::for_user(cfg, User::One))?;
        let t2 = encode_user(rng, self.code, &self.layout, &UserWaveform::for_user(cfg, User::Two))?;
        let ch = draw_fading(self.taps, self.pdp_decay, rng)?;
        let cfr = channel_frequency_response(&ch, self.ofdm.fft_size)?;
        let h: Vec<C64> = self.bins.iter().map(|&b| cfr[b]).collect();
        let (r, _) = superimpose(&t1.symbols, &t2.symbols, cfg, &h, &h, rng)?;
        let truth = [t1.symbols.as_slice(), t2.symbols.as_slice()];
        let genie = (cfg.reconstruction == Reconstruction::Genie).then_some(truth);
        let out = sic_receive(&r, &h, cfg, self.code, &self.layout, genie)?;
        let sent = if target == User::One { &t1.info } else { &t2.info };
        let k = self.code.k();
        let errors = out.bits[target.index()]
            .chunks(k)
            .zip(sent.chunks(k))
            .filter(|(a, b)| a != b)
            .count();
        Ok(errors as u64)
    }
}

pub fn order_label(order: DecodeOrder) -> &'static str {
    match order {
        DecodeOrder::User1First => "u1",
        DecodeOrder::User2First => "u2",
        DecodeOrder::Auto => "auto",
    }
}

fn user_of(u: u8) -> User {
    if u == 1 {
        User::One
    } else {
        User::Two
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NomaBlerOutput {
    /// BLER per (scheme, order, power difference, user, SNR).
    pub bler: Vec<MetricRecord>,
    /// Required SNR per (scheme, order, power difference, user), plus a
    /// `user = max` row: the SNR at which both users meet the target.
    pub required: Vec<MetricRecord>,
    pub target_bler: f64,
}

impl NomaBlerOutput {
    /// Required-SNR row for the given coordinates (`user` is "1", "2" or "max").
    pub fn required_at(
        &self,
        scheme: SchemeChoice,
        order: DecodeOrder,
        power_diff_db: f64,
        user: &str,
    ) -> Option<&MetricRecord> {
        let dp = power_diff_db.to_string();
        self.required.iter().find(|r| {
            r.coord("scheme") == Some(scheme.label())
                && r.coord("decode_order") == Some(order_label(order))
                && r.coord("power_diff_db") == Some(dp.as_str())
                && r.coord("user") == Some(user)
        })
    }

    pub fn save(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let mut files = vec![
            write_table(dir, "noma_bler", &self.bler, cfg)?,
            write_table(dir, "noma_required_snr", &self.required, cfg)?,
        ];
        let mut series: Vec<Series> = Vec::new();
        for r in self.required.iter().filter(|r| r.coord("user") == Some("max")) {
            let name = format!(
                "{} {}",
                r.coord("scheme").unwrap_or(""),
                r.coord("decode_order").unwrap_or("")
            );
            let x: f64 = r
                .coord("power_diff_db")
                .and_then(|v| v.parse().ok())
                .unwrap_or(f64::NAN);
            match series.iter_mut().find(|(n, _)| *n == name) {
                Some((_, pts)) => pts.push((x, r.value)),
                None => series.push((name, vec![(x, r.value)])),
            }
        }
        let svg = line_plot_svg(
            &format!("required SNR at BLER {}", self.target_bler),
            "power difference (dB)",
            "required SNR (dB)",
            &series,
            false,
        );
        let path = dir.join("noma_required_snr.svg");
        write_plot(&path, &svg)?;
        files.push(path);
        Ok(files)
    }
}

pub fn run_noma_bler(cfg: &ExperimentConfig) -> Result<NomaBlerOutput> {
    if cfg.scenario != Scenario::NomaBler {
        return config_err("run_noma_bler needs scenario noma-bler");
    }
    cfg.validate()?;
    let sec = cfg.noma()?;
    let setup = NomaSetup::new(cfg.full_scale, sec.taps, sec.pdp_decay)?;
    let snrs = sec.snr_db.values()?;
    let dps = sec.power_diff_db.values()?;
    let root = SimRng::new(cfg.seed);
    let blocks_per_trial = setup.blocks_per_frame() as u64;
    let trials = cfg.trials as u64 * blocks_per_trial;
    let mut out = NomaBlerOutput {
        bler: Vec::new(),
        required: Vec::new(),
        target_bler: sec.target_bler,
    };
    for (si, &scheme) in sec.schemes.iter().enumerate() {
        for (oi, &order) in sec.decode_orders.iter().enumerate() {
            for (di, &dp) in dps.iter().enumerate() {
                let mut per_user = Vec::new();
                for &u in &sec.users {
                    let user = user_of(u);
                    let mut points = Vec::new();
                    for (ni, &snr) in snrs.iter().enumerate() {
                        let link = setup.link(scheme, order, sec.reconstruction, dp, user, snr);
                        let errors: Vec<u64> = (0..cfg.trials as u64)
                            .into_par_iter()
                            .map(|t| {
                                let key =
                                    SimRng::stream_key(&[1, si as u64, oi as u64, di as u64, u as u64, ni as u64, t]);
                                setup.trial(&link, user, &mut root.substream(key))
                            })
                            .collect::<Result<_>>()?;
                        let errors: u64 = errors.iter().sum();
                        let rec = MetricRecord::proportion(
                            coords([
                                ("scheme", scheme.label().into()),
                                ("decode_order", order_label(order).into()),
                                ("power_diff_db", dp.to_string()),
                                ("user", u.to_string()),
                                ("snr_db", snr.to_string()),
                            ]),
                            "bler",
                            errors,
                            trials,
                        );
                        let clear = rec.ci_high < sec.target_bler;
                        out.bler.push(rec);
                        points.push(ErrorPoint {
                            snr_db: snr,
                            errors,
                            trials,
                        });
                        if sec.early_stop && clear {
                            break;
                        }
                    }
                    let req = required_snr(&points, sec.target_bler).expect("grid is non-empty");
                    let rec = MetricRecord {
                        coords: coords([
                            ("scheme", scheme.label().into()),
                            ("decode_order", order_label(order).into()),
                            ("power_diff_db", dp.to_string()),
                            ("user", u.to_string()),
                        ]),
                        metric: "required_snr_db".into(),
                        value: req.value,
                        count: 0,
                        trials,
                        ci_low: req.low,
                        ci_high: req.high,
                        flag: req.flag,
                    };
                    per_user.push(rec.clone());
                    out.required.push(rec);
                }
                if let Some(worst) = per_user.iter().max_by(|a, b| a.value.total_cmp(&b.value)).cloned() {
                    let censored_high = per_user.iter().any(|r| r.flag == Flag::CensoredHigh);
                    let mut rec = worst;
                    rec.ci_low = per_user.iter().map(|r| r.ci_low).fold(f64::NEG_INFINITY, f64::max);
                    rec.ci_high = per_user.iter().map(|r| r.ci_high).fold(f64::NEG_INFINITY, f64::max);
                    if censored_high {
                        rec.flag = Flag::CensoredHigh;
                    }
                    if let Some(c) = rec.coords.iter_mut().find(|(k, _)| k == "user") {
                        c.1 = "max".into();
                    }
                    out.required.push(rec);
                }
            }
        }
    }
    Ok(out)
}
