//! Achievable rates of both superposition schemes averaged over fading draws.
//!
//! User 1 has unit power, user 2 sits `power_diff_db` below it, and the SNR
//! is user 1's power over the noise variance. Rates are per subcarrier in
//! bits/s/Hz.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wdnoma::channel::{channel_frequency_response, draw_fading};
use wdnoma::noma::{rate_im_noma, rate_ofdm_noma, NomaConfig, Scheme};
use wdnoma::numerics::{db_to_linear, SimRng, C64};

use crate::config::{ExperimentConfig, Scenario};
use crate::error::{config_err, Result};
use crate::noma_bler::NomaSetup;
use crate::output::{line_plot_svg, write_plot, write_table, Series};
use crate::stats::{coords, MetricRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct RatesOutput {
    pub records: Vec<MetricRecord>,
}

impl RatesOutput {
    pub fn save(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let mut files = vec![write_table(dir, "rates", &self.records, cfg)?];
        let mut series: Vec<Series> = Vec::new();
        for r in self.records.iter().filter(|r| r.metric == "sum_rate") {
            let name = format!(
                "{} dP={}",
                r.coord("scheme").unwrap_or(""),
                r.coord("power_diff_db").unwrap_or("")
            );
            let x: f64 = r.coord("snr_db").and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
            match series.iter_mut().find(|(n, _)| *n == name) {
                Some((_, pts)) => pts.push((x, r.value)),
                None => series.push((name, vec![(x, r.value)])),
            }
        }
        let path = dir.join("rates.svg");
        write_plot(
            &path,
            &line_plot_svg("sum rate", "SNR (dB)", "bits/s/Hz per subcarrier", &series, false),
        )?;
        files.push(path);
        Ok(files)
    }
}

/// (r1, r2) per subcarrier for both schemes on one pair of channel draws.
fn realization(setup: &NomaSetup, ofdm: &NomaConfig, im: &NomaConfig, rng: &mut SimRng) -> Result<[[f64; 2]; 2]> {
    let mut draw = || -> Result<Vec<C64>> {
        let ch = draw_fading(setup.taps, setup.pdp_decay, rng)?;
        let cfr = channel_frequency_response(&ch, setup.ofdm.fft_size)?;
        Ok(setup.bins.iter().map(|&b| cfr[b]).collect())
    };
    let h1 = draw()?;
    let h2 = draw()?;
    let a = rate_ofdm_noma(ofdm, &h1, &h2)?;
    let b = rate_im_noma(im, &h2, None)?;
    let n = setup.bins.len() as f64;
    Ok([[a.r1 / n, a.r2 / n], [b.r1 / n, b.r2 / n]])
}

pub fn run_rates(cfg: &ExperimentConfig) -> Result<RatesOutput> {
    if cfg.scenario != Scenario::Rates {
        return config_err("run_rates needs scenario rates");
    }
    cfg.validate()?;
    let sec = cfg.rates()?;
    let setup = NomaSetup::new(cfg.full_scale, sec.taps, sec.pdp_decay)?;
    let root = SimRng::new(cfg.seed);
    let mut records = Vec::new();
    for (di, &dp) in sec.power_diff_db.values()?.iter().enumerate() {
        for (ni, &snr) in sec.snr_db.values()?.iter().enumerate() {
            let p2 = 1.0 / db_to_linear(dp);
            let nv = 1.0 / db_to_linear(snr);
            let make = |scheme| {
                let mut c = NomaConfig::new(scheme, 1.0, p2, nv);
                c.im = setup.im.clone();
                c.fft_size = setup.ofdm.fft_size;
                c
            };
            let (ofdm, im) = (make(Scheme::OfdmOfdm), make(Scheme::ImOfdm));
            let draws: Vec<[[f64; 2]; 2]> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = root.substream(SimRng::stream_key(&[4, di as u64, ni as u64, t]));
                    realization(&setup, &ofdm, &im, &mut rng)
                })
                .collect::<Result<_>>()?;
            for (si, label) in ["ofdm", "im"].iter().enumerate() {
                let at = || {
                    coords([
                        ("scheme", label.to_string()),
                        ("power_diff_db", dp.to_string()),
                        ("snr_db", snr.to_string()),
                    ])
                };
                let r1: Vec<f64> = draws.iter().map(|d| d[si][0]).collect();
                let r2: Vec<f64> = draws.iter().map(|d| d[si][1]).collect();
                let sum: Vec<f64> = draws.iter().map(|d| d[si][0] + d[si][1]).collect();
                records.push(MetricRecord::mean(at(), "r1", &r1));
                records.push(MetricRecord::mean(at(), "r2", &r2));
                records.push(MetricRecord::mean(at(), "sum_rate", &sum));
            }
        }
    }
    Ok(RatesOutput { records })
}
