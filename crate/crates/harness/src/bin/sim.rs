use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wdnoma::noma::DecodeOrder;
use wdnoma_harness::config::{RadarSection, SceneSource};
use wdnoma_harness::{
    run_jrc_ber, run_noma_bler, run_radar_rd, run_rates, ExperimentConfig, Grid, HarnessError, Result, Scenario,
    SchemeChoice,
};

#[derive(Parser)]
#[command(
    name = "sim",
    about = "Waveform-domain NOMA and joint radar-communication simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML); scenario defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the full 2048-point / 122.88 MHz parameter set.
    #[arg(long)]
    full_scale: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    U1,
    U2,
    Auto,
}

impl From<OrderArg> for DecodeOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::U1 => DecodeOrder::User1First,
            OrderArg::U2 => DecodeOrder::User2First,
            OrderArg::Auto => DecodeOrder::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// BLER and required SNR of the two-user SIC receiver.
    NomaBler {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<SchemeChoice>,
        #[arg(long)]
        decode_order: Option<OrderArg>,
    },
    /// Range-Doppler map and detection statistics.
    RadarRd {
        #[command(flatten)]
        common: Common,
        /// Scene file (TOML).
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long)]
        snr_db: Option<f64>,
        /// Extract exactly this many peaks instead of thresholding.
        #[arg(long)]
        max_targets: Option<usize>,
        #[arg(long)]
        export_iq: bool,
    },
    /// Coded BER of the radar-aided receiver against perfect CSI.
    JrcBer {
        #[command(flatten)]
        common: Common,
        /// SNR sweep as start:stop:step in dB.
        #[arg(long)]
        snr_db_range: Option<String>,
        #[arg(long)]
        scene: Option<PathBuf>,
    },
    /// Achievable-rate tables.
    Rates {
        #[command(flatten)]
        common: Common,
    },
}

fn base_config(scenario: Scenario, common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::with_defaults(scenario),
    };
    if cfg.scenario != scenario {
        return Err(HarnessError::Config(format!(
            "config is for scenario {:?}, command wants {:?}",
            cfg.scenario, scenario
        )));
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    cfg.full_scale |= common.full_scale;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig, default: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| Path::new("results").join(default))
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::NomaBler {
            common,
            scheme,
            decode_order,
        } => {
            let mut cfg = base_config(Scenario::NomaBler, &common)?;
            if let Some(n) = cfg.noma.as_mut() {
                if let Some(s) = scheme {
                    n.schemes = vec![s];
                }
                if let Some(o) = decode_order {
                    n.decode_orders = vec![o.into()];
                }
            }
            cfg.validate()?;
            let out = run_noma_bler(&cfg)?;
            for r in out.required.iter().filter(|r| r.coord("user") == Some("max")) {
                println!(
                    "{} {} dP={} dB: required SNR {:.2} dB [{:.2}, {:.2}] {}",
                    r.coord("scheme").unwrap_or(""),
                    r.coord("decode_order").unwrap_or(""),
                    r.coord("power_diff_db").unwrap_or(""),
                    r.value,
                    r.ci_low,
                    r.ci_high,
                    r.flag.as_str()
                );
            }
            report(&out.save(&out_dir(&cfg, "noma-bler"), &cfg)?);
        }
        Command::RadarRd {
            common,
            scene,
            snr_db,
            max_targets,
            export_iq,
        } => {
            let mut cfg = base_config(Scenario::RadarRd, &common)?;
            let sec = cfg.radar.get_or_insert_with(RadarSection::default);
            if let Some(s) = scene {
                sec.scene = Some(SceneSource::Path(s));
            }
            if let Some(s) = snr_db {
                sec.snr_db = s;
            }
            if max_targets.is_some() {
                sec.max_targets = max_targets;
            }
            sec.export_iq |= export_iq;
            cfg.inline_scenes(Path::new("."))?;
            let out = run_radar_rd(&cfg)?;
            for r in &out.records {
                println!("{}: {:.4} [{:.4}, {:.4}]", r.metric, r.value, r.ci_low, r.ci_high);
            }
            report(&out.save(&out_dir(&cfg, "radar-rd"), &cfg)?);
        }
        Command::JrcBer {
            common,
            snr_db_range,
            scene,
        } => {
            let mut cfg = base_config(Scenario::JrcBer, &common)?;
            if let Some(j) = cfg.jrc.as_mut() {
                if let Some(r) = snr_db_range {
                    j.snr_db = Grid::parse_range(&r)?;
                }
                if let Some(s) = scene {
                    j.scene = Some(SceneSource::Path(s));
                }
            }
            cfg.inline_scenes(Path::new("."))?;
            let out = run_jrc_ber(&cfg)?;
            for r in &out.summary {
                println!(
                    "{} {}: {:.2} dB [{:.2}, {:.2}] {}",
                    r.coord("pipeline").unwrap_or(""),
                    r.metric,
                    r.value,
                    r.ci_low,
                    r.ci_high,
                    r.flag.as_str()
                );
            }
            report(&out.save(&out_dir(&cfg, "jrc-ber"), &cfg)?);
        }
        Command::Rates { common } => {
            let cfg = base_config(Scenario::Rates, &common)?;
            let out = run_rates(&cfg)?;
            println!("{} rate records", out.records.len());
            report(&out.save(&out_dir(&cfg, "rates"), &cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
