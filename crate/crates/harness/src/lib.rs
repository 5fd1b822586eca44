//! Monte Carlo orchestration, metric aggregation and persistence for the
//! `sim` command line tool.
//!
//! Every runner takes an [`ExperimentConfig`], fans trials out over rayon
//! with one RNG substream per (sweep point, trial), and reduces in trial
//! order, so results do not depend on the worker count.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod config;
pub mod error;
pub mod jrc_ber;
pub mod noma_bler;
pub mod output;
pub mod radar_rd;
pub mod rates;
pub mod stats;

pub use config::{ExperimentConfig, Grid, Scenario, SchemeChoice};
pub use error::{HarnessError, Result};
pub use jrc_ber::{run_jrc_ber, JrcOutput};
pub use noma_bler::{run_noma_bler, NomaBlerOutput};
pub use radar_rd::{run_radar_rd, RadarOutput};
pub use rates::{run_rates, RatesOutput};
pub use stats::{required_snr, wilson, ErrorPoint, Flag, MetricRecord, RequiredSnr};
