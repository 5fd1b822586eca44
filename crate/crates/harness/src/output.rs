//! Result persistence: CSV tables with JSON sidecars, raw IQ, and SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use wdnoma::numerics::ComplexSignal;
use wdnoma::radar::RangeDopplerMap;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::stats::MetricRecord;

const FIXED_COLUMNS: [&str; 7] = ["metric", "value", "count", "trials", "ci_low", "ci_high", "flag"];

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Numerical(e.to_string()))?;
    write_file(path, text.as_bytes())
}

/// Renders `records` as CSV. Coordinate columns come from the first record.
pub fn records_csv(records: &[MetricRecord]) -> Result<String> {
    let names: Vec<String> = records
        .first()
        .map(|r| r.coords.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = names.iter().map(String::as_str).chain(FIXED_COLUMNS).collect();
    let csv_err = |e: csv::Error| HarnessError::Numerical(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row: Vec<String> = names.iter().map(|n| r.coord(n).unwrap_or("").to_string()).collect();
        row.extend([
            r.metric.clone(),
            r.value.to_string(),
            r.count.to_string(),
            r.trials.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.flag.as_str().to_string(),
        ]);
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Numerical(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    table: &'a str,
    config_hash: String,
    rows: usize,
    columns: Vec<String>,
    config: &'a ExperimentConfig,
}

/// Writes `<stem>.csv` and a `<stem>.json` sidecar holding the resolved
/// config and its hash.
pub fn write_table(dir: &Path, stem: &str, records: &[MetricRecord], cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{stem}.csv"));
    write_file(&path, records_csv(records)?.as_bytes())?;
    let columns = records
        .first()
        .map(|r| r.coords.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>())
        .unwrap_or_default()
        .into_iter()
        .chain(FIXED_COLUMNS.iter().map(|s| s.to_string()))
        .collect();
    let sidecar = Sidecar {
        table: stem,
        config_hash: cfg.hash(),
        rows: records.len(),
        columns,
        config: cfg,
    };
    write_json(&dir.join(format!("{stem}.json")), &sidecar)?;
    Ok(path)
}

#[derive(Serialize)]
struct IqHeader {
    format: &'static str,
    sample_rate: f64,
    samples: usize,
}

/// Interleaved little-endian float32 I/Q plus a JSON header.
pub fn write_iq(dir: &Path, stem: &str, signal: &ComplexSignal) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let mut bytes = Vec::with_capacity(signal.len() * 8);
    for s in signal.samples() {
        bytes.extend((s.re as f32).to_le_bytes());
        bytes.extend((s.im as f32).to_le_bytes());
    }
    let path = dir.join(format!("{stem}.cf32"));
    write_file(&path, &bytes)?;
    let header = IqHeader {
        format: "cf32le",
        sample_rate: signal.sample_rate(),
        samples: signal.len(),
    };
    write_json(&dir.join(format!("{stem}.cf32.json")), &header)?;
    Ok(path)
}

/// Power in dB relative to the map median, floored at -60 dB.
fn relative_db(map: &RangeDopplerMap, m: usize, n: usize) -> f64 {
    let med = map.median().max(1e-300);
    (10.0 * (map.get(m, n) / med).log10()).max(-60.0)
}

/// Range-Doppler map as `doppler_bin,range_bin,power_db` rows (signed Doppler,
/// dB over the median), plus an SVG heatmap.
pub fn write_rd_map(dir: &Path, stem: &str, map: &RangeDopplerMap) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let mut rows: Vec<(i64, usize, f64)> = Vec::with_capacity(map.as_slice().len());
    for m in 0..map.doppler_bins() {
        for n in 0..map.range_bins() {
            rows.push((map.signed_doppler(m), map.range_bin(n), relative_db(map, m, n)));
        }
    }
    rows.sort_by_key(|r| (r.0, r.1));
    let mut text = String::from("doppler_bin,range_bin,power_db\n");
    for (d, r, p) in &rows {
        let _ = writeln!(text, "{d},{r},{p}");
    }
    let path = dir.join(format!("{stem}.csv"));
    write_file(&path, text.as_bytes())?;
    write_file(&dir.join(format!("{stem}.svg")), heatmap_svg(map, &rows).as_bytes())?;
    Ok(path)
}

fn heatmap_svg(map: &RangeDopplerMap, rows: &[(i64, usize, f64)]) -> String {
    let (nd, nr) = (map.doppler_bins(), map.range_bins());
    let cell = 6.0;
    let (left, top) = (50.0, 20.0);
    let width = left + nr as f64 * cell + 20.0;
    let height = top + nd as f64 * cell + 40.0;
    let lo = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);
    let dmin = rows.iter().map(|r| r.0).min().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    for &(d, r, p) in rows {
        let v = ((p - lo) / span * 255.0).round() as u8;
        let x = left + r as f64 * cell;
        let y = top + (d - dmin) as f64 * cell;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="rgb({v},{},{})"/>"#,
            v / 2,
            255 - v
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="{}">range bin (0..{nr})</text>"#,
        height - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="4" y="{}" transform="rotate(-90 12 {})">doppler bin</text>"#,
        top + 60.0,
        top + 60.0
    );
    s.push_str("</svg>\n");
    s
}

/// Named (x, y) series for [`line_plot_svg`].
pub type Series = (String, Vec<(f64, f64)>);

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Minimal line plot. With `log_y` non-positive values are dropped.
pub fn line_plot_svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_y: bool) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 170.0, 30.0, 50.0);
    let tf = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|(_, p)| {
            p.iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || *y > 0.0))
                .map(|&(x, y)| (x, tf(y)))
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let ylab = if log_y {
            format!("1e{fy:.1}")
        } else {
            format!("{fy:.3}")
        };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{fx:.1}</text>"#,
            sx(fx),
            top + ph + 15.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{ylab}</text>"#,
            left - 4.0,
            sy(fy) + 4.0
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{ylabel}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, ((name, _), p)) in series.iter().zip(&pts).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = top + 14.0 * i as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            w - right + 10.0,
            w - right + 30.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{name}</text>"#, w - right + 34.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_plot(path: &Path, svg: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        ensure_dir(dir)?;
    }
    write_file(path, svg.as_bytes())
}
