//! Metric records, confidence intervals and required-SNR inversion.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `events` successes in `trials` Bernoulli draws.
pub fn wilson(events: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = events as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the score bounds are exactly 0 and 1 at the edges; rounding is not
    let lo = if events == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if events == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Sample mean with a normal-approximation 95% interval.
pub fn mean_interval(samples: &[f64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, mean, mean);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z95 * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Ok,
    /// Target never reached on the grid; the value is the grid maximum and a
    /// lower bound on the truth.
    CensoredHigh,
    /// Target already met at the first grid point; the value is an upper
    /// bound on the truth.
    CensoredLow,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Ok => "ok",
            Flag::CensoredHigh => "censored-high",
            Flag::CensoredLow => "censored-low",
        }
    }
}

/// One row of a result table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    /// Sweep coordinates in column order.
    pub coords: Vec<(String, String)>,
    pub metric: String,
    pub value: f64,
    /// Events behind a proportion (errors, detections); 0 otherwise.
    pub count: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub flag: Flag,
}

impl MetricRecord {
    /// Proportion `count / trials` with its Wilson interval.
    pub fn proportion(coords: Vec<(String, String)>, metric: &str, count: u64, trials: u64) -> Self {
        let (lo, hi) = wilson(count, trials, Z95);
        MetricRecord {
            coords,
            metric: metric.into(),
            value: if trials == 0 {
                f64::NAN
            } else {
                count as f64 / trials as f64
            },
            count,
            trials,
            ci_low: lo,
            ci_high: hi,
            flag: Flag::Ok,
        }
    }

    /// Mean of `samples` with a normal interval.
    pub fn mean(coords: Vec<(String, String)>, metric: &str, samples: &[f64]) -> Self {
        let (m, lo, hi) = mean_interval(samples);
        MetricRecord {
            coords,
            metric: metric.into(),
            value: m,
            count: 0,
            trials: samples.len() as u64,
            ci_low: lo,
            ci_high: hi,
            flag: Flag::Ok,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    pub fn coord(&self, name: &str) -> Option<&str> {
        self.coords.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

/// Builds a coordinate list from `(name, value)` pairs.
pub fn coords<const N: usize>(pairs: [(&str, String); N]) -> Vec<(String, String)> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Error counts at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint {
    pub snr_db: f64,
    pub errors: u64,
    pub trials: u64,
}

/// SNR at which an error-rate curve first reaches `target`, with bounds taken
/// from the Wilson curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequiredSnr {
    pub value: f64,
    pub low: f64,
    pub high: f64,
    pub flag: Flag,
}

/// First crossing of `target` by the piecewise-linear log10 curve through
/// `(x, y)`. Zeros are floored at `floor[i]` so the log stays finite.
fn first_crossing(xs: &[f64], ys: &[f64], floor: &[f64], target: f64) -> (f64, Flag) {
    let ly: Vec<f64> = ys.iter().zip(floor).map(|(&y, &f)| y.max(f).log10()).collect();
    let lt = target.log10();
    if ly[0] <= lt {
        return (xs[0], Flag::CensoredLow);
    }
    for i in 1..xs.len() {
        if ly[i] <= lt {
            let t = (ly[i - 1] - lt) / (ly[i - 1] - ly[i]);
            return (xs[i - 1] + t * (xs[i] - xs[i - 1]), Flag::Ok);
        }
    }
    (xs[xs.len() - 1], Flag::CensoredHigh)
}

/// Inverts an error-rate curve (points sorted by SNR) at `target`.
///
/// Zero-error points are read as half an error so the log interpolation
/// stays finite. The interval comes from inverting the lower and upper
/// Wilson curves; an unreached bound is censored to the grid edge.
pub fn required_snr(points: &[ErrorPoint], target: f64) -> Option<RequiredSnr> {
    if points.is_empty() {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.snr_db).collect();
    let floor: Vec<f64> = points.iter().map(|p| 0.5 / p.trials.max(1) as f64).collect();
    let rate: Vec<f64> = points
        .iter()
        .map(|p| p.errors as f64 / p.trials.max(1) as f64)
        .collect();
    let bounds: Vec<(f64, f64)> = points.iter().map(|p| wilson(p.errors, p.trials, Z95)).collect();
    let lower: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    let upper: Vec<f64> = bounds.iter().map(|b| b.1).collect();
    let (value, flag) = first_crossing(&xs, &rate, &floor, target);
    // an optimistic (lower) error curve crosses earliest
    let (low, _) = first_crossing(&xs, &lower, &floor, target);
    let (high, _) = first_crossing(&xs, &upper, &floor, target);
    Some(RequiredSnr {
        value,
        low: low.min(value),
        high: high.max(value),
        flag,
    })
}
