use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fading::exponential_pdp;
use super::ltv::{RadarScene, RadarTarget};
use crate::error::{config_err, Error, Result};
use crate::numerics::{SimRng, C64};
use crate::SPEED_OF_LIGHT;

/// How a target's complex gain is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainSpec {
    /// Fixed gain written as `[re, im]`.
    Fixed([f64; 2]),
    /// `"rayleigh"`: CN(0, pdp power of the target index).
    /// `"pdp"`: deterministic pdp amplitude with a uniform random phase.
    Named(String),
}

impl Default for GainSpec {
    fn default() -> Self {
        GainSpec::Named("pdp".into())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub range_m: Option<f64>,
    pub delay_s: Option<f64>,
    pub velocity_mps: Option<f64>,
    pub doppler_hz: Option<f64>,
    #[serde(default)]
    pub gain: GainSpec,
}

/// Text description of a target scene.
///
/// ```toml
/// carrier_hz = 28e9
/// pdp_decay = 1.0
///
/// [[target]]
/// range_m = 29.28
/// velocity_mps = 10.0
/// gain = "rayleigh"
///
/// [[target]]
/// delay_s = 2.6e-7
/// doppler_hz = -6666.7
/// gain = [0.5, -0.2]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    #[serde(default = "default_decay")]
    pub pdp_decay: f64,
    #[serde(default, rename = "target")]
    pub targets: Vec<TargetSpec>,
}

fn default_carrier() -> f64 {
    28e9
}

fn default_decay() -> f64 {
    1.0
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self> {
        let scene: SceneFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return config_err(format!("carrier must be positive, got {}", self.carrier_hz));
        }
        for (p, t) in self.targets.iter().enumerate() {
            match (t.range_m, t.delay_s) {
                (Some(_), Some(_)) => return config_err(format!("target {p}: give range_m or delay_s, not both")),
                (None, None) => return config_err(format!("target {p}: missing range_m/delay_s")),
                _ => {}
            }
            if self.delay_of(t) < 0.0 {
                return config_err(format!("target {p}: negative delay"));
            }
            if let (Some(v), Some(f)) = (t.velocity_mps, t.doppler_hz) {
                let implied = self.carrier_hz * v / SPEED_OF_LIGHT;
                if (implied - f).abs() > 1e-6 * implied.abs().max(1.0) {
                    return config_err(format!(
                        "target {p}: doppler {f} Hz inconsistent with velocity {v} m/s ({implied} Hz)"
                    ));
                }
            }
            if let GainSpec::Named(name) = &t.gain {
                if name != "rayleigh" && name != "pdp" {
                    return config_err(format!("target {p}: unknown gain kind {name:?}"));
                }
            }
        }
        Ok(())
    }

    fn delay_of(&self, t: &TargetSpec) -> f64 {
        t.delay_s.unwrap_or_else(|| t.range_m.unwrap_or(0.0) / SPEED_OF_LIGHT)
    }

    fn doppler_of(&self, t: &TargetSpec) -> f64 {
        t.doppler_hz
            .unwrap_or_else(|| self.carrier_hz * t.velocity_mps.unwrap_or(0.0) / SPEED_OF_LIGHT)
    }

    /// Draws the random parts (gains) and returns a concrete scene.
    pub fn realize(&self, rng: &mut SimRng) -> Result<RadarScene> {
        let pdp = if self.targets.is_empty() {
            Vec::new()
        } else {
            exponential_pdp(self.targets.len(), self.pdp_decay)
        };
        let targets = self
            .targets
            .iter()
            .zip(&pdp)
            .map(|(t, &power)| {
                let gain = match &t.gain {
                    GainSpec::Fixed([re, im]) => C64::new(*re, *im),
                    GainSpec::Named(n) if n == "rayleigh" => rng.complex_gaussian(power),
                    GainSpec::Named(_) => rng.uniform_phase() * power.sqrt(),
                };
                RadarTarget {
                    delay_s: self.delay_of(t),
                    doppler_hz: self.doppler_of(t),
                    gain,
                }
            })
            .collect();
        Ok(RadarScene::new(targets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_targets() {
        let text = r#"
            carrier_hz = 28e9
            pdp_decay = 1.0
            [[target]]
            range_m = 30.0
            velocity_mps = 10.0
            gain = "rayleigh"
            [[target]]
            delay_s = 2e-7
            doppler_hz = -500.0
            gain = [0.5, -0.25]
        "#;
        let file = SceneFile::parse(text).unwrap();
        let scene = file.realize(&mut SimRng::new(1)).unwrap();
        assert_eq!(scene.len(), 2);
        assert!((scene.targets[0].delay_s - 30.0 / SPEED_OF_LIGHT).abs() < 1e-18);
        assert!((scene.targets[0].doppler_hz - 28e9 * 10.0 / SPEED_OF_LIGHT).abs() < 1e-9);
        assert_eq!(scene.targets[1].gain, C64::new(0.5, -0.25));
        assert_eq!(scene.targets[1].doppler_hz, -500.0);
    }

    #[test]
    fn pdp_gain_has_fixed_amplitude() {
        let text = "pdp_decay = 1.0\n[[target]]\ndelay_s = 0.0\n[[target]]\ndelay_s = 1e-7\n";
        let file = SceneFile::parse(text).unwrap();
        let pdp = exponential_pdp(2, 1.0);
        for seed in 0..5 {
            let scene = file.realize(&mut SimRng::new(seed)).unwrap();
            for (t, p) in scene.targets.iter().zip(&pdp) {
                assert!((t.gain.norm_sqr() - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(SceneFile::parse("[[target]]\nvelocity_mps = 1.0\n").is_err());
        assert!(SceneFile::parse("[[target]]\nrange_m = 1.0\ndelay_s = 1.0\n").is_err());
        assert!(SceneFile::parse("[[target]]\ndelay_s = -1.0\n").is_err());
        assert!(SceneFile::parse("[[target]]\ndelay_s = 1.0\ngain = \"loud\"\n").is_err());
        assert!(SceneFile::parse("[[target]]\ndelay_s = 1.0\nvelocity_mps = 10.0\ndoppler_hz = 5.0\n").is_err());
        assert!(matches!(SceneFile::parse("not toml ["), Err(Error::Parse(_))));
    }
}
