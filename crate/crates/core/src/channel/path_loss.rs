use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Linear transmit antenna gain.
    pub tx_gain: f64,
    /// Linear receive antenna gain.
    pub rx_gain: f64,
    pub wavelength_m: f64,
    pub distance_m: f64,
    pub exponent: f64,
}

/// Large-scale gain `G_tx G_rx lambda^2 / ((4 pi)^2 d^PL)`.
pub fn path_loss(params: &PathLossParams) -> Result<f64> {
    if !(params.distance_m > 0.0) {
        return config_err(format!("distance must be positive, got {}", params.distance_m));
    }
    if params.exponent < 2.0 {
        log::warn!("path-loss exponent {} is below free space", params.exponent);
    }
    Ok(params.tx_gain * params.rx_gain * params.wavelength_m.powi(2)
        / ((4.0 * PI).powi(2) * params.distance_m.powf(params.exponent)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SPEED_OF_LIGHT;

    fn params(wavelength_m: f64, distance_m: f64) -> PathLossParams {
        PathLossParams {
            tx_gain: 1.0,
            rx_gain: 1.0,
            wavelength_m,
            distance_m,
            exponent: 2.0,
        }
    }

    #[test]
    fn constants_cancel() {
        assert!((path_loss(&params(4.0 * PI, 1.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_square() {
        let g1 = path_loss(&params(0.1, 10.0)).unwrap();
        let g2 = path_loss(&params(0.1, 20.0)).unwrap();
        assert!((g1 / g2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mmwave_value() {
        let lambda = SPEED_OF_LIGHT / 28e9;
        assert!((lambda - 0.010707).abs() < 1e-5);
        let g = path_loss(&params(lambda, 100.0)).unwrap();
        // lambda^2 / (16 pi^2 * 1e4)
        let expected = 0.010707f64.powi(2) / (16.0 * PI * PI * 1e4);
        assert!((expected - 7.26e-11).abs() < 0.01e-11);
        assert!((g - expected).abs() / expected < 1e-3, "{g}");
    }

    #[test]
    fn non_positive_distance_rejected() {
        assert!(path_loss(&params(0.1, 0.0)).is_err());
        assert!(path_loss(&params(0.1, -3.0)).is_err());
    }
}
