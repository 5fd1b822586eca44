//! Least-squares target gains from the interference-free first chirp.

use nalgebra::{DMatrix, DVector};

use crate::error::{config_err, Error, Result};
use crate::numerics::C64;

/// Least-squares solution with the statistics needed to test each gain.
#[derive(Debug, Clone, PartialEq)]
pub struct LsFit {
    pub gains: Vec<C64>,
    /// `|y - B h|^2` over the window.
    pub residual_energy: f64,
    /// Window length minus the number of gains.
    pub dof: usize,
    /// Diagonal of `(B^H B)^-1`: each gain's variance per unit noise.
    pub variance_factors: Vec<f64>,
}

impl LsFit {
    /// Noise variance estimated from the residual.
    pub fn noise_estimate(&self) -> f64 {
        if self.dof == 0 {
            return f64::NAN;
        }
        self.residual_energy / self.dof as f64
    }

    /// `|h_p|^2 / var(h_p)` with the noise taken from the residual.
    pub fn significance(&self) -> Vec<f64> {
        let nv = self.noise_estimate();
        self.gains
            .iter()
            .zip(&self.variance_factors)
            .map(|(g, v)| g.norm_sqr() / (nv * v))
            .collect()
    }
}

/// Solves `min |y - B h|` over the window `[offset, N_c)` of the first chirp,
/// where column `p` of `B` is `reference` delayed by `delays[p]` samples and,
/// when `dopplers` (cycles/sample) are given, rotated by the target's Doppler
/// ramp. `reference` is the transmitted chirp including its amplitude.
///
/// The solve goes through a QR factorisation of `B`.
pub fn estimate_gains(
    y_first_chirp: &[C64],
    reference: &[C64],
    delays: &[usize],
    dopplers: Option<&[f64]>,
    offset: usize,
) -> Result<Vec<C64>> {
    Ok(fit_gains(y_first_chirp, reference, delays, dopplers, offset)?.gains)
}

/// [`estimate_gains`] with residual and per-gain variance factors.
pub fn fit_gains(
    y_first_chirp: &[C64],
    reference: &[C64],
    delays: &[usize],
    dopplers: Option<&[f64]>,
    offset: usize,
) -> Result<LsFit> {
    let nc = reference.len();
    let p = delays.len();
    if p == 0 {
        return Ok(LsFit {
            gains: Vec::new(),
            residual_energy: crate::numerics::energy(
                &y_first_chirp[offset.min(y_first_chirp.len())..nc.min(y_first_chirp.len())],
            ),
            dof: nc.saturating_sub(offset),
            variance_factors: Vec::new(),
        });
    }
    if y_first_chirp.len() < nc {
        return config_err(format!(
            "first chirp has {} samples, expected {nc}",
            y_first_chirp.len()
        ));
    }
    if let Some(d) = dopplers {
        if d.len() != p {
            return config_err("one Doppler value per delay expected");
        }
    }
    if offset >= nc || nc - offset < p {
        return config_err(format!("window [{offset}, {nc}) too short for {p} unknown gains"));
    }
    for i in 0..p {
        for j in i + 1..p {
            if delays[i] == delays[j] {
                return config_err(format!(
                    "targets {i} and {j} share delay {} samples, gains are not separable",
                    delays[i]
                ));
            }
        }
    }
    let rows = nc - offset;
    let b = DMatrix::from_fn(rows, p, |r, c| {
        let n = offset + r;
        if n < delays[c] {
            return C64::new(0.0, 0.0);
        }
        let v = reference[n - delays[c]];
        match dopplers {
            Some(d) if d[c] != 0.0 => {
                v * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (d[c] * n as f64).rem_euclid(1.0))
            }
            _ => v,
        }
    });
    let y = DVector::from_column_slice(&y_first_chirp[offset..nc]);
    let qr = b.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if let Some(i) = (0..p).find(|&i| r[(i, i)].norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE)) {
        return config_err(format!(
            "target {i} is not separable from the others inside the estimation window"
        ));
    }
    let qhy = qr.q().adjoint() * &y;
    let h = r
        .solve_upper_triangular(&qhy)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let residual_energy = (&y - &b * &h).norm_squared();
    // (B^H B)^-1 = R^-1 R^-H, so its diagonal holds the squared row norms of R^-1
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Numerical("triangular inverse failed".into()))?;
    let variance_factors = (0..p).map(|i| r_inv.row(i).norm_squared()).collect();
    Ok(LsFit {
        gains: h.iter().copied().collect(),
        residual_energy,
        dof: rows - p,
        variance_factors,
    })
}
