use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::SpectralField;

pub const MIN_MODES: usize = 8;
pub const NOISE_FLOOR: f64 = 1e-13;
pub const RELIABLE_R2: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadiusError {
    #[error("only {found} modes above the noise floor, need {MIN_MODES}")]
    InsufficientData { found: usize },
    #[error("sigma must be at least 1, got {0}")]
    Sigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusFit {
    pub delta_hat: f64,
    pub ln_amplitude: f64,
    pub r2: f64,
    pub modes_used: usize,
    pub reliable: bool,
}

/// Least-squares fit of `-ln|û| = δ (|kx|^{1/σ} + |ky|^{1/σ}) - ln A` over
/// `kx != 0` modes whose modulus exceeds `NOISE_FLOOR` times the largest.
pub fn radius_fit(field: &SpectralField, sigma: f64) -> Result<RadiusFit, RadiusError> {
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(RadiusError::Sigma(sigma));
    }
    let grid = field.grid();
    let floor = NOISE_FLOOR * field.max_abs();
    let p = 1.0 / sigma;
    let mut pts = Vec::new();
    for ix in 0..grid.nx {
        if grid.kx_index(ix) == 0 {
            continue;
        }
        for iy in 0..grid.ny {
            let a = field.modes()[ix * grid.ny + iy].norm();
            if a > floor && a > 0.0 {
                let x = grid.kx(ix).abs().powf(p) + grid.ky(iy).abs().powf(p);
                pts.push((x, -a.ln()));
            }
        }
    }
    if pts.len() < MIN_MODES {
        return Err(RadiusError::InsufficientData { found: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(RadiusError::InsufficientData { found: 1 });
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(RadiusFit {
        delta_hat: slope,
        ln_amplitude: -(my - slope * mx),
        r2,
        modes_used: pts.len(),
        reliable: r2 >= RELIABLE_R2,
    })
}
