//! Weighted Fourier norms of fields and trajectories.
//!
//! Sums run over the discrete modes and are scaled by `Lx Ly` so that the
//! unweighted case equals `∫ u^2` on the torus.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::{omega, PhaseConvention};
use crate::field::{Grid, SpectralField};
use crate::solver::Trajectory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("weight at (kx, ky) = ({kx}, {ky}) exceeds the float range")]
    Overflow { kx: i64, ky: i64 },
    #[error("trajectory needs at least {needed} snapshots, found {found}")]
    TooFewSnapshots { needed: usize, found: usize },
    #[error("snapshot times are not uniformly spaced")]
    NonUniform,
    #[error("snapshots live on different grids")]
    GridMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyWeight {
    pub delta: f64,
    pub sigma: f64,
    pub s1: f64,
    pub s2: f64,
}

impl GevreyWeight {
    pub fn sobolev(s1: f64, s2: f64) -> Self {
        GevreyWeight {
            delta: 0.0,
            sigma: 1.0,
            s1,
            s2,
        }
    }

    /// `ln` of `e^{2δ(|kx|^{1/σ}+|ky|^{1/σ})} <kx>^{2 s1} <ky>^{2 s2}`.
    pub fn ln_weight(&self, kx: f64, ky: f64) -> f64 {
        let p = 1.0 / self.sigma;
        2.0 * self.delta * (kx.abs().powf(p) + ky.abs().powf(p))
            + self.s1 * (1.0 + kx * kx).ln()
            + self.s2 * (1.0 + ky * ky).ln()
    }
}

fn mode_weights(grid: &Grid, w: &GevreyWeight) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            out.push(w.ln_weight(grid.kx(ix), grid.ky(iy)).exp());
        }
    }
    out
}

fn overflow_at(grid: &Grid, i: usize) -> NormError {
    NormError::Overflow {
        kx: grid.kx_index(i / grid.ny),
        ky: grid.ky_index(i % grid.ny),
    }
}

pub fn gevrey_norm(field: &SpectralField, weight: &GevreyWeight) -> Result<f64, NormError> {
    let grid = field.grid();
    let weights = mode_weights(grid, weight);
    let mut sum = 0.0;
    for (i, (m, w)) in field.modes().iter().zip(&weights).enumerate() {
        let a = m.norm_sqr();
        if a == 0.0 {
            continue;
        }
        let term = w * a;
        if !term.is_finite() {
            return Err(overflow_at(grid, i));
        }
        sum += term;
    }
    let total = grid.lx * grid.ly * sum;
    if !total.is_finite() {
        return Err(NormError::Overflow { kx: 0, ky: 0 });
    }
    Ok(total.sqrt())
}

/// Symmetric Hann window of length `n`.
pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / (n - 1) as f64).cos()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BourgainParams {
    pub weight: GevreyWeight,
    pub b: f64,
    pub alpha_c: f64,
    pub convention: PhaseConvention,
}

impl BourgainParams {
    pub const DEFAULT_B: f64 = 0.6;
}

fn uniform_step(times: &[f64]) -> Result<f64, NormError> {
    let dt = times[1] - times[0];
    let tol = 1e-9 * dt.abs().max(f64::MIN_POSITIVE);
    if dt == 0.0 || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > tol) {
        return Err(NormError::NonUniform);
    }
    Ok(dt.abs())
}

/// Windowed space-time norm with weight `<τ - p(k)>^{2b}` on top of the
/// Gevrey weight, `p` the phase of the chosen convention. Each mode's time
/// series is demodulated by `e^{-i ω t}` before the time transform, so the
/// transform variable is `τ - ω` and fast phases never alias.
pub fn bourgain_norm(traj: &Trajectory, params: &BourgainParams) -> Result<f64, NormError> {
    let nt = traj.snapshots.len();
    if nt < 2 {
        return Err(NormError::TooFewSnapshots {
            needed: 2,
            found: nt,
        });
    }
    let grid = *traj.snapshots[0].grid();
    if traj.snapshots.iter().any(|s| *s.grid() != grid) {
        return Err(NormError::GridMismatch);
    }
    let dt = uniform_step(&traj.times)?;
    let window = hann(nt);
    let fft = FftPlanner::new().plan_fft_forward(nt);
    let freq: Vec<f64> = (0..nt)
        .map(|m| 2.0 * PI * Grid::signed(m, nt) as f64 / (nt as f64 * dt))
        .collect();
    let weights = mode_weights(&grid, &params.weight);
    let mut sum = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); nt];
    for ix in 0..grid.nx {
        if grid.kx_index(ix) == 0 {
            continue;
        }
        let kx = grid.kx(ix);
        for iy in 0..grid.ny {
            let i = ix * grid.ny + iy;
            let ky = grid.ky(iy);
            let w = omega(kx, ky, params.alpha_c);
            let p = params.convention.phase(kx, ky, params.alpha_c);
            let mut any = false;
            for (n, slot) in buf.iter_mut().enumerate() {
                let z = traj.snapshots[n].modes()[i];
                any |= z != Complex64::new(0.0, 0.0);
                *slot = z * Complex64::from_polar(window[n], -w * traj.times[n]);
            }
            if !any {
                continue;
            }
            fft.process(&mut buf);
            let mut mode_sum = 0.0;
            for (z, s) in buf.iter().zip(&freq) {
                let shift = s + w - p;
                mode_sum += (1.0 + shift * shift).powf(params.b) * z.norm_sqr();
            }
            let term = weights[i] * mode_sum;
            if !term.is_finite() {
                return Err(overflow_at(&grid, i));
            }
            sum += term;
        }
    }
    let total = grid.lx * grid.ly * dt / nt as f64 * sum;
    if !total.is_finite() {
        return Err(NormError::Overflow { kx: 0, ky: 0 });
    }
    Ok(total.sqrt())
}
