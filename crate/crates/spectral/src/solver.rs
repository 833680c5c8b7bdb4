//! Integrating-factor RK4 for the fifth-order KP-I equation on the torus.
//!
//! The linear part is propagated exactly by `e^{i ω h}`; the nonlinear term
//! `-½ d_x(u^2)` is evaluated pseudo-spectrally with a dealiasing mask.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::omega;
use crate::fft::Fft2;
use crate::field::{Grid, SpectralField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),
    #[error("dealias fraction must lie in (0, 1], got {0}")]
    Dealias(f64),
    #[error("horizon must be finite, got {0}")]
    Horizon(f64),
    #[error("snapshot interval must be at least one step")]
    SnapshotEvery,
    #[error("initial field has a nonzero x-mean (residual {0:e})")]
    NonzeroMean(f64),
    #[error("solution blew up after t = {last_valid_time}")]
    BlowUp { last_valid_time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    /// Signed horizon; negative values integrate backwards.
    pub t_end: f64,
    pub alpha_c: f64,
    pub dealias_fraction: f64,
    pub nonlinear: bool,
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-4,
            t_end: 0.1,
            alpha_c: 0.0,
            dealias_fraction: 2.0 / 3.0,
            nonlinear: true,
            snapshot_every: 100,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::TimeStep(self.dt));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(SolverError::Dealias(self.dealias_fraction));
        }
        if !self.t_end.is_finite() {
            return Err(SolverError::Horizon(self.t_end));
        }
        if self.snapshot_every == 0 {
            return Err(SolverError::SnapshotEvery);
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end.abs() / self.dt).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
    /// Largest pre-enforcement `|û(0, ky)|` of each step.
    pub mean_residuals: Vec<f64>,
}

impl Trajectory {
    pub fn l2_series(&self) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(SpectralField::l2_squared)
            .collect()
    }

    pub fn last(&self) -> &SpectralField {
        self.snapshots
            .last()
            .expect("trajectory holds the initial field")
    }

    pub fn max_mean_residual(&self) -> f64 {
        self.mean_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Precomputed per-mode data for one grid and configuration.
pub struct Stepper {
    grid: Grid,
    fft: Fft2,
    /// `e^{i ω h / 2}`
    half: Vec<Complex64>,
    /// `-½ i kx` on retained modes, zero elsewhere
    deriv: Vec<Complex64>,
    mask: Vec<bool>,
    h: f64,
    nonlinear: bool,
}

impl Stepper {
    pub fn new(grid: Grid, config: &SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let h = config.dt * config.t_end.signum();
        let cut_x = (config.dealias_fraction * (grid.nx / 2) as f64).floor() as i64;
        let cut_y = (config.dealias_fraction * (grid.ny / 2) as f64).floor() as i64;
        let mut half = Vec::with_capacity(grid.len());
        let mut deriv = Vec::with_capacity(grid.len());
        let mut mask = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                let (kx, ky) = (grid.kx(ix), grid.ky(iy));
                let w = omega(kx, ky, config.alpha_c);
                half.push(Complex64::from_polar(1.0, w * h / 2.0));
                let keep = grid.kx_index(ix).abs() <= cut_x
                    && grid.ky_index(iy).abs() <= cut_y
                    && !grid.is_nyquist(ix, iy);
                mask.push(keep);
                deriv.push(if keep {
                    Complex64::new(0.0, -0.5 * kx)
                } else {
                    Complex64::new(0.0, 0.0)
                });
            }
        }
        Ok(Stepper {
            grid,
            fft: Fft2::new(grid.nx, grid.ny),
            half,
            deriv,
            mask,
            h,
            nonlinear: config.nonlinear,
        })
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.mask
    }

    /// `N(v) = -½ i kx FFT(u^2)` with `u` built from the retained modes of `v`.
    fn nonlinear_term(&self, v: &[Complex64]) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![Complex64::new(0.0, 0.0); v.len()];
        }
        let mut buf: Vec<Complex64> = v
            .iter()
            .zip(&self.mask)
            .map(|(z, &m)| if m { *z } else { Complex64::new(0.0, 0.0) })
            .collect();
        self.fft.inverse(&mut buf);
        for z in &mut buf {
            *z = Complex64::new(z.re * z.re, 0.0);
        }
        self.fft.forward(&mut buf);
        let scale = 1.0 / self.grid.len() as f64;
        for (z, d) in buf.iter_mut().zip(&self.deriv) {
            *z *= d * scale;
        }
        buf
    }

    /// One step of size `h`; returns the pre-enforcement x-mean residual.
    pub fn step(&self, field: &mut SpectralField) -> f64 {
        let h = self.h;
        let u = field.modes().to_vec();
        let e = &self.half;
        let k1 = self.nonlinear_term(&u);
        let a: Vec<Complex64> = (0..u.len())
            .map(|i| e[i] * (u[i] + k1[i] * (h / 2.0)))
            .collect();
        let k2 = self.nonlinear_term(&a);
        let b: Vec<Complex64> = (0..u.len())
            .map(|i| e[i] * u[i] + k2[i] * (h / 2.0))
            .collect();
        let k3 = self.nonlinear_term(&b);
        let c: Vec<Complex64> = (0..u.len())
            .map(|i| e[i] * e[i] * u[i] + e[i] * k3[i] * h)
            .collect();
        let k4 = self.nonlinear_term(&c);
        let out = field.modes_mut();
        for i in 0..u.len() {
            let e2 = e[i] * e[i];
            out[i] = e2 * u[i] + (e2 * k1[i] + 2.0 * e[i] * (k2[i] + k3[i]) + k4[i]) * (h / 6.0);
        }
        field.enforce_zero_mean()
    }
}

pub fn evolve(field: &SpectralField, config: &SolverConfig) -> Result<Trajectory, SolverError> {
    let stepper = Stepper::new(*field.grid(), config)?;
    let residual = field.x_mean_residual();
    if residual > 0.0 {
        return Err(SolverError::NonzeroMean(residual));
    }
    let steps = config.steps();
    let h = config.dt * config.t_end.signum();
    let mut current = field.clone();
    let mut traj = Trajectory {
        config: *config,
        times: vec![0.0],
        snapshots: vec![field.clone()],
        mean_residuals: Vec::with_capacity(steps),
    };
    let blow_up = 1e150;
    for n in 1..=steps {
        let r = stepper.step(&mut current);
        traj.mean_residuals.push(r);
        if !current.is_finite() || current.max_abs() > blow_up {
            return Err(SolverError::BlowUp {
                last_valid_time: (n - 1) as f64 * h,
            });
        }
        if n % config.snapshot_every == 0 || n == steps {
            traj.times.push(n as f64 * h);
            traj.snapshots.push(current.clone());
        }
    }
    Ok(traj)
}
