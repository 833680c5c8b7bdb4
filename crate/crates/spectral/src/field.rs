//! Fourier-mode fields on the torus `[0, Lx) x [0, Ly)`.
//!
//! Modes are stored kx-major: `modes[ix * ny + iy]`, where index `i` stands
//! for the signed wavenumber `i` (for `i <= N/2`) or `i - N`. Coefficients are
//! normalised so that `u(x, y) = sum û(k) e^{i(kx x + ky y)}`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fft::Fft2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("domain length {0} must be positive and finite")]
    BadLength(f64),
    #[error("expected {expected} modes, found {found}")]
    Shape { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, FieldError> {
        for n in [nx, ny] {
            if n < 2 || !n.is_power_of_two() {
                return Err(FieldError::NotPowerOfTwo(n));
            }
        }
        for l in [lx, ly] {
            if !(l.is_finite() && l > 0.0) {
                return Err(FieldError::BadLength(l));
            }
        }
        Ok(Grid { nx, ny, lx, ly })
    }

    /// `2π`-periodic in both directions.
    pub fn periodic(nx: usize, ny: usize) -> Result<Self, FieldError> {
        Grid::new(nx, ny, 2.0 * PI, 2.0 * PI)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn signed(i: usize, n: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn kx_index(&self, ix: usize) -> i64 {
        Grid::signed(ix, self.nx)
    }

    pub fn ky_index(&self, iy: usize) -> i64 {
        Grid::signed(iy, self.ny)
    }

    pub fn kx(&self, ix: usize) -> f64 {
        2.0 * PI / self.lx * self.kx_index(ix) as f64
    }

    pub fn ky(&self, iy: usize) -> f64 {
        2.0 * PI / self.ly * self.ky_index(iy) as f64
    }

    pub fn is_nyquist(&self, ix: usize, iy: usize) -> bool {
        ix == self.nx / 2 || iy == self.ny / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    modes: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            modes: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_modes(grid: Grid, modes: Vec<Complex64>) -> Result<Self, FieldError> {
        if modes.len() != grid.len() {
            return Err(FieldError::Shape {
                expected: grid.len(),
                found: modes.len(),
            });
        }
        Ok(SpectralField { grid, modes })
    }

    /// Modes from a function of the signed integer wavenumbers.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(i64, i64) -> Complex64) -> Self {
        let mut modes = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                modes.push(f(grid.kx_index(ix), grid.ky_index(iy)));
            }
        }
        SpectralField { grid, modes }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Complex64] {
        &mut self.modes
    }

    pub fn into_modes(self) -> Vec<Complex64> {
        self.modes
    }

    fn index(&self, kx: i64, ky: i64) -> usize {
        let ix = kx.rem_euclid(self.grid.nx as i64) as usize;
        let iy = ky.rem_euclid(self.grid.ny as i64) as usize;
        ix * self.grid.ny + iy
    }

    pub fn get(&self, kx: i64, ky: i64) -> Complex64 {
        self.modes[self.index(kx, ky)]
    }

    pub fn set(&mut self, kx: i64, ky: i64, v: Complex64) {
        let i = self.index(kx, ky);
        self.modes[i] = v;
    }

    /// Makes the field real: modes with `ky > 0`, or `ky = 0` and `kx > 0`,
    /// are kept and their partners at `-k` overwritten with the conjugate.
    /// Nyquist rows and columns are zeroed and the `k = 0` mode made real.
    pub fn enforce_hermitian(&mut self) {
        let g = self.grid;
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                let i = ix * g.ny + iy;
                if g.is_nyquist(ix, iy) {
                    self.modes[i] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let (kx, ky) = (g.kx_index(ix), g.ky_index(iy));
                if ky > 0 || (ky == 0 && kx > 0) {
                    let partner = self.index(-kx, -ky);
                    self.modes[partner] = self.modes[i].conj();
                } else if kx == 0 && ky == 0 {
                    self.modes[i].im = 0.0;
                }
            }
        }
    }

    /// Largest `|û(0, ky)|`.
    pub fn x_mean_residual(&self) -> f64 {
        (0..self.grid.ny)
            .map(|iy| self.modes[iy].norm())
            .fold(0.0, f64::max)
    }

    /// Zeroes the `kx = 0` column; returns the residual it removed.
    pub fn enforce_zero_mean(&mut self) -> f64 {
        let r = self.x_mean_residual();
        for m in &mut self.modes[..self.grid.ny] {
            *m = Complex64::new(0.0, 0.0);
        }
        r
    }

    /// `∫ u^2 = Lx Ly sum |û|^2`.
    pub fn l2_squared(&self) -> f64 {
        self.grid.lx * self.grid.ly * self.modes.iter().map(|m| m.norm_sqr()).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.modes
            .iter()
            .all(|m| m.re.is_finite() && m.im.is_finite())
    }

    /// Grid values `u[ix * ny + iy]` at `x = ix Lx / Nx`, `y = iy Ly / Ny`.
    pub fn to_physical(&self, fft: &Fft2) -> Vec<Complex64> {
        let mut buf = self.modes.clone();
        fft.inverse(&mut buf);
        buf
    }

    pub fn from_physical(grid: Grid, values: &[f64], fft: &Fft2) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::Shape {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut buf);
        let scale = 1.0 / grid.len() as f64;
        for b in &mut buf {
            *b *= scale;
        }
        Ok(SpectralField { grid, modes: buf })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::periodic(128, 64).is_ok());
        assert_eq!(Grid::periodic(100, 64), Err(FieldError::NotPowerOfTwo(100)));
        assert!(matches!(
            Grid::new(8, 8, -1.0, 1.0),
            Err(FieldError::BadLength(_))
        ));
    }

    #[test]
    fn signed_indices() {
        let g = Grid::periodic(8, 4).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.kx_index(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        let g = Grid::new(8, 4, PI, 2.0 * PI).unwrap();
        assert_eq!(g.kx(1), 2.0);
    }

    #[test]
    fn hermitian_makes_real() {
        let g = Grid::periodic(16, 8).unwrap();
        let fft = Fft2::new(16, 8);
        let mut f = SpectralField::from_fn(g, |kx, ky| {
            Complex64::new((kx * 3 + ky) as f64 * 0.1, (kx - 2 * ky) as f64 * 0.05)
        });
        f.enforce_hermitian();
        assert_eq!(f.get(2, 1), f.get(-2, -1).conj());
        assert_eq!(f.get(8, 0), Complex64::new(0.0, 0.0));
        let u = f.to_physical(&fft);
        assert!(u.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn physical_round_trip_and_parseval() {
        let g = Grid::periodic(16, 8).unwrap();
        let fft = Fft2::new(16, 8);
        let vals: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let f = SpectralField::from_physical(g, &vals, &fft).unwrap();
        let back = f.to_physical(&fft);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b.re).abs() < 1e-12 && b.im.abs() < 1e-12);
        }
        let quad: f64 = vals.iter().map(|v| v * v).sum::<f64>() * g.lx * g.ly / g.len() as f64;
        assert!((quad - f.l2_squared()).abs() < 1e-9 * quad);
    }

    #[test]
    fn zero_mean() {
        let g = Grid::periodic(8, 8).unwrap();
        let mut f = SpectralField::from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        assert_eq!(f.enforce_zero_mean(), 1.0);
        assert_eq!(f.x_mean_residual(), 0.0);
        assert_eq!(f.get(1, 0), Complex64::new(1.0, 0.0));
    }
}
