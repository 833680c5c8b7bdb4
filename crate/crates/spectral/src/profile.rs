use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::field::{Grid, SpectralField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("delta must be positive, got {0}")]
    Delta(f64),
    #[error("sigma must be at least 1, got {0}")]
    Sigma(f64),
}

/// `û(k) = A exp(-δ (|kx|^{1/σ} + |ky|^{1/σ}))` for `kx != 0`, zero on `kx = 0`,
/// made Hermitian so the field is real.
pub fn spectral_profile(
    delta: f64,
    sigma: f64,
    amplitude: f64,
    grid: Grid,
) -> Result<SpectralField, ProfileError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ProfileError::Delta(delta));
    }
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(ProfileError::Sigma(sigma));
    }
    let p = 1.0 / sigma;
    let mut field = SpectralField::zeros(grid);
    for ix in 0..grid.nx {
        let kx = grid.kx(ix);
        if grid.kx_index(ix) == 0 {
            continue;
        }
        for iy in 0..grid.ny {
            let ky = grid.ky(iy);
            let v = amplitude * (-delta * (kx.abs().powf(p) + ky.abs().powf(p))).exp();
            field.modes_mut()[ix * grid.ny + iy] = Complex64::new(v, 0.0);
        }
    }
    field.enforce_hermitian();
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::Fft2;

    #[test]
    fn decay_law() {
        let g = Grid::periodic(32, 16).unwrap();
        let f = spectral_profile(0.8, 1.0, 2.0, g).unwrap();
        for ky in -7..=7 {
            assert_eq!(f.get(0, ky), Complex64::new(0.0, 0.0));
        }
        let ratio = f.get(1, 0).re / f.get(2, 0).re;
        assert!((ratio - 0.8f64.exp()).abs() < 1e-12);
        assert_eq!(f.get(3, -2), f.get(-3, 2).conj());
        assert!(spectral_profile(0.0, 1.0, 1.0, g).is_err());
        assert!(spectral_profile(1.0, 0.5, 1.0, g).is_err());
    }

    #[test]
    fn field_is_real() {
        let g = Grid::periodic(64, 32).unwrap();
        let f = spectral_profile(0.5, 2.0, 1.0, g).unwrap();
        let u = f.to_physical(&Fft2::new(64, 32));
        let scale = u.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        assert!(u.iter().all(|z| z.im.abs() < 1e-12 * scale));
    }
}
