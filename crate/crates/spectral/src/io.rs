//! Binary field files with JSON sidecars, and trajectory indices.
//!
//! Layout: `"GKP1"`, `u32` version, `u32` Nx, `u32` Ny, `f64` Lx, `f64` Ly,
//! then `Nx * Ny` modes in kx-major order, each as two little-endian `f32`.

use std::fs;
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::PhaseConvention;
use crate::field::{FieldError, Grid, SpectralField};
use crate::solver::{SolverConfig, Trajectory};

pub const MAGIC: &[u8; 4] = b"GKP1";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("not a field file (bad magic)")]
    BadMagic,
    #[error("unsupported field file version {0}")]
    Version(u32),
    #[error("field file truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub magic: String,
    pub version: u32,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub layout: String,
    pub dtype: String,
    pub time: Option<f64>,
    pub omega: String,
    pub phase_reversed: String,
}

impl FieldSidecar {
    pub fn new(grid: &Grid, time: Option<f64>) -> Self {
        FieldSidecar {
            magic: "GKP1".into(),
            version: VERSION,
            nx: grid.nx,
            ny: grid.ny,
            lx: grid.lx,
            ly: grid.ly,
            layout: "kx-major, signed index i <= N/2 ? i : i - N".into(),
            dtype: "complex64 little-endian (f32 re, f32 im)".into(),
            time,
            omega: PhaseConvention::Equation.formula().into(),
            phase_reversed: PhaseConvention::Reversed.formula().into(),
        }
    }
}

pub fn encode_field(field: &SpectralField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nx as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny as u32).to_le_bytes());
    out.extend_from_slice(&g.lx.to_le_bytes());
    out.extend_from_slice(&g.ly.to_le_bytes());
    for m in field.modes() {
        out.extend_from_slice(&(m.re as f32).to_le_bytes());
        out.extend_from_slice(&(m.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<SpectralField, IoError> {
    if bytes.len() < HEADER_LEN {
        return Err(IoError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(IoError::BadMagic);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(IoError::Version(version));
    }
    let grid = Grid::new(
        u32_at(8) as usize,
        u32_at(12) as usize,
        f64_at(16),
        f64_at(24),
    )?;
    let expected = HEADER_LEN + 8 * grid.len();
    if bytes.len() != expected {
        return Err(IoError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    let modes = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().unwrap());
            let im = f32::from_le_bytes(c[4..].try_into().unwrap());
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    Ok(SpectralField::from_modes(grid, modes)?)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `path` and its `.json` sidecar.
pub fn write_field(path: &Path, field: &SpectralField, time: Option<f64>) -> Result<(), IoError> {
    fs::write(path, encode_field(field))?;
    let side = FieldSidecar::new(field.grid(), time);
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SpectralField, IoError> {
    decode_field(&fs::read(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub config: SolverConfig,
    pub times: Vec<f64>,
    /// Relative to the index file's directory.
    pub snapshots: Vec<String>,
}

/// Writes `{stem}_{n:05}.gkp` snapshots and `{stem}_index.json` into `dir`.
pub fn write_trajectory(dir: &Path, stem: &str, traj: &Trajectory) -> Result<PathBuf, IoError> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::with_capacity(traj.snapshots.len());
    for (n, (snap, t)) in traj.snapshots.iter().zip(&traj.times).enumerate() {
        let name = format!("{stem}_{n:05}.gkp");
        write_field(&dir.join(&name), snap, Some(*t))?;
        names.push(name);
    }
    let index = TrajectoryIndex {
        config: traj.config,
        times: traj.times.clone(),
        snapshots: names,
    };
    let path = dir.join(format!("{stem}_index.json"));
    fs::write(&path, serde_json::to_string_pretty(&index)?)?;
    Ok(path)
}

pub fn read_trajectory(index_path: &Path) -> Result<Trajectory, IoError> {
    let index: TrajectoryIndex = serde_json::from_str(&fs::read_to_string(index_path)?)?;
    let dir = index_path.parent().unwrap_or(Path::new("."));
    let snapshots = index
        .snapshots
        .iter()
        .map(|name| read_field(&dir.join(name)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trajectory {
        config: index.config,
        times: index.times,
        snapshots,
        mean_residuals: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::spectral_profile;

    #[test]
    fn header_layout() {
        let g = Grid::new(8, 4, 1.5, 2.5).unwrap();
        let bytes = encode_field(&SpectralField::zeros(g));
        assert_eq!(&bytes[..4], b"GKP1");
        assert_eq!(bytes.len(), 32 + 8 * 32);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 2.5);
    }

    #[test]
    fn round_trip_is_f32_exact() {
        let g = Grid::periodic(16, 8).unwrap();
        let f = spectral_profile(0.5, 1.0, 1.0, g).unwrap();
        let back = decode_field(&encode_field(&f)).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in f.modes().iter().zip(back.modes()) {
            assert_eq!(a.re as f32 as f64, b.re);
            assert_eq!(a.im as f32 as f64, b.im);
        }
    }

    #[test]
    fn decode_errors() {
        let g = Grid::periodic(8, 4).unwrap();
        let mut bytes = encode_field(&SpectralField::zeros(g));
        assert!(matches!(
            decode_field(&bytes[..40]),
            Err(IoError::Truncated { .. })
        ));
        bytes[4] = 9;
        assert!(matches!(decode_field(&bytes), Err(IoError::Version(9))));
        bytes[0] = b'X';
        assert!(matches!(decode_field(&bytes), Err(IoError::BadMagic)));
    }
}
