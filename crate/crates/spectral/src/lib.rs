//! Pseudo-spectral solver and Fourier diagnostics for the fifth-order KP-I
//! equation on a periodic rectangle.

pub mod dispersion;
pub mod fft;
pub mod field;
pub mod io;
pub mod norms;
pub mod profile;
pub mod radius;
pub mod solver;

pub use dispersion::{omega, PhaseConvention};
pub use fft::Fft2;
pub use field::{FieldError, Grid, SpectralField};
pub use io::{read_field, read_trajectory, write_field, write_trajectory, IoError};
pub use norms::{bourgain_norm, gevrey_norm, BourgainParams, GevreyWeight, NormError};
pub use profile::{spectral_profile, ProfileError};
pub use radius::{radius_fit, RadiusError, RadiusFit};
pub use solver::{evolve, SolverConfig, SolverError, Stepper, Trajectory};
