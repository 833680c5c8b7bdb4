//! Linear dispersion of `u_t = -α_c u_xxx - u_xxxxx - d_x^{-1} u_yy - u u_x`.
//!
//! Substituting `e^{i(kx x + ky y)}` gives `û_t = i ω û` with
//! `ω = α_c kx^3 - kx^5 - ky^2 / kx`. The other common form of the phase,
//! `φ = kx^5 - α_c kx^3 + ky^2 / kx`, equals `-ω`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `ω`, obtained by transforming the equation.
    #[default]
    Equation,
    /// `φ = -ω`.
    Reversed,
}

impl PhaseConvention {
    pub fn formula(&self) -> &'static str {
        match self {
            PhaseConvention::Equation => "alpha_c*kx^3 - kx^5 - ky^2/kx",
            PhaseConvention::Reversed => "kx^5 - alpha_c*kx^3 + ky^2/kx",
        }
    }

    pub fn phase(&self, kx: f64, ky: f64, alpha_c: f64) -> f64 {
        match self {
            PhaseConvention::Equation => omega(kx, ky, alpha_c),
            PhaseConvention::Reversed => -omega(kx, ky, alpha_c),
        }
    }
}

/// `ω(kx, ky)`; zero on `kx = 0`, where the field carries no modes.
pub fn omega(kx: f64, ky: f64, alpha_c: f64) -> f64 {
    if kx == 0.0 {
        return 0.0;
    }
    alpha_c * kx.powi(3) - kx.powi(5) - ky * ky / kx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(omega(1.0, 0.0, 0.0), -1.0);
        assert_eq!(omega(2.0, 2.0, 1.0), 8.0 - 32.0 - 2.0);
        assert_eq!(omega(0.0, 3.0, 1.0), 0.0);
        let p = PhaseConvention::Reversed.phase(2.0, 2.0, 1.0);
        assert_eq!(p, 32.0 - 8.0 + 2.0);
    }
}
