use std::fs;

use gevrey_spectral::io::decode_field;
use gevrey_spectral::{
    bourgain_norm, evolve, gevrey_norm, radius_fit, spectral_profile, write_trajectory,
    BourgainParams, GevreyWeight, PhaseConvention, SolverConfig, SolverError,
};
use serde::Serialize;
use serde_json::json;

use super::Outcome;
use crate::config::{CommonConfig, SpectralConfig};
use crate::error::CliError;
use crate::report::Reporter;

#[derive(Serialize)]
struct Row {
    t: f64,
    l2: f64,
    l2_rel_drift: f64,
    delta_hat: Option<f64>,
    r2: Option<f64>,
    gevrey_norm: f64,
    /// Norm over `[0, t]`, filled on the final row.
    bourgain_norm: Option<f64>,
}

pub fn run(common: CommonConfig, cfg: SpectralConfig) -> Result<Outcome, CliError> {
    let (field, input_bytes) = match &cfg.input {
        Some(path) => {
            let bytes = fs::read(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let field = decode_field(&bytes)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            (field, bytes)
        }
        None => {
            let field = spectral_profile(cfg.delta, cfg.sigma, cfg.amplitude, cfg.grid.grid()?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            (field, Vec::new())
        }
    };
    let solver = SolverConfig {
        dt: cfg.dt,
        t_end: cfg.t_end,
        alpha_c: cfg.alpha_c,
        dealias_fraction: cfg.dealias_fraction,
        nonlinear: !cfg.linear,
        snapshot_every: cfg.snapshot_every,
    };
    let traj = evolve(&field, &solver).map_err(|e| match e {
        SolverError::BlowUp { .. } => CliError::numeric(e),
        other => CliError::Usage(other.to_string()),
    })?;

    let weight = GevreyWeight {
        delta: cfg.norm_delta,
        sigma: cfg.sigma,
        s1: cfg.s1,
        s2: cfg.s2,
    };
    let bourgain = bourgain_norm(
        &traj,
        &BourgainParams {
            weight,
            b: cfg.b,
            alpha_c: cfg.alpha_c,
            convention: cfg.phase,
        },
    );
    let l2 = traj.l2_series();
    let fits: Vec<_> = traj
        .snapshots
        .iter()
        .map(|s| radius_fit(s, cfg.sigma).ok())
        .collect();
    let last = traj.snapshots.len() - 1;
    let rows: Vec<Row> = traj
        .times
        .iter()
        .enumerate()
        .map(|(n, &t)| Row {
            t,
            l2: l2[n],
            l2_rel_drift: (l2[n] - l2[0]).abs() / l2[0],
            delta_hat: fits[n].map(|f| f.delta_hat),
            r2: fits[n].map(|f| f.r2),
            gevrey_norm: gevrey_norm(&traj.snapshots[n], &weight).unwrap_or(f64::INFINITY),
            bourgain_norm: (n == last).then(|| bourgain.clone().unwrap_or(f64::INFINITY)),
        })
        .collect();

    let max_drift = rows.iter().map(|r| r.l2_rel_drift).fold(0.0, f64::max);
    let delta0 = fits[0].map(|f| f.delta_hat);
    let min_ratio = delta0.map(|d0| {
        fits.iter()
            .map(|f| f.map_or(f64::NEG_INFINITY, |f| f.delta_hat / d0))
            .fold(f64::INFINITY, f64::min)
    });
    let l2_ok = max_drift <= cfg.l2_tol;
    let persists = min_ratio.is_some_and(|r| r >= cfg.persistence);
    let passed = l2_ok && persists;

    let mut rep = Reporter::new("spectral", &common, &cfg, &input_bytes)?;
    if cfg.write_fields {
        let index = write_trajectory(&rep.dir().join("fields"), "snapshot", &traj)
            .map_err(CliError::numeric)?;
        rep.note(index);
    }
    rep.table("diagnostics", &rows)?;
    rep.summary(
        passed,
        &json!({
            "grid": field.grid(),
            "steps": solver.steps(),
            "omega": PhaseConvention::Equation.formula(),
            "phase_reversed": PhaseConvention::Reversed.formula(),
            "bourgain_phase": cfg.phase,
            "max_l2_rel_drift": max_drift,
            "l2_conserved": l2_ok,
            "max_mean_residual": traj.max_mean_residual(),
            "delta_hat_initial": delta0,
            "min_delta_hat_ratio": min_ratio,
            "radius_persists": persists,
            "bourgain_norm": bourgain.as_ref().ok(),
            "bourgain_error": bourgain.as_ref().err().map(|e| e.to_string()),
        }),
    )?;
    let lines = vec![
        format!(
            "steps = {}, max relative L2 drift = {max_drift:.3e}",
            solver.steps()
        ),
        format!(
            "delta_hat(0) = {}, min delta_hat(t)/delta_hat(0) = {}",
            delta0.map_or("n/a".into(), |d| format!("{d:.9}")),
            min_ratio.map_or("n/a".into(), |r| format!("{r:.6}"))
        ),
    ];
    Ok(Outcome {
        passed,
        lines,
        reporter: rep,
    })
}
