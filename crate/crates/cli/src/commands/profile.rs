use gevrey_core::data_factory::gevrey_jet;
use gevrey_spectral::{radius_fit, spectral_profile, write_field};
use serde::Serialize;
use serde_json::json;

use super::Outcome;
use crate::config::{CommonConfig, ProfileConfig};
use crate::error::CliError;
use crate::report::Reporter;

#[derive(Serialize)]
struct Row {
    kx: i64,
    ky: i64,
    re: f64,
    im: f64,
}

pub fn run(common: CommonConfig, cfg: ProfileConfig) -> Result<Outcome, CliError> {
    let sigma = cfg.sigma.sigma()?;
    let sigma_f = sigma.to_f64();
    let grid = cfg.grid.grid()?;
    let field = spectral_profile(cfg.delta, sigma_f, cfg.amplitude, grid)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let fit = radius_fit(&field, sigma_f).ok();

    let mut rows = Vec::new();
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            let z = field.modes()[ix * grid.ny + iy];
            if z.norm() > 0.0 {
                rows.push(Row {
                    kx: grid.kx_index(ix),
                    ky: grid.ky_index(iy),
                    re: z.re,
                    im: z.im,
                });
            }
        }
    }

    let mut rep = Reporter::new("profile", &common, &cfg, &[])?;
    let path = rep.dir().join("profile.gkp");
    write_field(&path, &field, Some(0.0)).map_err(CliError::numeric)?;
    rep.note(path);
    if let Some(order) = cfg.jet_order {
        let mode = common.mode_for(&sigma)?;
        let jet = gevrey_jet(&sigma, order, 0, mode).map_err(|e| CliError::Usage(e.to_string()))?;
        rep.artifact("profile_jet.json", &jet.to_json())?;
    }
    rep.table("modes", &rows)?;
    rep.summary(
        true,
        &json!({
            "grid": grid,
            "l2_squared": field.l2_squared(),
            "nonzero_modes": rows.len(),
            "radius_fit": fit,
        }),
    )?;
    Ok(Outcome {
        passed: true,
        lines: vec![format!(
            "profile delta = {}, sigma = {sigma}: {} nonzero modes, delta_hat = {}",
            cfg.delta,
            rows.len(),
            fit.map_or("n/a".into(), |f| format!("{:.9}", f.delta_hat))
        )],
        reporter: rep,
    })
}
