use gevrey_core::growth::{estimate_order, remainder_ratios, sharpness_check, GrowthSeries};
use gevrey_core::leading_split;
use serde::Serialize;
use serde_json::json;

use super::{build_model, prescribed_staircase, Outcome};
use crate::config::{CommonConfig, SharpnessConfig};
use crate::error::CliError;
use crate::report::Reporter;

#[derive(Serialize)]
struct Row {
    j: usize,
    value: String,
    bound: Option<String>,
    holds: Option<bool>,
    remainder_ratio: String,
}

pub fn run(common: CommonConfig, cfg: SharpnessConfig) -> Result<Outcome, CliError> {
    let model = build_model(&cfg.model)?;
    let sigma = cfg.model.sigma.sigma()?;
    let mode = common.mode_for(&sigma)?;
    let alpha = model.leading_order;
    let (phi, tj) = prescribed_staircase(&model, &sigma, mode, cfg.model.j_max, 0, 0)?;
    let split = leading_split(&model, &tj, &phi);
    let series = GrowthSeries::new(
        &tj.origin_series(),
        sigma.clone(),
        alpha,
        model.label.clone(),
    );
    let verdicts = sharpness_check(&series, cfg.j0.max(1));
    let ratios = remainder_ratios(&split, &sigma, alpha);
    let fit = estimate_order(&series, cfg.j_min);

    let rows: Vec<Row> = series
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let verdict = verdicts.iter().find(|r| r.j == j);
            Row {
                j,
                value: v.to_string(),
                bound: verdict.map(|r| r.bound.clone()),
                holds: verdict.map(|r| r.holds),
                remainder_ratio: ratios.ratios[j].to_string(),
            }
        })
        .collect();
    let first_failure = verdicts.iter().find(|r| !r.holds).map(|r| r.j);
    let passed = first_failure.is_none();

    let mut rep = Reporter::new("sharpness", &common, &cfg, &[])?;
    rep.table("bounds", &rows)?;
    let (fit_json, fit_error) = match &fit {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    rep.summary(
        passed,
        &json!({
            "model": model.label,
            "sigma": sigma.to_string(),
            "mode": mode,
            "bound": format!("1/2 (({alpha} j)!)^sigma"),
            "first_failure": first_failure,
            "fit": fit_json,
            "fit_error": fit_error,
            "remainder_geometric_factor": ratios.geometric_factor,
        }),
    )?;
    let mut lines = vec![match first_failure {
        None => format!(
            "{}: lower bound holds for j = {}..={}",
            model.label,
            cfg.j0.max(1),
            cfg.model.j_max
        ),
        Some(j) => format!("{}: lower bound fails at j = {j}", model.label),
    }];
    match &fit {
        Ok(f) => lines.push(format!(
            "z_hat = {:.6} (j = {}..={})",
            f.z_hat, f.j_min, f.j_max
        )),
        Err(e) => lines.push(format!("z_hat unavailable: {e}")),
    }
    Ok(Outcome {
        passed,
        lines,
        reporter: rep,
    })
}
