use gevrey_core::leading_split;
use serde::Serialize;
use serde_json::json;

use super::{build_model, prescribed_staircase, Outcome};
use crate::config::{CommonConfig, TimejetConfig};
use crate::error::CliError;
use crate::report::Reporter;

#[derive(Serialize)]
struct SeriesRow {
    j: usize,
    value: String,
    abs_value: String,
    leading: String,
    remainder: String,
}

pub fn run(common: CommonConfig, cfg: TimejetConfig) -> Result<Outcome, CliError> {
    let model = build_model(&cfg.model)?;
    let sigma = cfg.model.sigma.sigma()?;
    let mode = common.mode_for(&sigma)?;
    let j_max = cfg.model.j_max;
    let (phi, tj) = prescribed_staircase(&model, &sigma, mode, j_max, cfg.nx_out, cfg.ny_out)?;
    let split = leading_split(&model, &tj, &phi);
    let rows: Vec<SeriesRow> = tj
        .origin_series()
        .iter()
        .enumerate()
        .map(|(j, v)| SeriesRow {
            j,
            value: v.to_string(),
            abs_value: v.abs().to_string(),
            leading: split.leading[j].to_string(),
            remainder: split.remainder[j].to_string(),
        })
        .collect();

    let mut rep = Reporter::new("timejet", &common, &cfg, &[])?;
    rep.artifact("timejet.json", &tj.to_json())?;
    rep.table("series", &rows)?;
    rep.summary(
        true,
        &json!({
            "model": model.label,
            "grammar": model.to_grammar(),
            "sigma": sigma.to_string(),
            "mode": mode,
            "initial_orders": [phi.order_x(), phi.order_y()],
            "product_orders": tj.product_orders(),
            "origin_series": rows.iter().map(|r| r.value.clone()).collect::<Vec<_>>(),
        }),
    )?;
    let last = rows.last().map(|r| r.value.clone()).unwrap_or_default();
    Ok(Outcome {
        passed: true,
        lines: vec![format!(
            "{}: J = {j_max}, d_t^{j_max} u(0,0,0) = {last}",
            model.label
        )],
        reporter: rep,
    })
}
