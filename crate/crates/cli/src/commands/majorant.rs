use gevrey_core::majorant::{
    admissibility, check_p1, check_p2, check_p3, final_conversion_check, find_c_max,
    largest_admissible_epsilon, main_estimate_check, MajorantParams,
};
use gevrey_core::{NumericMode, PdeModel, Scalar};
use serde::Serialize;
use serde_json::json;

use super::{prescribed_staircase, Outcome};
use crate::config::{CommonConfig, MajorantConfig};
use crate::error::CliError;
use crate::report::Reporter;

#[derive(Serialize)]
struct Row {
    check: &'static str,
    index: String,
    lhs: String,
    rhs: String,
    holds: bool,
}

fn row(check: &'static str, index: String, lhs: &Scalar, rhs: &Scalar, holds: bool) -> Row {
    Row {
        check,
        index,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds,
    }
}

pub fn run(common: CommonConfig, cfg: MajorantConfig) -> Result<Outcome, CliError> {
    let sigma = cfg.sigma.sigma()?;
    let mode = NumericMode::for_sigma(&sigma);
    let alpha_c_q = cfg.alpha_c.rational("alpha_c")?;
    let alpha_c = Scalar::from_rational(alpha_c_q.clone(), mode);
    let c1 = Scalar::from_rational(cfg.c1.rational("c1")?, mode);
    let mut lines = Vec::new();

    let scan = (cfg.find_c || cfg.c.is_none()).then(|| find_c_max(&sigma, cfg.k_max));
    if let Some(s) = &scan {
        lines.push(format!(
            "c_max = {} ({:.12e}) at k = {} over k <= {}",
            s.c_max,
            s.c_max.to_f64(),
            s.argmax_k,
            cfg.k_max
        ));
    }
    let c = match (&cfg.c, &scan) {
        (Some(text), _) => Scalar::from_rational(text.rational("c")?, mode),
        (None, Some(s)) => s.c_max.clone(),
        (None, None) => unreachable!("scan runs whenever c is absent"),
    };
    let epsilon = match &cfg.epsilon {
        Some(text) => Some(text.rational("epsilon")?),
        None => largest_admissible_epsilon(&c, &sigma, &alpha_c, &c1).ok(),
    };

    let mut rows = Vec::new();
    let mut passed = true;
    let mut result = json!({
        "sigma": sigma.to_string(),
        "mode": mode,
        "c": c.to_string(),
        "c_max": scan.as_ref().map(|s| json!({"c_max": s.c_max.to_string(), "c_max_f64": s.c_max.to_f64(), "argmax_k": s.argmax_k, "s_max": s.s_max.to_string()})),
    });

    match epsilon {
        None => {
            passed = false;
            result["epsilon"] = json!(null);
            result["epsilon_error"] = json!("no dyadic epsilon meets the four conditions");
            lines.push("no admissible epsilon".into());
        }
        Some(eps) => {
            let params = MajorantParams::new(
                c.clone(),
                Scalar::from_rational(eps.clone(), mode),
                sigma.clone(),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let p1 = check_p1(&params, cfg.k_max);
            let p2 = check_p2(&params, cfg.j_max);
            let p3 = check_p3(&params, &c1, cfg.j_max);
            let adm = admissibility(&params, &alpha_c, &c1);
            for r in &p1 {
                rows.push(row("P1", r.index.to_string(), &r.lhs, &r.rhs, r.holds));
            }
            for r in &p2 {
                rows.push(row("P2", r.index.to_string(), &r.lhs, &r.rhs, r.holds));
            }
            for r in &p3 {
                rows.push(row("P3", r.index.to_string(), &r.lhs, &r.rhs, r.holds));
            }
            let p1_fail = p1.iter().find(|r| !r.holds).map(|r| r.index);
            // P2 is only claimed from j = 2 on
            let p2_fail = p2
                .iter()
                .find(|r| r.index >= 2 && !r.holds)
                .map(|r| r.index);
            let p2_at_1 = p2.first().map(|r| r.holds);
            let p3_fail = p3.iter().find(|r| !r.holds).map(|r| r.index);
            passed &= p1_fail.is_none() && p2_fail.is_none() && p3_fail.is_none() && adm.holds();
            result["epsilon"] = json!(eps.to_string());
            result["big_m"] = json!(adm.big_m.to_string());
            result["epsilon_1"] = json!(adm.epsilon_1.as_ref().map(|e| e.to_string()));
            result["conditions"] = json!(adm.conditions);
            result["p1_first_failure"] = json!(p1_fail);
            result["p2_holds_at_j1"] = json!(p2_at_1);
            result["p2_first_failure_from_j2"] = json!(p2_fail);
            result["p3_first_failure"] = json!(p3_fail);
            lines.push(format!(
                "epsilon = {eps}, M = {}; P1 {}, P2 (j >= 2) {}, P3 {}, conditions {}",
                adm.big_m,
                verdict(p1_fail.is_none()),
                verdict(p2_fail.is_none()),
                verdict(p3_fail.is_none()),
                verdict(adm.holds())
            ));

            if cfg.estimate && adm.holds() {
                let model = PdeModel::kp1_5(alpha_c_q);
                let jet_mode = common.mode_for(&sigma)?;
                let (_, tj) = prescribed_staircase(
                    &model,
                    &sigma,
                    jet_mode,
                    cfg.estimate_j,
                    cfg.lm_max,
                    cfg.lm_max,
                )?;
                let est =
                    main_estimate_check(&tj, &params, &alpha_c, &c1, 5, cfg.estimate_j, cfg.lm_max)
                        .map_err(CliError::numeric)?;
                for r in &est.rows {
                    rows.push(row(
                        "estimate",
                        format!("{}/{}/{}", r.j, r.l, r.m),
                        &r.value,
                        &r.bound,
                        r.holds,
                    ));
                }
                let conv = final_conversion_check(&tj, &params, &c1);
                for r in &conv {
                    rows.push(row(
                        "conversion",
                        r.j.to_string(),
                        &r.value,
                        &r.gevrey,
                        r.holds,
                    ));
                }
                let conv_ok = conv.iter().all(|r| r.holds);
                passed &= est.first_violation.is_none() && conv_ok;
                result["estimate_first_violation"] = json!(est.first_violation);
                result["estimate_rows"] = json!(est.rows.len());
                result["conversion_holds"] = json!(conv_ok);
                lines.push(format!(
                    "main estimate j <= {}, l + m <= {}: {}",
                    cfg.estimate_j,
                    cfg.lm_max,
                    verdict(est.first_violation.is_none())
                ));
            }
        }
    }

    let mut rep = Reporter::new("majorant", &common, &cfg, &[])?;
    rep.table("checks", &rows)?;
    rep.summary(passed, &result)?;
    Ok(Outcome {
        passed,
        lines,
        reporter: rep,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}
