use gevrey_core::combinatorics::{
    counting_inequality, counting_scan, pascal_step_audit, poly_coeff_inequality, poly_scan,
    IndexTriple,
};
use serde::Serialize;
use serde_json::json;

use super::Outcome;
use crate::config::{CombinatoricsConfig, CommonConfig};
use crate::error::CliError;
use crate::report::Reporter;

#[derive(Serialize)]
struct Row {
    ell: usize,
    m: usize,
    j: usize,
    s: usize,
    lhs: String,
    rhs: String,
    verdict: bool,
}

pub fn run(common: CommonConfig, cfg: CombinatoricsConfig) -> Result<Outcome, CliError> {
    let counting = if cfg.exhaustive {
        counting_scan(cfg.l_max, cfg.m_max, cfg.j_max)
    } else {
        vec![counting_inequality(IndexTriple::new(
            cfg.l_max, cfg.m_max, cfg.j_max,
        ))]
    };
    let poly = if cfg.exhaustive {
        poly_scan(cfg.n_max, cfg.j_max)
    } else {
        vec![poly_coeff_inequality(cfg.n_max, cfg.j_max)]
    };
    if cfg.pascal_t > cfg.pascal_n + 5 {
        return Err(CliError::Usage(format!(
            "pascal_t = {} exceeds pascal_n + 5 = {}",
            cfg.pascal_t,
            cfg.pascal_n + 5
        )));
    }
    let audit = pascal_step_audit(cfg.pascal_n, cfg.pascal_t);

    let rows: Vec<Row> = counting
        .iter()
        .flat_map(|v| v.rows.iter())
        .map(|r| Row {
            ell: r.triple.ell,
            m: r.triple.m,
            j: r.triple.j,
            s: r.s,
            lhs: r.lhs.clone(),
            rhs: r.rhs.clone(),
            verdict: r.holds,
        })
        .collect();
    let counting_fail: Vec<_> = counting
        .iter()
        .filter(|v| !v.holds())
        .map(|v| v.triple)
        .collect();
    let poly_fail: Vec<_> = poly
        .iter()
        .filter(|v| !v.holds())
        .map(|v| (v.n, v.j))
        .collect();
    let passed = counting_fail.is_empty() && poly_fail.is_empty();

    let mut rep = Reporter::new("combinatorics", &common, &cfg, &[])?;
    rep.table("counting", &rows)?;
    rep.summary(
        passed,
        &json!({
            "triples_checked": counting.len(),
            "rows_checked": rows.len(),
            "counting_violations": counting_fail,
            "poly_pairs_checked": poly.len(),
            "poly_violations": poly_fail,
            "poly_equalities": poly.iter().map(|v| v.equalities).sum::<usize>(),
            "pascal_audit": audit,
        }),
    )?;
    let lines = vec![
        format!(
            "counting inequality: {} triples, {} violations",
            counting.len(),
            counting_fail.len()
        ),
        format!(
            "coefficient inequality: {} pairs, {} violations",
            poly.len(),
            poly_fail.len()
        ),
        format!(
            "pascal step at (n, t) = ({}, {}): stated sum {} vs C(n+5, t) = {}, Vandermonde {}",
            audit.n, audit.t, audit.stated_sum, audit.target, audit.vandermonde_sum
        ),
    ];
    Ok(Outcome {
        passed,
        lines,
        reporter: rep,
    })
}
