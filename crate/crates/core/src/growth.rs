//! Temporal growth of `|d_t^j u(0,0,0)|`: Gevrey-order fit, factorial lower
//! bounds and remainder ratios.

use rug::{Float, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{factorial_pow, NumericMode, Scalar, Sigma, DEFAULT_PRECISION_BITS};
use crate::timejet::LeadingSplit;

pub const DEFAULT_J_MIN: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("series too short: need at least {required} terms beyond j = 0, have {found}")]
    TooShort { required: usize, found: usize },
    #[error("degenerate series: a[{j}] is zero inside the fit range")]
    Degenerate { j: usize },
    #[error("j_min must be at least 1")]
    InvalidStart,
    #[error("least-squares system is singular")]
    Singular,
}

/// `a[j] >= 0` for `j = 0..=J`.
#[derive(Debug, Clone)]
pub struct GrowthSeries {
    pub values: Vec<Scalar>,
    pub sigma: Sigma,
    /// Spatial order consumed per time derivative (5 for the fifth-order models).
    pub alpha: u32,
    pub source: String,
}

impl GrowthSeries {
    /// Takes absolute values of the supplied derivatives.
    pub fn new(values: &[Scalar], sigma: Sigma, alpha: u32, source: impl Into<String>) -> Self {
        GrowthSeries {
            values: values.iter().map(Scalar::abs).collect(),
            sigma,
            alpha,
            source: source.into(),
        }
    }

    pub fn max_index(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    /// Coefficient of `j log j`.
    pub z_hat: f64,
    /// Coefficients of `[j log j, j, log j, 1]`.
    pub coefficients: [f64; 4],
    /// `log a[j] - fit` for `j = j_min..=J`.
    pub residuals: Vec<f64>,
    pub j_min: usize,
    pub j_max: usize,
}

/// Least squares of `log a[j]` on `{j log j, j, log j, 1}` for `j >= j_min`,
/// carried out in 256-bit arithmetic.
pub fn estimate_order(series: &GrowthSeries, j_min: usize) -> Result<OrderFit, GrowthError> {
    if j_min < 1 {
        return Err(GrowthError::InvalidStart);
    }
    let j_max = series.max_index();
    if series.values.is_empty() || j_max < j_min + 4 {
        return Err(GrowthError::TooShort {
            required: j_min + 4,
            found: j_max,
        });
    }
    let prec = DEFAULT_PRECISION_BITS;
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for j in j_min..=j_max {
        let y = series.values[j]
            .ln(prec)
            .ok_or(GrowthError::Degenerate { j })?;
        let jf = Float::with_val(prec, j);
        let lj = jf.clone().ln();
        rows.push([
            Float::with_val(prec, &jf * &lj),
            jf,
            lj,
            Float::with_val(prec, 1),
        ]);
        ys.push(y);
    }
    let beta = least_squares(&rows, &ys, prec)?;
    let residuals = rows
        .iter()
        .zip(&ys)
        .map(|(r, y)| {
            let mut fit = Float::with_val(prec, 0);
            for (x, b) in r.iter().zip(&beta) {
                fit += Float::with_val(prec, x * b);
            }
            Float::with_val(prec, y - &fit).to_f64()
        })
        .collect();
    Ok(OrderFit {
        z_hat: beta[0].to_f64(),
        coefficients: [
            beta[0].to_f64(),
            beta[1].to_f64(),
            beta[2].to_f64(),
            beta[3].to_f64(),
        ],
        residuals,
        j_min,
        j_max,
    })
}

fn least_squares<const N: usize>(
    rows: &[[Float; N]],
    ys: &[Float],
    prec: u32,
) -> Result<Vec<Float>, GrowthError> {
    // normal equations with partial pivoting; 256 bits leaves ample headroom
    let mut a: Vec<Vec<Float>> = vec![vec![Float::with_val(prec, 0); N + 1]; N];
    for (r, y) in rows.iter().zip(ys) {
        for i in 0..N {
            for k in 0..N {
                a[i][k] += Float::with_val(prec, &r[i] * &r[k]);
            }
            a[i][N] += Float::with_val(prec, &r[i] * y);
        }
    }
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&p, &q| {
                a[p][col]
                    .clone()
                    .abs()
                    .partial_cmp(&a[q][col].clone().abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if a[pivot][col].is_zero() {
            return Err(GrowthError::Singular);
        }
        a.swap(col, pivot);
        for row in 0..N {
            if row == col {
                continue;
            }
            let (pivot_row, target) = if row < col {
                let (lo, hi) = a.split_at_mut(col);
                (&hi[0], &mut lo[row])
            } else {
                let (lo, hi) = a.split_at_mut(row);
                (&lo[col], &mut hi[0])
            };
            let f = Float::with_val(prec, &target[col] / &pivot_row[col]);
            for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= Float::with_val(prec, &f * p);
            }
        }
    }
    Ok((0..N)
        .map(|i| Float::with_val(prec, &a[i][N] / &a[i][i]))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub j: usize,
    pub value: String,
    /// `½ ((αj)!)^σ`
    pub bound: String,
    pub holds: bool,
}

/// `a[j] >= ½ ((αj)!)^σ` for `j = j0..=J`; exact when σ is an integer and
/// the series is exact, otherwise with a conservative rounding margin.
pub fn sharpness_check(series: &GrowthSeries, j0: usize) -> Vec<SharpnessRow> {
    let exact =
        series.sigma.integer().is_some() && series.values.iter().all(|v| v.as_rational().is_some());
    let mode = if exact {
        NumericMode::Exact
    } else {
        NumericMode::Float {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    };
    let half = Scalar::from_rational(Rational::from((1, 2)), mode);
    (j0..=series.max_index())
        .map(|j| {
            let value = series.values[j].to_mode(mode);
            let bound = &half
                * &factorial_pow(series.alpha * j as u32, &series.sigma, mode)
                    .expect("mode chosen to fit sigma");
            let holds = if exact {
                value >= bound
            } else {
                value >= &bound * &Scalar::from_rational(1 + margin(), mode)
            };
            SharpnessRow {
                j,
                value: value.to_string(),
                bound: bound.to_string(),
                holds,
            }
        })
        .collect()
}

/// Relative slack used for big-float comparisons.
fn margin() -> Rational {
    Rational::from((1, 1)) >> (DEFAULT_PRECISION_BITS - 16)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderRatios {
    /// `|remainder[j]| / ((αj)!)^σ`
    pub ratios: Vec<Scalar>,
    /// `exp(slope)` of `log r[j]` against `j` over the nonzero ratios with `j >= 1`.
    pub geometric_factor: Option<f64>,
}

pub fn remainder_ratios(split: &LeadingSplit, sigma: &Sigma, alpha: u32) -> RemainderRatios {
    let exact =
        sigma.integer().is_some() && split.remainder.iter().all(|v| v.as_rational().is_some());
    let mode = if exact {
        NumericMode::Exact
    } else {
        NumericMode::Float {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    };
    let ratios: Vec<Scalar> = split
        .remainder
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let f = factorial_pow(alpha * j as u32, sigma, mode).expect("mode chosen to fit sigma");
            r.to_mode(mode)
                .abs()
                .checked_div(&f)
                .expect("factorials are positive")
        })
        .collect();
    let prec = DEFAULT_PRECISION_BITS;
    let pts: Vec<(f64, f64)> = ratios
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(j, r)| r.ln(prec).map(|l| (j as f64, l.to_f64())))
        .collect();
    let geometric_factor = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    });
    RemainderRatios {
        ratios,
        geometric_factor,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub source: String,
    pub sigma: String,
    pub fit: Option<OrderFit>,
    pub fit_error: Option<String>,
    /// `None` below `j0`.
    pub verdicts: Vec<Option<bool>>,
    pub ratios: Vec<Option<f64>>,
}

pub fn growth_report(
    series: &GrowthSeries,
    split: Option<&LeadingSplit>,
    j_min: usize,
    j0: usize,
) -> GrowthReport {
    let n = series.values.len();
    let (fit, fit_error) = match estimate_order(series, j_min) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut verdicts = vec![None; n];
    for row in sharpness_check(series, j0) {
        verdicts[row.j] = Some(row.holds);
    }
    let mut ratios = vec![None; n];
    if let Some(split) = split {
        let rr = remainder_ratios(split, &series.sigma, series.alpha);
        for (j, r) in rr.ratios.iter().enumerate().take(n) {
            ratios[j] = Some(r.to_f64());
        }
    }
    GrowthReport {
        source: series.source.clone(),
        sigma: series.sigma.to_string(),
        fit,
        fit_error,
        verdicts,
        ratios,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::factorial_pow;

    fn sigma(v: u32) -> Sigma {
        Sigma::from_u32(v).unwrap()
    }

    fn series_of(f: impl Fn(usize) -> Scalar, n: usize, s: u32) -> GrowthSeries {
        let v: Vec<Scalar> = (0..=n).map(f).collect();
        GrowthSeries::new(&v, sigma(s), 5, "test")
    }

    fn fact(n: usize, s: u32) -> Scalar {
        factorial_pow(n as u32, &sigma(s), NumericMode::Exact).unwrap()
    }

    #[test]
    fn defining_model_is_recovered() {
        let prec = 256;
        let v: Vec<Scalar> = (0..=20)
            .map(|j| {
                let jf = Float::with_val(prec, j.max(1));
                let lj = jf.clone().ln();
                let e = Float::with_val(prec, &jf * &lj) * 5u32 - Float::with_val(prec, &jf * 3u32)
                    + Float::with_val(prec, &lj / 2u32)
                    + 0.25f64;
                Scalar::Float(e.exp())
            })
            .collect();
        let s = GrowthSeries::new(&v, sigma(1), 5, "model");
        let fit = estimate_order(&s, 4).unwrap();
        assert!((fit.z_hat - 5.0).abs() < 1e-6);
        assert!((fit.coefficients[1] + 3.0).abs() < 1e-6);
    }

    #[test]
    fn factorial_powers() {
        // Stirling's 5/(12j) term is outside the basis
        let s = series_of(|j| fact(j, 5), 20, 1);
        let fit = estimate_order(&s, 4).unwrap();
        assert!((fit.z_hat - 4.99017).abs() < 1e-4, "{}", fit.z_hat);

        let s = series_of(|j| fact(5 * j, 1), 12, 1);
        assert!((estimate_order(&s, 4).unwrap().z_hat - 5.0).abs() < 0.25);
        let s = series_of(|j| fact(5 * j, 2), 10, 2);
        assert!((estimate_order(&s, 4).unwrap().z_hat - 10.0).abs() < 0.5);
    }

    #[test]
    fn fit_errors() {
        let s = series_of(|j| fact(j, 1), 6, 1);
        assert!(matches!(
            estimate_order(&s, 4),
            Err(GrowthError::TooShort { .. })
        ));
        let s = series_of(
            |j| {
                if j == 6 {
                    Scalar::zero(NumericMode::Exact)
                } else {
                    fact(j, 1)
                }
            },
            10,
            1,
        );
        assert_eq!(estimate_order(&s, 4), Err(GrowthError::Degenerate { j: 6 }));
        assert_eq!(estimate_order(&s, 0), Err(GrowthError::InvalidStart));
    }

    #[test]
    fn sharpness_examples() {
        let s = series_of(|j| fact(5 * j, 1), 6, 1);
        assert!(sharpness_check(&s, 0).iter().all(|r| r.holds));
        let s = series_of(|j| fact(j, 1), 6, 1);
        let rows = sharpness_check(&s, 0);
        assert!(rows[0].holds);
        assert!(rows[1..].iter().all(|r| !r.holds));
        assert_eq!(rows[1].bound, "60");
    }

    #[test]
    fn ratios_zero_for_leading_only() {
        let split = LeadingSplit {
            leading: (0..5).map(|j| fact(5 * j, 1)).collect(),
            remainder: (0..5).map(|_| Scalar::zero(NumericMode::Exact)).collect(),
        };
        let rr = remainder_ratios(&split, &sigma(1), 5);
        assert!(rr.ratios.iter().all(Scalar::is_zero));
        assert_eq!(rr.geometric_factor, None);
    }
}
