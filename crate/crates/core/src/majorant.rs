//! Majorant sequences `m_q = c (q!)^σ / (q+1)^2`, `M_0 = c/8`,
//! `M_q = ε^(1-q) m_q`, their properties P1-P3 and the pointwise main
//! estimate `|d_t^j d_x^l d_y^m u| <= M^(j+1) M_(l+m+5j)`.
//!
//! Everything is exact rational arithmetic for integer σ. For other σ the
//! comparisons run in big-float with a relative margin of `2^-(prec-16)`
//! against the claimed inequality.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Rational;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{binomial, factorial_pow, NumericMode, Scalar, Sigma};
use crate::timejet::TimeJet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MajorantError {
    #[error("c must be positive")]
    NonPositiveC,
    #[error("epsilon must lie in (0, 1]")]
    EpsilonOutOfRange,
    #[error("inadmissible parameters: condition `{condition}` fails")]
    Inadmissible { condition: String },
    #[error("no epsilon on the dyadic grid satisfies P3 up to j = {j_max}")]
    NoEpsilon { j_max: usize },
}

#[derive(Debug, Clone)]
pub struct MajorantParams {
    pub c: Scalar,
    pub epsilon: Scalar,
    pub sigma: Sigma,
    mode: NumericMode,
}

impl MajorantParams {
    pub fn new(c: Scalar, epsilon: Scalar, sigma: Sigma) -> Result<Self, MajorantError> {
        let mode = NumericMode::for_sigma(&sigma);
        let c = c.to_mode(mode);
        let epsilon = epsilon.to_mode(mode);
        if c.signum() <= 0 {
            return Err(MajorantError::NonPositiveC);
        }
        if epsilon.signum() <= 0 || epsilon > Scalar::one(mode) {
            return Err(MajorantError::EpsilonOutOfRange);
        }
        Ok(MajorantParams {
            c,
            epsilon,
            sigma,
            mode,
        })
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn m(&self, q: usize) -> Scalar {
        small_m(&self.c, &self.sigma, q, self.mode)
    }

    pub fn big_m(&self, q: usize) -> Scalar {
        if q == 0 {
            return self.c.checked_div(&self.int(8)).expect("8 != 0");
        }
        let eps_pow = self.epsilon.pow_i64(1 - q as i64).expect("epsilon > 0");
        &eps_pow * &self.m(q)
    }

    fn int(&self, v: i64) -> Scalar {
        Scalar::from_i64(v, self.mode)
    }
}

fn small_m(c: &Scalar, sigma: &Sigma, q: usize, mode: NumericMode) -> Scalar {
    let f = factorial_pow(q as u32, sigma, mode).expect("mode chosen to fit sigma");
    let den = Scalar::from_i64(((q + 1) * (q + 1)) as i64, mode);
    (&c.to_mode(mode) * &f)
        .checked_div(&den)
        .expect("q + 1 > 0")
}

/// Relative slack for big-float comparisons.
fn slack(mode: NumericMode) -> Option<Scalar> {
    mode.precision_bits()
        .map(|p| Scalar::from_rational(Rational::from(1) >> (p - 16), mode))
}

/// `lhs <= rhs`, exact or with the big-float margin taken against the claim.
pub(crate) fn le(lhs: &Scalar, rhs: &Scalar) -> bool {
    match slack(lhs.mode()) {
        None => lhs <= rhs,
        Some(s) => {
            let shrink = &Scalar::one(lhs.mode()) - &s;
            lhs <= &(rhs * &shrink)
        }
    }
}

/// `S_k = sum_l C(k,l) m_l m_(k-l) / (c m_k)`, which does not depend on c.
pub fn c_free_sum(sigma: &Sigma, k: usize, mode: NumericMode) -> Scalar {
    let one = Scalar::one(mode);
    let mk = small_m(&one, sigma, k, mode);
    let mut acc = Scalar::zero(mode);
    for l in 0..=k {
        let t = &small_m(&one, sigma, l, mode) * &small_m(&one, sigma, k - l, mode);
        acc += &t.mul_integer(&binomial(k as i64, l as i64));
    }
    acc.checked_div(&mk).expect("m_k > 0")
}

/// `sum_l C(k,l) m_l m_(k-l) / m_k`; the base inequality holds at k iff this is <= 1.
pub fn base_margin(c: &Scalar, sigma: &Sigma, k: usize) -> Scalar {
    let mode = NumericMode::for_sigma(sigma);
    &c.to_mode(mode) * &c_free_sum(sigma, k, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMax {
    /// `1 / max_{k <= k_max} S_k`
    pub c_max: Scalar,
    pub argmax_k: usize,
    pub s_max: Scalar,
}

pub fn find_c_max(sigma: &Sigma, k_max: usize) -> CMax {
    let mode = NumericMode::for_sigma(sigma);
    let sums: Vec<Scalar> = (0..=k_max)
        .into_par_iter()
        .map(|k| c_free_sum(sigma, k, mode))
        .collect();
    let (argmax_k, s_max) =
        sums.iter().enumerate().fold(
            (0, &sums[0]),
            |best, (k, s)| if s > best.1 { (k, s) } else { best },
        );
    CMax {
        c_max: s_max.recip().expect("S_0 = 1"),
        argmax_k,
        s_max: s_max.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRow {
    pub index: usize,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub holds: bool,
}

fn row(index: usize, lhs: Scalar, rhs: Scalar) -> VerdictRow {
    let holds = le(&lhs, &rhs);
    VerdictRow {
        index,
        lhs,
        rhs,
        holds,
    }
}

/// P1: `sum_{0<l<k} C(k,l) M_l M_(k-l) <= ε M_k` for `2 <= k <= k_max`.
pub fn check_p1(params: &MajorantParams, k_max: usize) -> Vec<VerdictRow> {
    let ms: Vec<Scalar> = (0..=k_max).map(|q| params.big_m(q)).collect();
    (2..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut lhs = Scalar::zero(params.mode);
            for l in 1..k {
                let t = &ms[l] * &ms[k - l];
                lhs += &t.mul_integer(&binomial(k as i64, l as i64));
            }
            row(k, lhs, &params.epsilon * &ms[k])
        })
        .collect()
}

/// P2: `M_j <= ε M_(j+1)` for `1 <= j <= j_max`.
pub fn check_p2(params: &MajorantParams, j_max: usize) -> Vec<VerdictRow> {
    (1..=j_max)
        .map(|j| row(j, params.big_m(j), &params.epsilon * &params.big_m(j + 1)))
        .collect()
}

/// P3: `C1^(j+1) (j!)^σ <= M_j` for `2 <= j <= j_max`.
pub fn check_p3(params: &MajorantParams, c1: &Scalar, j_max: usize) -> Vec<VerdictRow> {
    let c1 = c1.to_mode(params.mode);
    (2..=j_max)
        .map(|j| {
            let f = factorial_pow(j as u32, &params.sigma, params.mode).expect("mode fits sigma");
            row(j, &c1.pow_u32(j as u32 + 1) * &f, params.big_m(j))
        })
        .collect()
}

/// `{2^-1, ..., 2^-20}`, largest first.
pub fn dyadic_grid() -> Vec<Rational> {
    (1..=20).map(|k| Rational::from(1) >> k).collect()
}

/// Largest ε on `grid` for which P3 holds at every `2 <= j <= j_max`.
pub fn epsilon_1(
    c: &Scalar,
    sigma: &Sigma,
    c1: &Scalar,
    j_max: usize,
    grid: &[Rational],
) -> Option<Rational> {
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    sorted.into_iter().find(|eps| {
        let mode = NumericMode::for_sigma(sigma);
        MajorantParams::new(
            c.clone(),
            Scalar::from_rational(eps.clone(), mode),
            sigma.clone(),
        )
        .map(|p| check_p3(&p, c1, j_max).iter().all(|r| r.holds))
        .unwrap_or(false)
    })
}

/// `M = max{2, 8 C1 / c, 4 C1^2 / c}`.
pub fn constant_m(c: &Scalar, c1: &Scalar) -> Scalar {
    let mode = c.mode();
    let c1 = c1.to_mode(mode);
    let a = Scalar::from_i64(2, mode);
    let b = (&Scalar::from_i64(8, mode) * &c1)
        .checked_div(c)
        .expect("c > 0");
    let d = (&Scalar::from_i64(4, mode) * &c1.pow_u32(2))
        .checked_div(c)
        .expect("c > 0");
    a.max(&b).max(&d).clone()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub big_m: Scalar,
    pub epsilon_1: Option<Scalar>,
    /// `(condition, holds)` for the four smallness conditions.
    pub conditions: Vec<(String, bool)>,
}

impl Admissibility {
    pub fn holds(&self) -> bool {
        self.conditions.iter().all(|(_, ok)| *ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.conditions
            .iter()
            .find(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
    }
}

pub const P3_J_MAX: usize = 50;

/// The four smallness conditions of the inductive step:
/// `|α_c| ε^2 <= 1/4`, `ε^4 <= 1/4`, `M (M_0 + ε) ε^4 <= 1/4`, `ε <= ε_1`.
pub fn admissibility(params: &MajorantParams, alpha_c: &Scalar, c1: &Scalar) -> Admissibility {
    let mode = params.mode;
    let eps = &params.epsilon;
    let quarter = Scalar::from_rational(Rational::from((1, 4)), mode);
    let eps2 = eps.pow_u32(2);
    let eps4 = eps.pow_u32(4);
    let big_m = constant_m(&params.c, c1);
    let m0_eps = &params.big_m(0) + eps;
    let poly = &(&big_m * &m0_eps) * &eps4;
    let eps1 = epsilon_1(&params.c, &params.sigma, c1, P3_J_MAX, &dyadic_grid())
        .map(|e| Scalar::from_rational(e, mode));
    let conditions = vec![
        (
            "|alpha_c| eps^2 <= 1/4".to_string(),
            le(&(&alpha_c.to_mode(mode).abs() * &eps2), &quarter),
        ),
        ("eps^4 <= 1/4".to_string(), le(&eps4, &quarter)),
        (
            "M (M_0 + eps) eps^4 <= 1/4".to_string(),
            le(&poly, &quarter),
        ),
        (
            "eps <= eps_1".to_string(),
            eps1.as_ref().is_some_and(|e1| eps <= e1),
        ),
    ];
    Admissibility {
        big_m,
        epsilon_1: eps1,
        conditions,
    }
}

/// Largest dyadic ε meeting all four admissibility conditions.
pub fn largest_admissible_epsilon(
    c: &Scalar,
    sigma: &Sigma,
    alpha_c: &Scalar,
    c1: &Scalar,
) -> Result<Rational, MajorantError> {
    let mode = NumericMode::for_sigma(sigma);
    let eps1 = epsilon_1(c, sigma, c1, P3_J_MAX, &dyadic_grid())
        .ok_or(MajorantError::NoEpsilon { j_max: P3_J_MAX })?;
    for eps in dyadic_grid() {
        if eps > eps1 {
            continue;
        }
        let p = MajorantParams::new(
            c.clone(),
            Scalar::from_rational(eps.clone(), mode),
            sigma.clone(),
        )?;
        if admissibility(&p, alpha_c, c1).holds() {
            return Ok(eps);
        }
    }
    Err(MajorantError::Inadmissible {
        condition: "no dyadic epsilon down to 2^-20".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub j: usize,
    pub l: usize,
    pub m: usize,
    pub value: Scalar,
    pub bound: Scalar,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainEstimate {
    pub big_m: Scalar,
    pub rows: Vec<EstimateRow>,
    pub first_violation: Option<(usize, usize, usize)>,
}

/// `|d_t^j d_x^l d_y^m u(0,0,0)| <= M^(j+1) M_(l+m+αj)` over the staircase
/// entries with `j <= j_max`, `l + m <= lm_max`.
pub fn main_estimate_check(
    timejet: &TimeJet,
    params: &MajorantParams,
    alpha_c: &Scalar,
    c1: &Scalar,
    alpha: usize,
    j_max: usize,
    lm_max: usize,
) -> Result<MainEstimate, MajorantError> {
    let adm = admissibility(params, alpha_c, c1);
    if let Some(cond) = adm.first_failure() {
        return Err(MajorantError::Inadmissible {
            condition: cond.to_string(),
        });
    }
    let mode = params.mode;
    let big_m = adm.big_m;
    let mut rows = Vec::new();
    for j in 0..=j_max.min(timejet.max_time_order()) {
        let level = timejet.level(j);
        let mj = big_m.pow_u32(j as u32 + 1);
        for l in 0..=level.order_x().min(lm_max) {
            for m in 0..=level.order_y().min(lm_max - l) {
                let value = level.get(l, m).to_mode(mode).abs();
                let bound = &mj * &params.big_m(l + m + alpha * j);
                let holds = le(&value, &bound);
                rows.push(EstimateRow {
                    j,
                    l,
                    m,
                    value,
                    bound,
                    holds,
                });
            }
        }
    }
    let first_violation = rows.iter().find(|r| !r.holds).map(|r| (r.j, r.l, r.m));
    Ok(MainEstimate {
        big_m,
        rows,
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionRow {
    pub j: usize,
    pub value: Scalar,
    /// `M^(j+1) M_(5j)`
    pub majorant: Scalar,
    /// `L^(j+1) (j!)^(5σ)`
    pub gevrey: Scalar,
    pub holds: bool,
}

/// `L = max{M ε c, M 5^(5σ) / ε^5}`; σ must be an integer in exact mode.
pub fn conversion_constant(params: &MajorantParams, big_m: &Scalar) -> Scalar {
    let mode = params.mode;
    let eps = &params.epsilon;
    let a = &(big_m * eps) * &params.c;
    let five_pow = match params.sigma.integer() {
        Some(s) => Scalar::from_i64(5, mode).pow_u32(5 * s),
        None => {
            let prec = mode.precision_bits().expect("float mode");
            let e = params.sigma.to_big_float(prec) * 5u32;
            Scalar::Float(rug::Float::with_val(prec, 5u32).pow(e))
        }
    };
    let b = (big_m * &five_pow)
        .checked_div(&eps.pow_u32(5))
        .expect("eps > 0");
    a.max(&b).clone()
}

/// Entry-wise `|d_t^j u| <= M^(j+1) M_(5j) <= L^(j+1) (j!)^(5σ)` at the origin.
pub fn final_conversion_check(
    timejet: &TimeJet,
    params: &MajorantParams,
    c1: &Scalar,
) -> Vec<ConversionRow> {
    let mode = params.mode;
    let big_m = constant_m(&params.c, c1);
    let l = conversion_constant(params, &big_m);
    let five_sigma = Sigma::new(params.sigma.value().clone() * 5u32).expect("5σ >= 1");
    timejet
        .origin_series()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let value = v.to_mode(mode).abs();
            let majorant = &big_m.pow_u32(j as u32 + 1) * &params.big_m(5 * j);
            let gevrey = &l.pow_u32(j as u32 + 1)
                * &factorial_pow(j as u32, &five_sigma, mode).expect("mode fits sigma");
            let holds = le(&value, &majorant) && le(&majorant, &gevrey);
            ConversionRow {
                j,
                value,
                majorant,
                gevrey,
                holds,
            }
        })
        .collect()
}

/// Smallest `E` with `(5j+1)^σ <= E^(j/σ) j^-2`, i.e. `((5j+1)^σ j^2)^(σ/j)`.
pub fn min_admissible_e(j: usize, sigma: &Sigma) -> f64 {
    let jf = j as f64;
    let s = sigma.to_f64();
    ((5.0 * jf + 1.0).powf(s) * jf * jf).powf(s / jf)
}
