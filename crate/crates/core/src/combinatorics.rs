//! Exact checks of the binomial counting inequality behind the nonlinear
//! estimate, its generating-function form and the Pascal-type step.

use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::majorant::MajorantParams;
use crate::scalar::{binomial, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("s = {s} outside 1..={k}")]
    OutOfRange { s: usize, k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IndexTriple {
    pub ell: usize,
    pub m: usize,
    pub j: usize,
}

impl IndexTriple {
    pub fn new(ell: usize, m: usize, j: usize) -> Self {
        IndexTriple { ell, m, j }
    }

    /// `k = ell + m + 5j + 1`
    pub fn k(&self) -> usize {
        self.ell + self.m + 5 * self.j + 1
    }
}

fn c(n: usize, k: usize) -> Integer {
    binomial(n as i64, k as i64)
}

/// Sum of `C(ell,p) C(m,q) C(j,r)` over `(p+1) + q + 5r = s`.
pub fn count_sum(t: IndexTriple, s: usize) -> Result<Integer, CombinatoricsError> {
    let k = t.k();
    if s < 1 || s > k {
        return Err(CombinatoricsError::OutOfRange { s, k });
    }
    let mut total = Integer::new();
    for r in 0..=t.j.min((s - 1) / 5) {
        let rest = s - 1 - 5 * r;
        for p in 0..=t.ell.min(rest) {
            let q = rest - p;
            if q <= t.m {
                total += c(t.ell, p) * c(t.m, q) * c(t.j, r);
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingRow {
    pub triple: IndexTriple,
    pub s: usize,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingVerdict {
    pub triple: IndexTriple,
    pub rows: Vec<CountingRow>,
    pub first_violation: Option<usize>,
}

impl CountingVerdict {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// `count_sum(t, s) <= C(k, s)` for every `1 <= s <= k`.
pub fn counting_inequality(t: IndexTriple) -> CountingVerdict {
    let k = t.k();
    let rows: Vec<CountingRow> = (1..=k)
        .map(|s| {
            let lhs = count_sum(t, s).expect("s in range");
            let rhs = c(k, s);
            CountingRow {
                triple: t,
                s,
                holds: lhs <= rhs,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            }
        })
        .collect();
    let first_violation = rows.iter().find(|r| !r.holds).map(|r| r.s);
    CountingVerdict {
        triple: t,
        rows,
        first_violation,
    }
}

/// Every triple with `ell <= l_max`, `m <= m_max`, `j <= j_max`, in lexicographic order.
pub fn counting_scan(l_max: usize, m_max: usize, j_max: usize) -> Vec<CountingVerdict> {
    let triples: Vec<IndexTriple> = (0..=l_max)
        .flat_map(|l| {
            (0..=m_max).flat_map(move |m| (0..=j_max).map(move |j| IndexTriple::new(l, m, j)))
        })
        .collect();
    triples.into_par_iter().map(counting_inequality).collect()
}

/// Coefficients of `(1+x)^n (1+x^5)^j`.
pub fn gf_coefficients(n: usize, j: usize) -> Vec<Integer> {
    let deg = n + 5 * j;
    let mut out = vec![Integer::new(); deg + 1];
    for r in 0..=j {
        let cr = c(j, r);
        for p in 0..=n {
            out[p + 5 * r] += c(n, p) * &cr;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyVerdict {
    pub n: usize,
    pub j: usize,
    /// First power `t` with `[x^t] (1+x)^n (1+x^5)^j > C(n+5j, t)`.
    pub first_violation: Option<usize>,
    pub equalities: usize,
}

impl PolyVerdict {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Coefficient-wise `(1+x)^n (1+x^5)^j <= (1+x)^(n+5j)`.
pub fn poly_coeff_inequality(n: usize, j: usize) -> PolyVerdict {
    let lhs = gf_coefficients(n, j);
    let mut first_violation = None;
    let mut equalities = 0;
    for (t, a) in lhs.iter().enumerate() {
        let b = c(n + 5 * j, t);
        if *a > b && first_violation.is_none() {
            first_violation = Some(t);
        }
        if *a == b {
            equalities += 1;
        }
    }
    PolyVerdict {
        n,
        j,
        first_violation,
        equalities,
    }
}

pub fn poly_scan(n_max: usize, j_max: usize) -> Vec<PolyVerdict> {
    let pairs: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n| (0..=j_max).map(move |j| (n, j)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(n, j)| poly_coeff_inequality(n, j))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PascalAudit {
    pub n: usize,
    pub t: usize,
    /// `C(n+5, t)`
    pub target: String,
    /// `sum_{i=0}^{5} C(n, t-i)`
    pub stated_sum: String,
    /// `sum_i C(5,i) C(n, t-i)`
    pub vandermonde_sum: String,
    /// `C(n,t) + C(n,t-5)`
    pub a_t: String,
    pub stated_identity_holds: bool,
    pub vandermonde_holds: bool,
    pub inequality_holds: bool,
}

fn c_signed(n: usize, k: i64) -> Integer {
    binomial(n as i64, k)
}

pub fn pascal_step_audit(n: usize, t: usize) -> PascalAudit {
    let ti = t as i64;
    let target = c(n + 5, t);
    let stated: Integer = (0..=5).map(|i| c_signed(n, ti - i)).sum();
    let vandermonde: Integer = (0..=5)
        .map(|i| c(5, i as usize) * c_signed(n, ti - i))
        .sum();
    let a_t = c_signed(n, ti) + c_signed(n, ti - 5);
    PascalAudit {
        n,
        t,
        stated_identity_holds: stated == target,
        vandermonde_holds: vandermonde == target,
        inequality_holds: a_t <= target,
        target: target.to_string(),
        stated_sum: stated.to_string(),
        vandermonde_sum: vandermonde.to_string(),
        a_t: a_t.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaVerdict {
    pub triple: IndexTriple,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub holds: bool,
}

/// Triple sum `sum C(l,p) C(m,q) C(j,r) M_{(l-p)+(m-q)+5(j-r)} M_{(p+1)+q+5r}`
/// against `sum_{s=1}^{k} C(k,s) M_s M_{k-s}`.
pub fn lemma_full_check(t: IndexTriple, params: &MajorantParams) -> LemmaVerdict {
    let k = t.k();
    let ms: Vec<Scalar> = (0..=k).map(|q| params.big_m(q)).collect();
    let mut lhs = Scalar::zero(params.mode());
    for p in 0..=t.ell {
        for q in 0..=t.m {
            for r in 0..=t.j {
                let w = c(t.ell, p) * c(t.m, q) * c(t.j, r);
                let a = &ms[(t.ell - p) + (t.m - q) + 5 * (t.j - r)];
                let b = &ms[(p + 1) + q + 5 * r];
                lhs += &(a * b).mul_integer(&w);
            }
        }
    }
    let mut rhs = Scalar::zero(params.mode());
    for s in 1..=k {
        rhs += &(&ms[s] * &ms[k - s]).mul_integer(&c(k, s));
    }
    let holds = crate::majorant::le(&lhs, &rhs);
    LemmaVerdict {
        triple: t,
        lhs,
        rhs,
        holds,
    }
}
