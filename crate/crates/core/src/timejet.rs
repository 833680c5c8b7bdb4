//! Mixed derivatives `d_t^j d_x^n1 d_y^n2 u(0,0,0)` by repeated substitution
//! of the model into itself.
//!
//! Level `j` is a [`Jet2`] of orders `(Nx - j*cx, Ny - j*cy)` where `cx`, `cy`
//! are the per-level costs reported by [`PdeModel::x_cost_per_level`] and
//! [`PdeModel::y_cost_per_level`]. Level `j+1` is assembled from levels
//! `0..=j` only, and bilinear terms use the time-Leibniz rule
//! `d_t^j(fg) = sum_r C(j,r) (d_t^{j-r} f)(d_t^r g)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{leibniz_accumulate, Binomials, Jet2, JetError, JetJson, JetView};
use crate::pde::PdeModel;
use crate::scalar::{binomial, NumericMode, Scalar};

/// Coefficient with the (x, y) orders of the left and right factors.
type BilinearSlot = (Scalar, (usize, usize), (usize, usize));

#[derive(Debug, Error)]
pub enum RecursionError {
    #[error("insufficient {axis} budget: need order {required}, initial jet has {available}")]
    InsufficientBudget {
        axis: char,
        required: usize,
        available: usize,
    },
    #[error("model contains dxinv but the initial jet depends on y and no primitive was supplied")]
    MissingPrimitive,
    #[error("primitive table too small at level {level}: need {required} entries, found {found}")]
    PrimitiveShape {
        level: usize,
        required: usize,
        found: usize,
    },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Initial-jet orders needed to produce `(nx_out, ny_out)` at every level up to `j_max`.
pub fn budget_for(model: &PdeModel, j_max: usize, nx_out: usize, ny_out: usize) -> (usize, usize) {
    (
        nx_out + model.x_cost_per_level() * j_max,
        ny_out + model.y_cost_per_level() * j_max,
    )
}

/// Values of the x-antiderivative on the line `x = 0`:
/// `levels[j][n2] = d_t^j d_y^n2 (d_x^{-1} u)(0,0,0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSlice {
    pub levels: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveSource {
    /// Model has no dxinv term.
    NotNeeded,
    /// y-independent data; the primitive vanishes on `x = 0`.
    ZeroConstant,
    Supplied,
}

#[derive(Debug, Clone)]
pub struct TimeJet {
    pub model: String,
    pub primitive: PrimitiveSource,
    levels: Vec<Jet2>,
    /// Weight offset `c_j`: level `j` entries at `(n1,n2)` have order `n1 + n2 + c_j`.
    order_offsets: Vec<i64>,
    /// Largest total order of the two factors in `d_t^j P(u)`, for `j < J`.
    product_orders: Vec<i64>,
}

impl TimeJet {
    pub fn max_time_order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Jet2] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &Jet2 {
        &self.levels[j]
    }

    pub fn mode(&self) -> NumericMode {
        self.levels[0].mode()
    }

    /// `d_t^j d_x^n1 d_y^n2 u(0,0,0)`, `None` outside the staircase.
    pub fn value(&self, j: usize, n1: usize, n2: usize) -> Option<&Scalar> {
        self.levels.get(j)?.try_get(n1, n2)
    }

    /// `d_t^j u(0,0,0)` for `j = 0..=J`.
    pub fn origin_series(&self) -> Vec<Scalar> {
        self.levels.iter().map(|l| l.get(0, 0).clone()).collect()
    }

    pub fn order_offsets(&self) -> &[i64] {
        &self.order_offsets
    }

    pub fn product_orders(&self) -> &[i64] {
        &self.product_orders
    }

    pub fn to_json(&self) -> TimeJetJson {
        TimeJetJson {
            model: self.model.clone(),
            max_time_order: self.max_time_order(),
            primitive: self.primitive,
            levels: self.levels.iter().map(Jet2::to_json).collect(),
            product_orders: self.product_orders.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeJetJson {
    pub model: String,
    pub max_time_order: usize,
    pub primitive: PrimitiveSource,
    pub levels: Vec<JetJson>,
    pub product_orders: Vec<i64>,
}

pub fn time_jet(model: &PdeModel, phi: &Jet2, j_max: usize) -> Result<TimeJet, RecursionError> {
    time_jet_with_primitive(model, phi, j_max, None)
}

pub fn time_jet_with_primitive(
    model: &PdeModel,
    phi: &Jet2,
    j_max: usize,
    primitive: Option<&PrimitiveSlice>,
) -> Result<TimeJet, RecursionError> {
    let cx = model.x_cost_per_level();
    let cy = model.y_cost_per_level();
    let nx = phi.order_x();
    let ny = phi.order_y();
    if cx * j_max > nx {
        return Err(RecursionError::InsufficientBudget {
            axis: 'x',
            required: cx * j_max,
            available: nx,
        });
    }
    if cy * j_max > ny {
        return Err(RecursionError::InsufficientBudget {
            axis: 'y',
            required: cy * j_max,
            available: ny,
        });
    }
    let mode = phi.mode();

    let inv_dy_max = model
        .linear
        .iter()
        .filter(|t| t.dx < 0)
        .map(|t| t.dy as usize)
        .max();
    let source = match (inv_dy_max, primitive) {
        (None, _) => PrimitiveSource::NotNeeded,
        (Some(_), Some(_)) => PrimitiveSource::Supplied,
        (Some(_), None) if phi.is_y_independent() => PrimitiveSource::ZeroConstant,
        (Some(_), None) => return Err(RecursionError::MissingPrimitive),
    };
    if let (Some(dy_max), Some(w)) = (inv_dy_max, primitive) {
        for j in 0..j_max {
            let required = ny - cy * (j + 1) + dy_max + 1;
            let found = w.levels.get(j).map_or(0, Vec::len);
            if found < required {
                return Err(RecursionError::PrimitiveShape {
                    level: j,
                    required,
                    found,
                });
            }
        }
    }

    let linear: Vec<(Scalar, i32, usize)> = model
        .linear
        .iter()
        .map(|t| {
            (
                Scalar::from_rational(t.coef.clone(), mode),
                t.dx,
                t.dy as usize,
            )
        })
        .collect();
    let bilinear: Vec<BilinearSlot> = model
        .bilinear
        .iter()
        .map(|t| {
            (
                Scalar::from_rational(t.coef.clone(), mode),
                (t.left.0 as usize, t.left.1 as usize),
                (t.right.0 as usize, t.right.1 as usize),
            )
        })
        .collect();

    let mut binom = Binomials::with_rows(nx.max(ny).max(j_max) + 1);
    let mut levels = vec![phi.clone()];
    let mut offsets = vec![0i64];
    let mut product_orders = Vec::new();

    for j in 0..j_max {
        let ox = nx - cx * (j + 1);
        let oy = ny - cy * (j + 1);
        let cur = &levels[j];
        let mut next = Jet2::zero(ox, oy, mode);

        for (coef, dx, dy) in &linear {
            if coef.is_zero() {
                continue;
            }
            for n1 in 0..=ox {
                for n2 in 0..=oy {
                    let src = if *dx >= 0 {
                        Some(cur.get(n1 + *dx as usize, n2 + dy))
                    } else if n1 >= 1 {
                        Some(cur.get(n1 - 1, n2 + dy))
                    } else {
                        match (source, primitive) {
                            (PrimitiveSource::Supplied, Some(w)) => Some(&w.levels[j][n2 + dy]),
                            _ => None,
                        }
                    };
                    if let Some(v) = src {
                        if !v.is_zero() {
                            let add = &v.to_mode(mode) * coef;
                            *next.get_mut(n1, n2) += &add;
                        }
                    }
                }
            }
        }

        for (coef, (lx, ly), (rx, ry)) in &bilinear {
            if coef.is_zero() {
                continue;
            }
            for r in 0..=j {
                let weight = coef.mul_integer(&binomial(j as i64, r as i64));
                leibniz_accumulate(
                    &mut next,
                    JetView::new(&levels[j - r], *lx, *ly),
                    JetView::new(&levels[r], *rx, *ry),
                    Some(&weight),
                    &mut binom,
                );
            }
        }

        let lin_offset = model
            .linear
            .iter()
            .map(|t| t.total_order() + offsets[j])
            .max()
            .unwrap_or(i64::MIN);
        let pair_offset = (0..=j)
            .map(|r| offsets[j - r] + offsets[r])
            .max()
            .unwrap_or(0);
        let product_order = model
            .bilinear
            .iter()
            .map(|t| t.total_order() + pair_offset)
            .max();
        product_orders.push(product_order.unwrap_or(i64::MIN));
        offsets.push(lin_offset.max(product_order.unwrap_or(i64::MIN)));
        levels.push(next);
    }

    Ok(TimeJet {
        model: model.label.clone(),
        primitive: source,
        levels,
        order_offsets: offsets,
        product_orders,
    })
}

/// `d_t^j u(0,0,0) = (±1)^j phi[αj][0] + P_j(phi)(0,0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingSplit {
    pub leading: Vec<Scalar>,
    pub remainder: Vec<Scalar>,
}

pub fn leading_split(model: &PdeModel, timejet: &TimeJet, phi: &Jet2) -> LeadingSplit {
    let alpha = model.leading_order as usize;
    let mode = timejet.mode();
    let mut leading = Vec::new();
    let mut remainder = Vec::new();
    for (j, v) in timejet.origin_series().into_iter().enumerate() {
        let base = phi.get(alpha * j, 0).to_mode(mode);
        let lead = if model.leading_sign < 0 && j % 2 == 1 {
            -base
        } else {
            base
        };
        remainder.push(&v - &lead);
        leading.push(lead);
    }
    LeadingSplit { leading, remainder }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::parse_pde;
    use crate::scalar::{factorial_pow, Sigma};
    use rug::Rational;

    fn prescribed(sigma: u32, nx: usize, ny: usize) -> Jet2 {
        let s = Sigma::from_u32(sigma).unwrap();
        Jet2::from_fn(nx, ny, NumericMode::Exact, |n1, n2| {
            if n2 == 0 {
                factorial_pow(n1 as u32, &s, NumericMode::Exact).unwrap()
            } else {
                Scalar::zero(NumericMode::Exact)
            }
        })
    }

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(v, NumericMode::Exact)
    }

    #[test]
    fn first_level_kp() {
        let m0 = PdeModel::kp1_5(Rational::new());
        let tj = time_jet(&m0, &prescribed(1, 6, 2), 1).unwrap();
        assert_eq!(tj.origin_series()[1], ex(-121));
        let m1 = PdeModel::kp1_5(Rational::from(1));
        let tj = time_jet(&m1, &prescribed(1, 6, 2), 1).unwrap();
        assert_eq!(tj.origin_series()[1], ex(-127));
        assert_eq!(tj.primitive, PrimitiveSource::ZeroConstant);
    }

    #[test]
    fn budgets() {
        let kp = PdeModel::kp1_5(Rational::new());
        assert_eq!(budget_for(&kp, 1, 0, 0), (6, 2));
        assert_eq!(budget_for(&kp, 0, 3, 4), (3, 4));
        assert_eq!(budget_for(&kp, 8, 0, 0).0, 48);
        let kaw = parse_pde("kawahara(beta=1, delta=1)").unwrap();
        assert_eq!(budget_for(&kaw, 2, 0, 0).0, 12);
    }

    #[test]
    fn insufficient_budget() {
        let kp = PdeModel::kp1_5(Rational::new());
        assert!(matches!(
            time_jet(&kp, &prescribed(1, 11, 4), 2),
            Err(RecursionError::InsufficientBudget { axis: 'x', .. })
        ));
        assert!(matches!(
            time_jet(&kp, &prescribed(1, 12, 3), 2),
            Err(RecursionError::InsufficientBudget { axis: 'y', .. })
        ));
    }

    #[test]
    fn missing_primitive() {
        let kp = PdeModel::kp1_5(Rational::new());
        let mut phi = prescribed(1, 6, 2);
        phi.set(0, 1, ex(1));
        assert!(matches!(
            time_jet(&kp, &phi, 1),
            Err(RecursionError::MissingPrimitive)
        ));
        let w = PrimitiveSlice {
            levels: vec![vec![ex(0), ex(0), ex(5)]],
        };
        let tj = time_jet_with_primitive(&kp, &phi, 1, Some(&w)).unwrap();
        // -120 - phi*phi_x - w[0][2]
        assert_eq!(tj.origin_series()[1], ex(-126));
        let short = PrimitiveSlice {
            levels: vec![vec![ex(0)]],
        };
        assert!(matches!(
            time_jet_with_primitive(&kp, &phi, 1, Some(&short)),
            Err(RecursionError::PrimitiveShape { .. })
        ));
    }

    #[test]
    fn zero_is_fixed() {
        let kp = PdeModel::kp1_5(Rational::from(3));
        let tj = time_jet(&kp, &Jet2::zero(18, 6, NumericMode::Exact), 3).unwrap();
        assert!(tj.levels().iter().all(Jet2::is_zero));
    }

    #[test]
    fn split_and_orders() {
        let kp = PdeModel::kp1_5(Rational::new());
        let phi = prescribed(1, 30, 10);
        let tj = time_jet(&kp, &phi, 5).unwrap();
        let split = leading_split(&kp, &tj, &phi);
        assert_eq!(split.leading[0], ex(1));
        assert!(split.remainder[0].is_zero());
        assert_eq!(split.remainder[1], ex(-1));
        assert_eq!(split.leading[2], ex(3628800));
        for (j, &o) in tj.product_orders().iter().enumerate() {
            assert!(o <= 5 * j as i64 + 1);
            assert!(o < 5 * (j as i64 + 1));
        }
        for j in 0..=5 {
            let l = tj.level(j);
            for n1 in 0..=l.order_x() {
                for n2 in 1..=l.order_y() {
                    assert!(l.get(n1, n2).is_zero());
                }
            }
        }
    }

    #[test]
    fn float_mode_tracks_exact() {
        let kp = PdeModel::kp1_5(Rational::new());
        let phi = prescribed(1, 24, 0);
        let kaw = parse_pde("-dx^5 u - (u)(dx u)").unwrap();
        for model in [&kp, &kaw] {
            let phi = if model.y_cost_per_level() == 0 {
                phi.clone()
            } else {
                prescribed(1, 24, 8)
            };
            let exact = time_jet(model, &phi, 4).unwrap();
            let fmode = NumericMode::float(256).unwrap();
            let phif = Jet2::from_fn(phi.order_x(), phi.order_y(), fmode, |a, b| {
                phi.get(a, b).to_mode(fmode)
            });
            let float = time_jet(model, &phif, 4).unwrap();
            for (a, b) in exact.origin_series().iter().zip(float.origin_series()) {
                let rel = ((a.to_f64() - b.to_f64()) / a.to_f64()).abs();
                assert!(rel < 1e-15);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let kp = PdeModel::kp1_5(Rational::new());
        let tj = time_jet(&kp, &prescribed(1, 12, 4), 2).unwrap();
        let js = serde_json::to_string(&tj.to_json()).unwrap();
        let back: TimeJetJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.levels.len(), 3);
        let l2 = Jet2::from_json(&back.levels[2]).unwrap();
        assert_eq!(&l2, tj.level(2));
    }
}
