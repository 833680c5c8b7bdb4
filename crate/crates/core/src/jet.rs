//! Truncated two-variable jets.
//!
//! A [`Jet2`] stores raw derivative values `d_x^n1 d_y^n2 f(0,0)` for
//! `0 <= n1 <= order_x`, `0 <= n2 <= order_y`. Values are not divided by
//! factorials, so products use binomial (Leibniz) weights.

use rug::{Assign, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{NumericMode, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("cannot differentiate {requested} times in {axis}: jet order is {available}")]
    OrderUnderflow {
        axis: char,
        requested: usize,
        available: usize,
    },
    #[error("jet table has {found} coefficients, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Pascal triangle of exact binomials, grown on demand.
#[derive(Debug, Clone, Default)]
pub struct Binomials {
    rows: Vec<Vec<Integer>>,
}

impl Binomials {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rows(n: usize) -> Self {
        let mut b = Self::new();
        b.ensure(n);
        b
    }

    pub fn ensure(&mut self, n: usize) {
        while self.rows.len() <= n {
            let next = match self.rows.last() {
                None => vec![Integer::from(1)],
                Some(prev) => {
                    let mut row = Vec::with_capacity(prev.len() + 1);
                    row.push(Integer::from(1));
                    for w in prev.windows(2) {
                        row.push(Integer::from(&w[0] + &w[1]));
                    }
                    row.push(Integer::from(1));
                    row
                }
            };
            self.rows.push(next);
        }
    }

    /// `C(n, k)`; panics if row `n` has not been built.
    pub fn get(&self, n: usize, k: usize) -> &Integer {
        &self.rows[n][k]
    }
}

/// Dense derivative table of a function of (x, y) at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order_x: usize,
    order_y: usize,
    mode: NumericMode,
    coeffs: Vec<Scalar>,
}

impl Jet2 {
    pub fn zero(order_x: usize, order_y: usize, mode: NumericMode) -> Self {
        let len = (order_x + 1) * (order_y + 1);
        Jet2 {
            order_x,
            order_y,
            mode,
            coeffs: vec![Scalar::zero(mode); len],
        }
    }

    /// The constant jet with value `c` at the origin and zero derivatives.
    pub fn constant(c: Scalar, order_x: usize, order_y: usize) -> Self {
        let mode = c.mode();
        let mut j = Self::zero(order_x, order_y, mode);
        j.coeffs[0] = c;
        j
    }

    pub fn from_fn(
        order_x: usize,
        order_y: usize,
        mode: NumericMode,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut coeffs = Vec::with_capacity((order_x + 1) * (order_y + 1));
        for n1 in 0..=order_x {
            for n2 in 0..=order_y {
                coeffs.push(f(n1, n2).to_mode(mode));
            }
        }
        Jet2 {
            order_x,
            order_y,
            mode,
            coeffs,
        }
    }

    /// Builds a jet from a row-major table.
    pub fn from_rows(
        order_x: usize,
        order_y: usize,
        mode: NumericMode,
        coeffs: Vec<Scalar>,
    ) -> Result<Self, JetError> {
        let expected = (order_x + 1) * (order_y + 1);
        if coeffs.len() != expected {
            return Err(JetError::Shape {
                expected,
                found: coeffs.len(),
            });
        }
        let coeffs = coeffs.into_iter().map(|c| c.to_mode(mode)).collect();
        Ok(Jet2 {
            order_x,
            order_y,
            mode,
            coeffs,
        })
    }

    pub fn order_x(&self) -> usize {
        self.order_x
    }

    pub fn order_y(&self) -> usize {
        self.order_y
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    #[inline]
    fn idx(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 <= self.order_x && n2 <= self.order_y);
        n1 * (self.order_y + 1) + n2
    }

    pub fn get(&self, n1: usize, n2: usize) -> &Scalar {
        &self.coeffs[self.idx(n1, n2)]
    }

    pub fn try_get(&self, n1: usize, n2: usize) -> Option<&Scalar> {
        (n1 <= self.order_x && n2 <= self.order_y).then(|| self.get(n1, n2))
    }

    pub fn set(&mut self, n1: usize, n2: usize, v: Scalar) {
        let i = self.idx(n1, n2);
        self.coeffs[i] = v.to_mode(self.mode);
    }

    pub fn get_mut(&mut self, n1: usize, n2: usize) -> &mut Scalar {
        let i = self.idx(n1, n2);
        &mut self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// True when every entry with `n2 > 0` vanishes.
    pub fn is_y_independent(&self) -> bool {
        (0..=self.order_x).all(|n1| (1..=self.order_y).all(|n2| self.get(n1, n2).is_zero()))
    }

    /// Restriction to smaller orders.
    pub fn truncate(&self, order_x: usize, order_y: usize) -> Jet2 {
        let ox = order_x.min(self.order_x);
        let oy = order_y.min(self.order_y);
        Jet2::from_fn(ox, oy, self.mode, |a, b| self.get(a, b).clone())
    }

    pub fn scale(&self, c: &Scalar) -> Jet2 {
        Jet2 {
            order_x: self.order_x,
            order_y: self.order_y,
            mode: self.mode,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Entry-wise sum on the common orders.
    pub fn add(&self, other: &Jet2) -> Jet2 {
        let ox = self.order_x.min(other.order_x);
        let oy = self.order_y.min(other.order_y);
        Jet2::from_fn(ox, oy, self.mode, |a, b| self.get(a, b) + other.get(a, b))
    }

    pub fn sub(&self, other: &Jet2) -> Jet2 {
        let ox = self.order_x.min(other.order_x);
        let oy = self.order_y.min(other.order_y);
        Jet2::from_fn(ox, oy, self.mode, |a, b| self.get(a, b) - other.get(a, b))
    }

    /// Leibniz product, defined on `(min(Nx, Mx), min(Ny, My))`.
    pub fn mul(&self, other: &Jet2) -> Jet2 {
        let ox = self.order_x.min(other.order_x);
        let oy = self.order_y.min(other.order_y);
        let mut out = Jet2::zero(ox, oy, self.mode);
        let mut binom = Binomials::with_rows(ox.max(oy));
        leibniz_accumulate(
            &mut out,
            JetView::new(self, 0, 0),
            JetView::new(other, 0, 0),
            None,
            &mut binom,
        );
        out
    }

    /// `d_x^k`: `out[n1][n2] = a[n1 + k][n2]`.
    pub fn dx(&self, k: usize) -> Result<Jet2, JetError> {
        if k > self.order_x {
            return Err(JetError::OrderUnderflow {
                axis: 'x',
                requested: k,
                available: self.order_x,
            });
        }
        Ok(Jet2::from_fn(
            self.order_x - k,
            self.order_y,
            self.mode,
            |a, b| self.get(a + k, b).clone(),
        ))
    }

    /// `d_y^k`: `out[n1][n2] = a[n1][n2 + k]`.
    pub fn dy(&self, k: usize) -> Result<Jet2, JetError> {
        if k > self.order_y {
            return Err(JetError::OrderUnderflow {
                axis: 'y',
                requested: k,
                available: self.order_y,
            });
        }
        Ok(Jet2::from_fn(
            self.order_x,
            self.order_y - k,
            self.mode,
            |a, b| self.get(a, b + k).clone(),
        ))
    }

    /// Formal antiderivative in x with the primitive vanishing on `x = 0`.
    pub fn dx_inv(&self) -> Jet2 {
        Jet2::from_fn(self.order_x + 1, self.order_y, self.mode, |a, b| {
            if a == 0 {
                Scalar::zero(self.mode)
            } else {
                self.get(a - 1, b).clone()
            }
        })
    }

    pub fn to_json(&self) -> JetJson {
        JetJson {
            order_x: self.order_x,
            order_y: self.order_y,
            mode: self.mode.name().to_string(),
            precision_bits: self.mode.precision_bits(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(j: &JetJson) -> Result<Jet2, JetError> {
        let mode = match (j.mode.as_str(), j.precision_bits) {
            ("exact", _) => NumericMode::Exact,
            ("float", Some(p)) => NumericMode::float(p)?,
            ("float", None) => NumericMode::Float {
                precision_bits: crate::scalar::DEFAULT_PRECISION_BITS,
            },
            (other, _) => return Err(ScalarError::Parse(format!("mode `{other}`")).into()),
        };
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| Scalar::parse(s, mode))
            .collect::<Result<Vec<_>, _>>()?;
        Jet2::from_rows(j.order_x, j.order_y, mode, coeffs)
    }
}

/// Wire format: row-major decimal strings, exact rationals as `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetJson {
    pub order_x: usize,
    pub order_y: usize,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    pub coeffs: Vec<String>,
}

/// A jet read through a derivative shift: `view[n1][n2] = jet[n1 + sx][n2 + sy]`.
#[derive(Debug, Clone, Copy)]
pub struct JetView<'a> {
    pub jet: &'a Jet2,
    pub shift_x: usize,
    pub shift_y: usize,
}

impl<'a> JetView<'a> {
    pub fn new(jet: &'a Jet2, shift_x: usize, shift_y: usize) -> Self {
        JetView {
            jet,
            shift_x,
            shift_y,
        }
    }

    pub fn order_x(&self) -> Option<usize> {
        self.jet.order_x.checked_sub(self.shift_x)
    }

    pub fn order_y(&self) -> Option<usize> {
        self.jet.order_y.checked_sub(self.shift_y)
    }

    pub fn get(&self, n1: usize, n2: usize) -> &Scalar {
        self.jet.get(n1 + self.shift_x, n2 + self.shift_y)
    }
}

/// `out[n1][n2] += w * sum_{p,q} C(n1,p) C(n2,q) a[p][q] b[n1-p][n2-q]` over the orders of `out`.
///
/// Zero entries of either operand are skipped, so y-independent tables cost
/// one-dimensional work. Panics if a view does not cover the orders of `out`.
pub fn leibniz_accumulate(
    out: &mut Jet2,
    a: JetView<'_>,
    b: JetView<'_>,
    weight: Option<&Scalar>,
    binom: &mut Binomials,
) {
    let ox = out.order_x;
    let oy = out.order_y;
    assert!(
        a.order_x().is_some_and(|o| o >= ox) && a.order_y().is_some_and(|o| o >= oy),
        "left factor does not cover the output orders"
    );
    assert!(
        b.order_x().is_some_and(|o| o >= ox) && b.order_y().is_some_and(|o| o >= oy),
        "right factor does not cover the output orders"
    );
    binom.ensure(ox.max(oy));

    let nonzero = |v: &JetView<'_>| -> Vec<(usize, usize)> {
        let mut nz = Vec::new();
        for p in 0..=ox {
            for q in 0..=oy {
                if !v.get(p, q).is_zero() {
                    nz.push((p, q));
                }
            }
        }
        nz
    };
    let nz_a = nonzero(&a);
    if nz_a.is_empty() {
        return;
    }
    let nz_b = nonzero(&b);

    let mut coef = Integer::new();
    for &(p, q) in &nz_a {
        let av = a.get(p, q);
        let scaled;
        let av = match weight {
            Some(w) => {
                scaled = av * w;
                &scaled
            }
            None => av,
        };
        for &(pp, qq) in &nz_b {
            let n1 = p + pp;
            let n2 = q + qq;
            if n1 > ox || n2 > oy {
                continue;
            }
            coef.assign(binom.get(n1, p) * binom.get(n2, q));
            out.get_mut(n1, n2)
                .add_scaled_product(&coef, av, b.get(pp, qq));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{factorial_pow, Sigma};

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(v, NumericMode::Exact)
    }

    fn factorial_row(n: usize) -> Jet2 {
        let s = Sigma::from_u32(1).unwrap();
        Jet2::from_fn(n, 0, NumericMode::Exact, |a, _| {
            factorial_pow(a as u32, &s, NumericMode::Exact).unwrap()
        })
    }

    #[test]
    fn leibniz_on_factorial_data() {
        let a = factorial_row(4);
        let p = a.mul(&a);
        // 1*2 + 2*(1*1) + 2*1
        assert_eq!(*p.get(2, 0), ex(6));
        assert_eq!(*p.get(0, 0), ex(1));
    }

    #[test]
    fn constant_one_is_identity() {
        let b = Jet2::from_fn(3, 2, NumericMode::Exact, |a, c| {
            ex((a * 7 + c * 3) as i64 - 5)
        });
        let one = Jet2::constant(ex(1), 3, 2);
        assert_eq!(one.mul(&b), b);
        let z = Jet2::zero(3, 2, NumericMode::Exact);
        assert!(z.mul(&z).is_zero());
    }

    #[test]
    fn product_truncates_to_common_orders() {
        let a = Jet2::constant(ex(2), 4, 1);
        let b = Jet2::constant(ex(3), 2, 3);
        let p = a.mul(&b);
        assert_eq!((p.order_x(), p.order_y()), (2, 1));
        assert_eq!(*p.get(0, 0), ex(6));
    }

    #[test]
    fn shifts() {
        let a = factorial_row(6);
        assert_eq!(*a.dx(5).unwrap().get(0, 0), ex(120));
        assert_eq!(a.dx(0).unwrap(), a);
        let short = factorial_row(3);
        assert_eq!(
            short.dx(4),
            Err(JetError::OrderUnderflow {
                axis: 'x',
                requested: 4,
                available: 3
            })
        );
        assert!(short.dy(1).is_err());
    }

    #[test]
    fn antiderivative() {
        let mut a = Jet2::zero(2, 2, NumericMode::Exact);
        a.set(0, 2, ex(7));
        let p = a.dx_inv();
        assert_eq!(*p.get(1, 2), ex(7));
        assert_eq!(*p.get(0, 2), ex(0));
        assert_eq!(p.order_x(), 3);
        assert_eq!(p.dx(1).unwrap(), a);
        assert!(Jet2::zero(2, 2, NumericMode::Exact).dx_inv().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let mut a = Jet2::zero(1, 1, NumericMode::Exact);
        a.set(1, 0, Scalar::Exact(rug::Rational::from((3, 4))));
        let js = a.to_json();
        assert_eq!(js.coeffs, vec!["0", "0", "3/4", "0"]);
        let text = serde_json::to_string(&js).unwrap();
        let back: JetJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Jet2::from_json(&back).unwrap(), a);
    }

    #[test]
    fn from_rows_checks_shape() {
        assert!(matches!(
            Jet2::from_rows(1, 1, NumericMode::Exact, vec![ex(1)]),
            Err(JetError::Shape {
                expected: 4,
                found: 1
            })
        ));
    }
}
