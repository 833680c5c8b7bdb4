//! Prescribed-derivative initial data and Carleman-class bounds.

use serde::Serialize;

use crate::jet::Jet2;
use crate::scalar::{
    factorial_pow, NumericMode, Scalar, ScalarError, Sigma, DEFAULT_PRECISION_BITS,
};

/// Jet with `d_x^n1 phi(0,0) = (n1!)^σ` and every y-derivative zero.
pub fn gevrey_jet(
    sigma: &Sigma,
    order_x: usize,
    order_y: usize,
    mode: NumericMode,
) -> Result<Jet2, ScalarError> {
    let row = (0..=order_x)
        .map(|n| factorial_pow(n as u32, sigma, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Jet2::from_fn(order_x, order_y, mode, |n1, n2| {
        if n2 == 0 {
            row[n1].clone()
        } else {
            Scalar::zero(mode)
        }
    }))
}

/// `|d_x^n1 d_y^n2 f| <= A^(n1+n2+1) ((n1+n2)!)^σ`.
#[derive(Debug, Clone)]
pub struct CarlemanBoundSpec {
    pub a: Scalar,
    pub sigma: Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlemanViolation {
    pub n1: usize,
    pub n2: usize,
    pub value: String,
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlemanVerdict {
    pub holds: bool,
    pub checked: usize,
    /// First violating entry in row-major order.
    pub witness: Option<CarlemanViolation>,
}

pub fn carleman_check(jet: &Jet2, bound: &CarlemanBoundSpec) -> CarlemanVerdict {
    let mode = match jet.mode() {
        NumericMode::Exact
            if bound.sigma.integer().is_some() && bound.a.as_rational().is_some() =>
        {
            NumericMode::Exact
        }
        NumericMode::Exact => NumericMode::Float {
            precision_bits: DEFAULT_PRECISION_BITS,
        },
        m => m,
    };
    let a = bound.a.to_mode(mode);
    let max_n = jet.order_x() + jet.order_y();
    let factorials: Vec<Scalar> = (0..=max_n)
        .map(|n| factorial_pow(n as u32, &bound.sigma, mode).expect("mode chosen to fit sigma"))
        .collect();
    let mut checked = 0;
    for n1 in 0..=jet.order_x() {
        for n2 in 0..=jet.order_y() {
            checked += 1;
            let v = jet.get(n1, n2).to_mode(mode).abs();
            let bound = &a.pow_u32((n1 + n2 + 1) as u32) * &factorials[n1 + n2];
            if v > bound {
                return CarlemanVerdict {
                    holds: false,
                    checked,
                    witness: Some(CarlemanViolation {
                        n1,
                        n2,
                        value: v.to_string(),
                        bound: bound.to_string(),
                    }),
                };
            }
        }
    }
    CarlemanVerdict {
        holds: true,
        checked,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(v, NumericMode::Exact)
    }

    #[test]
    fn rows() {
        let one = Sigma::from_u32(1).unwrap();
        let j = gevrey_jet(&one, 3, 1, NumericMode::Exact).unwrap();
        let row: Vec<_> = (0..=3).map(|n| j.get(n, 0).clone()).collect();
        assert_eq!(row, vec![ex(1), ex(1), ex(2), ex(6)]);
        assert!(j.get(0, 1).is_zero());
        let two = Sigma::from_u32(2).unwrap();
        let j = gevrey_jet(&two, 2, 0, NumericMode::Exact).unwrap();
        assert_eq!(j.get(2, 0), &ex(4));
        let half = Sigma::new(Rational::from((3, 2))).unwrap();
        assert!(gevrey_jet(&half, 2, 0, NumericMode::Exact).is_err());
    }

    #[test]
    fn carleman() {
        let one = Sigma::from_u32(1).unwrap();
        let bound = CarlemanBoundSpec {
            a: ex(1),
            sigma: one.clone(),
        };
        let j = gevrey_jet(&one, 10, 3, NumericMode::Exact).unwrap();
        assert!(carleman_check(&j, &bound).holds);
        let mut bad = j.clone();
        bad.set(2, 0, ex(100));
        let v = carleman_check(&bad, &bound);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!((w.n1, w.n2), (2, 0));
        assert_eq!(w.bound, "2");
        assert!(carleman_check(&Jet2::zero(4, 4, NumericMode::Exact), &bound).holds);
    }

    #[test]
    fn carleman_float_sigma() {
        let s = Sigma::new(Rational::from((5, 2))).unwrap();
        let mode = NumericMode::for_sigma(&s);
        let j = gevrey_jet(&s, 12, 2, mode).unwrap();
        let bound = CarlemanBoundSpec { a: ex(1), sigma: s };
        assert!(carleman_check(&j, &bound).holds);
    }
}
