use gevrey_core::combinatorics::{count_sum, counting_scan, gf_coefficients, IndexTriple};
use gevrey_core::growth::{estimate_order, GrowthSeries};
use gevrey_core::majorant::{base_margin, check_p1, dyadic_grid, MajorantParams};
use gevrey_core::pde::{BilinearTerm, LinearTerm};
use gevrey_core::timejet::{time_jet_with_primitive, PrimitiveSlice};
use gevrey_core::{
    carleman_check, factorial_pow, gevrey_jet, parse_pde, time_jet, CarlemanBoundSpec, Jet2,
    NumericMode, PdeModel, Scalar, Sigma,
};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

const EXACT: NumericMode = NumericMode::Exact;

fn ex(v: i64) -> Scalar {
    Scalar::from_i64(v, EXACT)
}

fn jet_from(nx: usize, ny: usize, vals: &[i64]) -> Jet2 {
    Jet2::from_fn(nx, ny, EXACT, |a, b| ex(vals[a * (ny + 1) + b]))
}

fn jet_strategy(max_order: usize) -> impl Strategy<Value = Jet2> {
    (0..=max_order, 0..=max_order).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(-5i64..=5, (nx + 1) * (ny + 1))
            .prop_map(move |v| jet_from(nx, ny, &v))
    })
}

fn same_shape_triple(max_order: usize) -> impl Strategy<Value = (Jet2, Jet2, Jet2)> {
    (0..=max_order, 0..=max_order).prop_flat_map(|(nx, ny)| {
        let n = (nx + 1) * (ny + 1);
        (
            prop::collection::vec(-5i64..=5, n),
            prop::collection::vec(-5i64..=5, n),
            prop::collection::vec(-5i64..=5, n),
        )
            .prop_map(move |(a, b, c)| {
                (
                    jet_from(nx, ny, &a),
                    jet_from(nx, ny, &b),
                    jet_from(nx, ny, &c),
                )
            })
    })
}

fn fact(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

/// Multiplies the Taylor polynomials `sum a[p][q] x^p y^q / (p! q!)` and
/// converts the truncated product back to raw derivatives.
fn taylor_product(a: &Jet2, b: &Jet2) -> Jet2 {
    let nx = a.order_x().min(b.order_x());
    let ny = a.order_y().min(b.order_y());
    let coef = |j: &Jet2, p: usize, q: usize| {
        j.get(p, q).as_rational().unwrap() / Rational::from(fact(p) * fact(q))
    };
    let mut poly = vec![vec![Rational::new(); ny + 1]; nx + 1];
    for p in 0..=nx {
        for q in 0..=ny {
            for pp in 0..=nx - p {
                for qq in 0..=ny - q {
                    poly[p + pp][q + qq] += coef(a, p, q) * coef(b, pp, qq);
                }
            }
        }
    }
    Jet2::from_fn(nx, ny, EXACT, |p, q| {
        Scalar::Exact(&poly[p][q] * Rational::from(fact(p) * fact(q)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz_matches_taylor_oracle(a in jet_strategy(6), b in jet_strategy(6)) {
        prop_assert_eq!(a.mul(&b), taylor_product(&a, &b));
    }

    #[test]
    fn ring_laws((a, b, c) in same_shape_triple(4)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        let one = Jet2::constant(ex(1), a.order_x(), a.order_y());
        prop_assert_eq!(one.mul(&a), a.clone());
    }

    #[test]
    fn antiderivative_is_right_inverse(a in jet_strategy(5)) {
        prop_assert_eq!(a.dx_inv().dx(1).unwrap(), a.clone());
        if a.order_x() >= 1 {
            let back = a.dx(1).unwrap().dx_inv();
            for n1 in 0..=a.order_x() {
                for n2 in 0..=a.order_y() {
                    if n1 == 0 {
                        prop_assert!(back.get(0, n2).is_zero());
                    } else {
                        prop_assert_eq!(back.get(n1, n2), a.get(n1, n2));
                    }
                }
            }
        }
    }

    #[test]
    fn linear_models_are_additive(
        seed_a in prop::collection::vec(-4i64..=4, 13 * 5),
        seed_b in prop::collection::vec(-4i64..=4, 13 * 5),
        wa in prop::collection::vec(-4i64..=4, 2 * 5),
        wb in prop::collection::vec(-4i64..=4, 2 * 5),
    ) {
        let model = parse_pde("-dx^5 u + 3/2 dx^3 u - dxinv dy^2 u + 2 dy^2 u").unwrap();
        let a = jet_from(12, 4, &seed_a);
        let b = jet_from(12, 4, &seed_b);
        let prim = |w: &[i64]| PrimitiveSlice {
            levels: w.chunks(5).map(|c| c.iter().map(|&v| ex(v)).collect()).collect(),
        };
        let sum_w: Vec<i64> = wa.iter().zip(&wb).map(|(x, y)| x + y).collect();
        let ta = time_jet_with_primitive(&model, &a, 2, Some(&prim(&wa))).unwrap();
        let tb = time_jet_with_primitive(&model, &b, 2, Some(&prim(&wb))).unwrap();
        let ts = time_jet_with_primitive(&model, &a.add(&b), 2, Some(&prim(&sum_w))).unwrap();
        for j in 0..=2 {
            prop_assert_eq!(ts.level(j), &ta.level(j).add(tb.level(j)));
        }
    }

    #[test]
    fn y_independence_propagates(row in prop::collection::vec(-4i64..=4, 19), alpha_c in -3i64..=3) {
        let model = PdeModel::kp1_5(Rational::from(alpha_c));
        let phi = Jet2::from_fn(18, 6, EXACT, |a, b| if b == 0 { ex(row[a]) } else { ex(0) });
        let tj = time_jet(&model, &phi, 3).unwrap();
        for l in tj.levels() {
            prop_assert!(l.is_y_independent());
        }
    }

    #[test]
    fn gevrey_data_is_carleman(nx in 0usize..25, ny in 0usize..4, s in 1u32..=3, half in any::<bool>()) {
        let sigma = if half {
            Sigma::new(Rational::from((2 * s + 1, 2))).unwrap()
        } else {
            Sigma::from_u32(s).unwrap()
        };
        let jet = gevrey_jet(&sigma, nx, ny, NumericMode::for_sigma(&sigma)).unwrap();
        let bound = CarlemanBoundSpec { a: ex(1), sigma };
        prop_assert!(carleman_check(&jet, &bound).holds);
    }

    #[test]
    fn fit_ignores_scale_and_geometric_factor(num in 1u32..50, den in 1u32..50, rho_n in 1u32..9, rho_d in 1u32..9) {
        let sigma = Sigma::from_u32(1).unwrap();
        let base: Vec<Scalar> = (0..=12).map(|j| factorial_pow(5 * j, &sigma, EXACT).unwrap()).collect();
        let lambda = Scalar::Exact(Rational::from((num, den)));
        let rho = Scalar::Exact(Rational::from((rho_n, rho_d)));
        let scaled: Vec<Scalar> = base.iter().map(|v| v * &lambda).collect();
        let tilted: Vec<Scalar> = base.iter().enumerate().map(|(j, v)| v * &rho.pow_u32(j as u32)).collect();
        let fit = |v: &[Scalar]| estimate_order(&GrowthSeries::new(v, sigma.clone(), 5, "p"), 4).unwrap();
        let z0 = fit(&base);
        let z1 = fit(&scaled);
        let z2 = fit(&tilted);
        prop_assert!((z0.z_hat - z1.z_hat).abs() < 1e-12);
        prop_assert!((z0.z_hat - z2.z_hat).abs() < 1e-12);
        let shift = (rho_n as f64 / rho_d as f64).ln();
        prop_assert!((z2.coefficients[1] - z0.coefficients[1] - shift).abs() < 1e-9);
    }

    #[test]
    fn base_margin_is_linear_in_c(n in 1i64..100, d in 1i64..100, lam in 1i64..20, k in 0usize..30) {
        let sigma = Sigma::from_u32(1).unwrap();
        let c = Scalar::Exact(Rational::from((n, d)));
        let scaled = &c * &ex(lam);
        prop_assert_eq!(base_margin(&scaled, &sigma, k), &base_margin(&c, &sigma, k) * &ex(lam));
    }

    #[test]
    fn majorant_telescopes(q in 1usize..40, e in 1u32..=10, s in 1u32..=3) {
        let sigma = Sigma::from_u32(s).unwrap();
        let eps = Rational::from(1) >> e;
        let p = MajorantParams::new(
            Scalar::Exact(Rational::from((16, 41))),
            Scalar::Exact(eps.clone()),
            sigma,
        ).unwrap();
        let ratio = p.big_m(q + 1).checked_div(&p.big_m(q)).unwrap();
        let qi = Integer::from(q);
        let want = Rational::from((Integer::from(&qi + 1).pow(s) * Integer::from(&qi + 1).square(), Integer::from(&qi + 2).square()))
            / eps;
        prop_assert_eq!(ratio, Scalar::Exact(want));
    }

    #[test]
    fn count_sum_is_gf_coefficient(l in 0usize..8, m in 0usize..8, j in 0usize..5) {
        let t = IndexTriple::new(l, m, j);
        // independent expansion: multiply the three factors one linear factor at a time
        let mut poly = vec![Integer::from(1)];
        let mul_by = |poly: &mut Vec<Integer>, shift: usize| {
            let mut out = vec![Integer::new(); poly.len() + shift];
            for (i, c) in poly.iter().enumerate() {
                out[i] += c;
                out[i + shift] += c;
            }
            *poly = out;
        };
        for _ in 0..l + m { mul_by(&mut poly, 1); }
        for _ in 0..j { mul_by(&mut poly, 5); }
        prop_assert_eq!(&poly, &gf_coefficients(l + m, j));
        let mut mass = Integer::new();
        for s in 1..=t.k() {
            let cs = count_sum(t, s).unwrap();
            let want = poly.get(s - 1).cloned().unwrap_or_default();
            prop_assert_eq!(&cs, &want);
            mass += cs;
        }
        prop_assert_eq!(mass, Integer::from(1) << (l + m + j) as u32);
    }

    #[test]
    fn grammar_round_trip(
        lin in prop::collection::vec((-9i64..=9, 1i64..=4, 0i64..=4, 0u32..=1), 0..4),
        bil in prop::collection::vec((-9i64..=9, 1i64..=4, 0u32..=2, 0u32..=1, 0u32..=2, 0u32..=1), 0..3),
        lead_neg in any::<bool>(),
    ) {
        let mut linear = vec![LinearTerm { coef: Rational::from(if lead_neg { -1 } else { 1 }), dx: 7, dy: 0 }];
        for (n, d, dx, dy) in lin {
            linear.push(LinearTerm { coef: Rational::from((n, d)), dx: dx as i32 - 1, dy: 2 * dy });
        }
        let bilinear: Vec<BilinearTerm> = bil
            .into_iter()
            .map(|(n, d, a, b, c, e)| BilinearTerm { coef: Rational::from((n, d)), left: (a, b), right: (c, e) })
            .collect();
        let model = PdeModel::new(linear, bilinear, "generated").unwrap();
        let again = parse_pde(&model.to_grammar()).unwrap();
        prop_assert_eq!(again.linear, model.linear);
        prop_assert_eq!(again.bilinear, model.bilinear);
    }
}

#[test]
fn p1_verdicts_do_not_depend_on_epsilon() {
    let sigma = Sigma::from_u32(1).unwrap();
    let c = Scalar::Exact(Rational::from((1, 4)));
    let verdicts: Vec<Vec<bool>> = dyadic_grid()
        .into_iter()
        .take(10)
        .map(|eps| {
            let p = MajorantParams::new(c.clone(), Scalar::Exact(eps), sigma.clone()).unwrap();
            check_p1(&p, 40).iter().map(|r| r.holds).collect()
        })
        .collect();
    assert!(verdicts.windows(2).all(|w| w[0] == w[1]));
    assert!(verdicts[0].iter().all(|&h| h));
    // above c_max the interior sum eventually exceeds m_k at every ε alike
    let big = Scalar::Exact(Rational::from(1));
    let rows: Vec<Vec<bool>> = dyadic_grid()
        .into_iter()
        .take(10)
        .map(|eps| {
            let p = MajorantParams::new(big.clone(), Scalar::Exact(eps), sigma.clone()).unwrap();
            check_p1(&p, 40).iter().map(|r| r.holds).collect()
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0] == w[1]));
    assert!(rows[0].iter().any(|&h| !h));
}

#[test]
fn counting_inequality_exhaustive() {
    let scan = counting_scan(6, 6, 4);
    assert_eq!(scan.len(), 7 * 7 * 5);
    assert!(scan.iter().all(|v| v.holds()));
}
