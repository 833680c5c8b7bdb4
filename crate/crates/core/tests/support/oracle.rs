//! Brute-force oracle for `d_t^j u(0,0,0)`: expands the time derivative as a
//! polynomial in symbols by repeated substitution of the model, then
//! evaluates the symbols on the initial data.
//!
//! Symbols are `U(a, b) = d_x^a d_y^b u` at `t = 0` and
//! `P(i, b) = d_t^i d_y^b (d_x^{-1} u)` on the line `x = 0`.

use std::collections::BTreeMap;

use gevrey_core::pde::PdeModel;
use gevrey_core::timejet::PrimitiveSlice;
use gevrey_core::{Jet2, NumericMode, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    U(usize, usize),
    P(usize, usize),
}

type Monomial = Vec<Atom>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly(BTreeMap<Monomial, Rational>);

impl Poly {
    pub fn atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![a], Rational::from(1));
        Poly(m)
    }

    fn add_term(&mut self, mut mono: Monomial, c: Rational) {
        if c == 0 {
            return;
        }
        mono.sort();
        let e = self.0.entry(mono.clone()).or_default();
        *e += c;
        if *e == 0 {
            self.0.remove(&mono);
        }
    }

    fn add(&mut self, other: &Poly, scale: &Rational) {
        for (m, c) in &other.0 {
            self.add_term(m.clone(), Rational::from(c * scale));
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                out.add_term(m, Rational::from(ca * cb));
            }
        }
        out
    }

    /// Derivation extended from `d(atom)` by the product rule.
    fn derive(&self, d: &impl Fn(Atom) -> Poly) -> Poly {
        let mut out = Poly::default();
        for (mono, c) in &self.0 {
            for i in 0..mono.len() {
                let mut rest = mono.clone();
                let a = rest.remove(i);
                let mut rest_poly = Poly::default();
                rest_poly.add_term(rest, c.clone());
                let term = rest_poly.mul(&d(a));
                out.add(&term, &Rational::from(1));
            }
        }
        out
    }

    fn dx(&self) -> Poly {
        self.derive(&|a| match a {
            Atom::U(x, y) => Poly::atom(Atom::U(x + 1, y)),
            Atom::P(..) => panic!("x-derivative of a primitive symbol is never needed"),
        })
    }

    fn dy(&self) -> Poly {
        self.derive(&|a| match a {
            Atom::U(x, y) => Poly::atom(Atom::U(x, y + 1)),
            Atom::P(i, y) => Poly::atom(Atom::P(i, y + 1)),
        })
    }

    pub fn eval(&self, phi: &Jet2, prim: Option<&PrimitiveSlice>) -> Rational {
        let mut total = Rational::new();
        for (mono, c) in &self.0 {
            let mut v = c.clone();
            for a in mono {
                let s = match *a {
                    Atom::U(x, y) => phi.get(x, y).as_rational().expect("exact jet").clone(),
                    Atom::P(i, y) => match prim {
                        Some(w) => w.levels[i][y].as_rational().expect("exact table").clone(),
                        None => Rational::new(),
                    },
                };
                v *= s;
            }
            total += v;
        }
        total
    }
}

/// `d_x^a d_y^b` of the model right-hand side.
fn rhs_derivative(model: &PdeModel, a: usize, b: usize) -> Poly {
    let mut out = Poly::default();
    for t in &model.linear {
        let atom = if t.dx >= 0 {
            Atom::U(a + t.dx as usize, b + t.dy as usize)
        } else if a >= 1 {
            Atom::U(a - 1, b + t.dy as usize)
        } else {
            Atom::P(0, b + t.dy as usize)
        };
        out.add(&Poly::atom(atom), &t.coef);
    }
    for t in &model.bilinear {
        let mut prod = Poly::atom(Atom::U(t.left.0 as usize, t.left.1 as usize))
            .mul(&Poly::atom(Atom::U(t.right.0 as usize, t.right.1 as usize)));
        for _ in 0..a {
            prod = prod.dx();
        }
        for _ in 0..b {
            prod = prod.dy();
        }
        out.add(&prod, &t.coef);
    }
    out
}

fn dt(model: &PdeModel, p: &Poly) -> Poly {
    p.derive(&|a| match a {
        Atom::U(x, y) => rhs_derivative(model, x, y),
        Atom::P(i, y) => Poly::atom(Atom::P(i + 1, y)),
    })
}

/// `d_t^j d_x^n1 d_y^n2 u(0,0,0)` for `j = 0..=j_max`.
pub fn oracle_series(
    model: &PdeModel,
    phi: &Jet2,
    prim: Option<&PrimitiveSlice>,
    j_max: usize,
    n1: usize,
    n2: usize,
) -> Vec<Rational> {
    let mut p = Poly::atom(Atom::U(n1, n2));
    let mut out = vec![p.eval(phi, prim)];
    for _ in 0..j_max {
        p = dt(model, &p);
        out.push(p.eval(phi, prim));
    }
    out
}

pub fn random_jet(rng: &mut ChaCha8Rng, nx: usize, ny: usize, y_independent: bool) -> Jet2 {
    Jet2::from_fn(nx, ny, NumericMode::Exact, |_, b| {
        if y_independent && b > 0 {
            Scalar::zero(NumericMode::Exact)
        } else {
            Scalar::from_i64(rng.gen_range(-3..=3), NumericMode::Exact)
        }
    })
}

pub fn random_primitive(rng: &mut ChaCha8Rng, levels: usize, len: usize) -> PrimitiveSlice {
    PrimitiveSlice {
        levels: (0..levels)
            .map(|_| {
                (0..len)
                    .map(|_| Scalar::from_i64(rng.gen_range(-3..=3), NumericMode::Exact))
                    .collect()
            })
            .collect(),
    }
}

pub fn oracle_models() -> Vec<PdeModel> {
    use gevrey_core::parse_pde;
    vec![
        PdeModel::kp1_5(Rational::new()),
        PdeModel::kp1_5(Rational::from((-3, 2))),
        parse_pde("kawahara(beta=2, delta=-1)").unwrap(),
        parse_pde("-dx^5 u + 2 dx dy^2 u - 1/2 (dy u)(dx u) + dxinv dy^2 u").unwrap(),
        parse_pde("dx^3 u - 6 (u)(dx u) + 1/3 (dx u)(dx u)").unwrap(),
    ]
}

/// Runs one random case; returns a description of the first mismatch.
pub fn check_case(seed: u64) -> Result<(), String> {
    use gevrey_core::timejet::{budget_for, time_jet_with_primitive};
    use rand::SeedableRng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models = oracle_models();
    let model = &models[rng.gen_range(0..models.len())];
    let j_max = rng.gen_range(0..=3usize);
    let nx_out = rng.gen_range(0..=2usize);
    let ny_out = rng.gen_range(0..=2usize);
    let (nx, ny) = budget_for(model, j_max, nx_out, ny_out);
    let y_independent = model.has_antiderivative() && rng.gen_bool(0.3);
    let phi = random_jet(&mut rng, nx, ny, y_independent);
    let prim = (model.has_antiderivative() && !y_independent)
        .then(|| random_primitive(&mut rng, j_max.max(1), ny + 3));
    let tj =
        time_jet_with_primitive(model, &phi, j_max, prim.as_ref()).map_err(|e| e.to_string())?;
    for n1 in 0..=nx_out {
        for n2 in 0..=ny_out {
            let want = oracle_series(model, &phi, prim.as_ref(), j_max, n1, n2);
            for (j, w) in want.iter().enumerate() {
                let got = tj.value(j, n1, n2).ok_or("entry missing from staircase")?;
                if got.as_rational() != Some(w) {
                    return Err(format!(
                        "seed {seed}, model `{}`, j={j} ({n1},{n2}): recursion {got}, oracle {w}",
                        model.label
                    ));
                }
            }
        }
    }
    Ok(())
}
