//! PDE models of the form `d_t u = ±d_x^α u + P(u)`.
//!
//! A model is a list of linear terms `c d_x^a d_y^b u` (with `a = -1` for one
//! antiderivative in x) and bilinear terms `c (d_x^a d_y^b u)(d_x^c d_y^d u)`.
//! See `docs/grammar.md` for the textual syntax.

use std::fmt;

use rug::Rational;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{parse_rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdeError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("order violation in term `{term}`: {message}")]
    OrderViolation { term: String, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearTerm {
    #[serde(serialize_with = "ser_rational")]
    pub coef: Rational,
    /// x-derivative order; -1 is one antiderivative
    pub dx: i32,
    pub dy: u32,
}

impl LinearTerm {
    pub fn total_order(&self) -> i64 {
        self.dx as i64 + self.dy as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BilinearTerm {
    #[serde(serialize_with = "ser_rational")]
    pub coef: Rational,
    pub left: (u32, u32),
    pub right: (u32, u32),
}

impl BilinearTerm {
    pub fn total_order(&self) -> i64 {
        (self.left.0 + self.left.1 + self.right.0 + self.right.1) as i64
    }
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&Scalar::Exact(r.clone()).to_string())
}

/// A validated model. Exactly one linear term is `±d_x^α u`; everything else
/// has total spatial order at most `α - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PdeModel {
    pub linear: Vec<LinearTerm>,
    pub bilinear: Vec<BilinearTerm>,
    pub leading_order: u32,
    pub leading_sign: i8,
    /// Preset call or source text the model was parsed from.
    pub label: String,
}

impl PdeModel {
    /// Validates term lists and fills in the leading order and sign.
    pub fn new(
        linear: Vec<LinearTerm>,
        bilinear: Vec<BilinearTerm>,
        label: impl Into<String>,
    ) -> Result<Self, PdeError> {
        let describe_linear = |t: &LinearTerm| format_linear(t, true);
        let Some(alpha) = linear.iter().map(|t| t.dx).max() else {
            return Err(PdeError::OrderViolation {
                term: "<none>".into(),
                message: "model has no linear term to act as the leading dispersive term".into(),
            });
        };
        if alpha < 1 {
            return Err(PdeError::OrderViolation {
                term: describe_linear(&linear[0]),
                message: "leading x-derivative order must be at least 1".into(),
            });
        }
        let leading: Vec<&LinearTerm> = linear.iter().filter(|t| t.dx == alpha).collect();
        if leading.len() != 1 {
            return Err(PdeError::OrderViolation {
                term: describe_linear(leading[1]),
                message: format!("more than one linear term of x-order {alpha}"),
            });
        }
        let lead = leading[0];
        if lead.dy != 0 {
            return Err(PdeError::OrderViolation {
                term: describe_linear(lead),
                message: "the leading term must be a pure x-derivative".into(),
            });
        }
        let sign = if lead.coef == 1 {
            1
        } else if lead.coef == -1 {
            -1
        } else {
            return Err(PdeError::OrderViolation {
                term: describe_linear(lead),
                message: "the leading term must have coefficient +1 or -1".into(),
            });
        };
        for t in &linear {
            if std::ptr::eq(t, lead) {
                continue;
            }
            if t.dy % 2 != 0 {
                return Err(PdeError::OrderViolation {
                    term: describe_linear(t),
                    message: "y-derivative orders of linear terms must be even".into(),
                });
            }
            if t.total_order() > alpha as i64 - 1 {
                return Err(PdeError::OrderViolation {
                    term: describe_linear(t),
                    message: format!(
                        "total order {} exceeds {} (leading order minus one)",
                        t.total_order(),
                        alpha - 1
                    ),
                });
            }
        }
        for t in &bilinear {
            if t.total_order() > alpha as i64 - 1 {
                return Err(PdeError::OrderViolation {
                    term: format_bilinear(t, true),
                    message: format!(
                        "total order {} exceeds {} (leading order minus one)",
                        t.total_order(),
                        alpha - 1
                    ),
                });
            }
        }
        Ok(PdeModel {
            linear,
            bilinear,
            leading_order: alpha as u32,
            leading_sign: sign,
            label: label.into(),
        })
    }

    /// `d_t u = -α_c d_x^3 u - d_x^5 u - d_x^{-1} d_y^2 u - u d_x u`.
    pub fn kp1_5(alpha_c: Rational) -> Self {
        let label = format!("kp1_5(alpha_c={})", Scalar::Exact(alpha_c.clone()));
        let linear = vec![
            LinearTerm {
                coef: -alpha_c,
                dx: 3,
                dy: 0,
            },
            LinearTerm {
                coef: Rational::from(-1),
                dx: 5,
                dy: 0,
            },
            LinearTerm {
                coef: Rational::from(-1),
                dx: -1,
                dy: 2,
            },
        ];
        let bilinear = vec![BilinearTerm {
            coef: Rational::from(-1),
            left: (0, 0),
            right: (1, 0),
        }];
        PdeModel::new(linear, bilinear, label).expect("preset is well formed")
    }

    /// `d_t u = δ d_x^5 u - β d_x^3 u - u d_x u`, which needs `δ = ±1`.
    pub fn kawahara(beta: Rational, delta: Rational) -> Result<Self, PdeError> {
        if delta != 1 && delta != -1 {
            return Err(PdeError::InvalidParameter {
                name: "delta".into(),
                message: "the fifth-order coefficient must be +1 or -1".into(),
            });
        }
        let label = format!(
            "kawahara(beta={}, delta={})",
            Scalar::Exact(beta.clone()),
            Scalar::Exact(delta.clone())
        );
        let linear = vec![
            LinearTerm {
                coef: delta,
                dx: 5,
                dy: 0,
            },
            LinearTerm {
                coef: -beta,
                dx: 3,
                dy: 0,
            },
        ];
        let bilinear = vec![BilinearTerm {
            coef: Rational::from(-1),
            left: (0, 0),
            right: (1, 0),
        }];
        PdeModel::new(linear, bilinear, label)
    }

    pub fn leading_term(&self) -> &LinearTerm {
        self.linear
            .iter()
            .find(|t| t.dx == self.leading_order as i32)
            .expect("validated model has a leading term")
    }

    pub fn has_antiderivative(&self) -> bool {
        self.linear.iter().any(|t| t.dx < 0)
    }

    /// Coefficient of the `d_x^3 u` term, zero when absent.
    pub fn third_order_coefficient(&self) -> Rational {
        self.linear
            .iter()
            .filter(|t| t.dx == 3 && t.dy == 0)
            .fold(Rational::new(), |acc, t| acc + &t.coef)
    }

    /// x-orders consumed per time level: the leading order plus the largest
    /// x-shift inside a bilinear factor.
    pub fn x_cost_per_level(&self) -> usize {
        let shift = self
            .bilinear
            .iter()
            .map(|t| t.left.0.max(t.right.0))
            .max()
            .unwrap_or(0);
        (self.leading_order + shift) as usize
    }

    /// y-orders consumed per time level.
    pub fn y_cost_per_level(&self) -> usize {
        let lin = self.linear.iter().map(|t| t.dy).max().unwrap_or(0);
        let bil = self
            .bilinear
            .iter()
            .map(|t| t.left.1.max(t.right.1))
            .max()
            .unwrap_or(0);
        (lin + bil) as usize
    }

    /// Canonical grammar string; parsing it reproduces the term lists.
    pub fn to_grammar(&self) -> String {
        let mut out = String::new();
        let parts = self
            .linear
            .iter()
            .map(|t| (t.coef.clone(), format_linear_body(t)))
            .chain(
                self.bilinear
                    .iter()
                    .map(|t| (t.coef.clone(), format_bilinear_body(t))),
            );
        for (i, (coef, body)) in parts.enumerate() {
            let neg = coef < 0;
            let mag = Scalar::Exact(coef.abs());
            match (i, neg) {
                (0, false) => out.push_str(&format!("{mag} {body}")),
                (0, true) => out.push_str(&format!("-{mag} {body}")),
                (_, false) => out.push_str(&format!(" + {mag} {body}")),
                (_, true) => out.push_str(&format!(" - {mag} {body}")),
            }
        }
        out
    }
}

impl fmt::Display for PdeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grammar())
    }
}

fn format_ops(dx: i32, dy: u32) -> String {
    let mut ops = Vec::new();
    match dx {
        -1 => ops.push("dxinv".to_string()),
        0 => {}
        1 => ops.push("dx".to_string()),
        k => ops.push(format!("dx^{k}")),
    }
    match dy {
        0 => {}
        1 => ops.push("dy".to_string()),
        k => ops.push(format!("dy^{k}")),
    }
    ops.push("u".into());
    ops.join(" ")
}

fn format_linear_body(t: &LinearTerm) -> String {
    format_ops(t.dx, t.dy)
}

fn format_bilinear_body(t: &BilinearTerm) -> String {
    format!(
        "({})({})",
        format_ops(t.left.0 as i32, t.left.1),
        format_ops(t.right.0 as i32, t.right.1)
    )
}

fn format_linear(t: &LinearTerm, with_coef: bool) -> String {
    if with_coef {
        format!(
            "{} {}",
            Scalar::Exact(t.coef.clone()),
            format_linear_body(t)
        )
    } else {
        format_linear_body(t)
    }
}

fn format_bilinear(t: &BilinearTerm, with_coef: bool) -> String {
    if with_coef {
        format!(
            "{} {}",
            Scalar::Exact(t.coef.clone()),
            format_bilinear_body(t)
        )
    } else {
        format_bilinear_body(t)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Caret,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PdeError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '=' => Some(Tok::Eq),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((start, t));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part, only when followed by a digit or sign+digit
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    i = k;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            toks.push((start, Tok::Num(text[start..i].to_string())));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            toks.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        return Err(PdeError::Syntax {
            position: start,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(toks)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

enum Factor {
    Plain { dx: i32, dy: u32 },
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.text.len())
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PdeError> {
        Err(PdeError::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), PdeError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn number(&mut self) -> Result<Rational, PdeError> {
        let at = self.offset();
        let Some(Tok::Num(n)) = self.bump() else {
            self.pos -= 1;
            return self.err("expected a number");
        };
        let mut r = parse_rational(&n).ok_or(PdeError::Syntax {
            position: at,
            message: format!("malformed number `{n}`"),
        })?;
        if self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            let at = self.offset();
            let Some(Tok::Num(d)) = self.bump() else {
                self.pos -= 1;
                return self.err("expected a denominator");
            };
            let den = parse_rational(&d).ok_or(PdeError::Syntax {
                position: at,
                message: format!("malformed number `{d}`"),
            })?;
            if den == 0 {
                return Err(PdeError::Syntax {
                    position: at,
                    message: "zero denominator".into(),
                });
            }
            r /= den;
        }
        Ok(r)
    }

    fn small_int(&mut self) -> Result<u32, PdeError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => n.parse::<u32>().map_err(|_| PdeError::Syntax {
                position: at,
                message: format!("expected a non-negative integer exponent, got `{n}`"),
            }),
            _ => {
                self.pos -= 1;
                self.err("expected an integer exponent")
            }
        }
    }

    /// `ops u` where ops is any run of `dx[^k]`, `dy[^m]`, `dxinv`.
    fn factor_body(&mut self) -> Result<Factor, PdeError> {
        let mut dx: i32 = 0;
        let mut dy: u32 = 0;
        let mut inv = false;
        loop {
            match self.peek() {
                Some(Tok::Ident(id)) if id == "u" => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Ident(id)) if id == "dx" || id == "dy" => {
                    let axis = id.clone();
                    self.pos += 1;
                    let k = if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        self.small_int()?
                    } else {
                        1
                    };
                    if axis == "dx" {
                        dx += k as i32;
                    } else {
                        dy += k;
                    }
                }
                Some(Tok::Ident(id)) if id == "dxinv" => {
                    if inv {
                        return self.err("at most one dxinv per factor");
                    }
                    inv = true;
                    self.pos += 1;
                }
                Some(Tok::Ident(id)) => {
                    let id = id.clone();
                    return self.err(format!(
                        "unknown operator `{id}`, expected dx, dy, dxinv or u"
                    ));
                }
                _ => return self.err("expected `u` after derivative operators"),
            }
        }
        if inv {
            if dx != 0 {
                return self.err("dxinv cannot be combined with dx in one factor");
            }
            dx = -1;
        }
        Ok(Factor::Plain { dx, dy })
    }

    fn factor(&mut self) -> Result<Factor, PdeError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let f = self.factor_body()?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(f)
        } else {
            self.factor_body()
        }
    }

    fn at_factor_start(&self) -> bool {
        matches!(self.peek(), Some(Tok::LParen) | Some(Tok::Ident(_)))
    }

    fn model(&mut self) -> Result<PdeModel, PdeError> {
        // optional `dt u =` prefix
        if let (Some(Tok::Ident(a)), Some((_, Tok::Ident(b))), Some((_, Tok::Eq))) = (
            self.peek(),
            self.toks.get(self.pos + 1),
            self.toks.get(self.pos + 2),
        ) {
            if a == "dt" && b == "u" {
                self.pos += 3;
            }
        }
        let mut linear = Vec::new();
        let mut bilinear = Vec::new();
        let mut first = true;
        while self.peek().is_some() {
            let start = self.offset();
            let mut sign = Rational::from(1);
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = Rational::from(-1);
                }
                _ if !first => return self.err("expected `+` or `-` between terms"),
                _ => {}
            }
            first = false;
            let mut coef = Rational::from(1);
            if matches!(self.peek(), Some(Tok::Num(_))) {
                coef = self.number()?;
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                }
            }
            coef *= sign;
            let mut factors = Vec::new();
            while self.at_factor_start() {
                factors.push(self.factor()?);
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                }
            }
            let end = self.offset();
            let term_text = self.text[start..end].trim().to_string();
            match factors.as_slice() {
                [] => return self.err("expected a term containing `u`"),
                [Factor::Plain { dx, dy }] => linear.push(LinearTerm {
                    coef,
                    dx: *dx,
                    dy: *dy,
                }),
                [Factor::Plain { dx: a, dy: b }, Factor::Plain { dx: c, dy: d }] => {
                    if *a < 0 || *c < 0 {
                        return Err(PdeError::OrderViolation {
                            term: term_text,
                            message: "dxinv is only supported in linear terms".into(),
                        });
                    }
                    let t = BilinearTerm {
                        coef,
                        left: (*a as u32, *b),
                        right: (*c as u32, *d),
                    };
                    bilinear.push((t, term_text));
                }
                _ => {
                    return Err(PdeError::OrderViolation {
                        term: term_text,
                        message: "only linear and bilinear terms are supported".into(),
                    })
                }
            }
        }
        // name the offending bilinear term by its source text
        let alpha = linear.iter().map(|t| t.dx).max().unwrap_or(0) as i64;
        for (t, text) in &bilinear {
            if t.total_order() > alpha - 1 {
                return Err(PdeError::OrderViolation {
                    term: text.clone(),
                    message: format!(
                        "nonlinear total order {} is not below the leading order {}",
                        t.total_order(),
                        alpha
                    ),
                });
            }
        }
        let bilinear = bilinear.into_iter().map(|(t, _)| t).collect();
        PdeModel::new(linear, bilinear, self.text.trim())
    }
}

fn preset(name: &str, params: &[(String, Rational)]) -> Result<PdeModel, PdeError> {
    let lookup = |key: &str, default: i64, allowed: &[&str]| -> Result<Rational, PdeError> {
        for (k, _) in params {
            if !allowed.contains(&k.as_str()) {
                return Err(PdeError::InvalidParameter {
                    name: k.clone(),
                    message: format!("not a parameter of `{name}`"),
                });
            }
        }
        Ok(params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| Rational::from(default)))
    };
    match name {
        "kp1_5" => Ok(PdeModel::kp1_5(lookup("alpha_c", 0, &["alpha_c"])?)),
        "kawahara" => {
            let allowed = ["beta", "delta"];
            PdeModel::kawahara(lookup("beta", 1, &allowed)?, lookup("delta", 1, &allowed)?)
        }
        other => Err(PdeError::UnknownPreset(other.to_string())),
    }
}

/// Parses a preset call such as `kp1_5(alpha_c=1)` or a term sum such as
/// `-dx^5 u - dxinv dy^2 u - (u)(dx u)`.
pub fn parse_pde(text: &str) -> Result<PdeModel, PdeError> {
    let toks = lex(text)?;
    if let Some((_, Tok::Ident(name))) = toks.first() {
        let is_call = matches!(toks.get(1), Some((_, Tok::LParen)));
        if (name == "kp1_5" || name == "kawahara") && (toks.len() == 1 || is_call) {
            let name = name.clone();
            let mut p = Parser { text, toks, pos: 1 };
            let mut params = Vec::new();
            if is_call {
                p.pos += 1;
                while p.peek() != Some(&Tok::RParen) {
                    let key = match p.bump() {
                        Some(Tok::Ident(k)) => k,
                        _ => {
                            p.pos -= 1;
                            return p.err("expected a parameter name");
                        }
                    };
                    p.expect(Tok::Eq, "`=`")?;
                    let neg = if p.peek() == Some(&Tok::Minus) {
                        p.pos += 1;
                        true
                    } else {
                        false
                    };
                    let v = p.number()?;
                    params.push((key, if neg { -v } else { v }));
                    if p.peek() == Some(&Tok::Comma) {
                        p.pos += 1;
                    } else if p.peek() != Some(&Tok::RParen) {
                        return p.err("expected `,` or `)`");
                    }
                }
                p.pos += 1;
                if p.peek().is_some() {
                    return p.err("unexpected input after preset");
                }
            }
            return preset(&name, &params);
        }
    }
    let mut p = Parser { text, toks, pos: 0 };
    if p.peek().is_none() {
        return p.err("empty model");
    }
    p.model()
}
