//! A small expression language for ring objects, e.g. `Gamma*(1+3*r)` or
//! `Lambda(1+2*x)+b*(1+6*x)`.
//!
//! Grammar:
//!
//! ```text
//! Expr   := Term ('+' Term)*
//! Term   := Factor (('*')? Factor)*
//! Factor := INT | LABEL | '(' Expr ')'
//! ```
//!
//! Juxtaposition without `*` is accepted when either neighbour is a
//! parenthesized group or the left factor is an integer literal.

use std::sync::Arc;

use thiserror::Error;

use crate::ring::catalog::catalog_ring;
use crate::ring::{FusionRing, ObjectVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown label {label:?} at position {pos}")]
    UnknownLabel { pos: usize, label: String },
    #[error("coefficient overflow")]
    Overflow,
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectExpr {
    Int(u32),
    Label { name: String, pos: usize },
    Sum(Vec<ObjectExpr>),
    Product(Vec<ObjectExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u32),
    Label(String),
    Plus,
    Star,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((Tok::Plus, pos));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, pos));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, pos));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
                let n = text.parse::<u32>().map_err(|_| ExprError::Syntax {
                    pos,
                    msg: format!("integer literal {text} is too large"),
                })?;
                out.push((Tok::Int(n), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push((Tok::Label(text), pos));
            }
            other => {
                return Err(ExprError::Syntax {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn expr(&mut self) -> Result<ObjectExpr, ExprError> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            ObjectExpr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<ObjectExpr, ExprError> {
        let (mut prev_group, mut prev_int) = self.factor_kind();
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    let kind = self.factor_kind();
                    factors.push(self.factor()?);
                    (prev_group, prev_int) = kind;
                }
                Some(Tok::Int(_)) | Some(Tok::Label(_)) | Some(Tok::LParen) => {
                    let (group, int) = self.factor_kind();
                    if !(prev_group || group || prev_int) {
                        return Err(ExprError::Syntax {
                            pos: self.pos(),
                            msg: "juxtaposed labels need an explicit '*'".into(),
                        });
                    }
                    if int && !prev_group {
                        return Err(ExprError::Syntax {
                            pos: self.pos(),
                            msg: "integer literal must be separated by an operator".into(),
                        });
                    }
                    factors.push(self.factor()?);
                    (prev_group, prev_int) = (group, int);
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            ObjectExpr::Product(factors)
        })
    }

    fn factor_kind(&self) -> (bool, bool) {
        (
            self.peek() == Some(&Tok::LParen),
            matches!(self.peek(), Some(Tok::Int(_))),
        )
    }

    fn factor(&mut self) -> Result<ObjectExpr, ExprError> {
        let pos = self.pos();
        match self.toks.get(self.at).map(|(t, _)| t.clone()) {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(ObjectExpr::Int(n))
            }
            Some(Tok::Label(name)) => {
                self.at += 1;
                Ok(ObjectExpr::Label { name, pos })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ExprError::Syntax {
                        pos: self.pos(),
                        msg: "expected ')'".into(),
                    });
                }
                self.at += 1;
                Ok(e)
            }
            Some(t) => Err(ExprError::Syntax {
                pos,
                msg: format!("unexpected {}", describe(&t)),
            }),
            None => Err(ExprError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Int(_) => "integer",
        Tok::Label(_) => "label",
        Tok::Plus => "'+'",
        Tok::Star => "'*'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
    }
}

/// Parse source text into an expression tree.
pub fn parse_expr(src: &str) -> Result<ObjectExpr, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(ExprError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Shorthands registered for `ring` in the catalog, if it is a catalog ring.
pub fn shorthands_for(ring: &FusionRing) -> Vec<(String, Vec<u32>)> {
    match catalog_ring(ring.name()) {
        Ok(c) if *c.ring == *ring => c.shorthands,
        _ => Vec::new(),
    }
}

/// Evaluate an expression tree over `ring`.
pub fn eval(
    expr: &ObjectExpr,
    ring: &Arc<FusionRing>,
    shorthands: &[(String, Vec<u32>)],
) -> Result<ObjectVector, ExprError> {
    let coeffs = eval_wide(expr, ring, shorthands)?;
    let coeffs = coeffs
        .into_iter()
        .map(|c| u32::try_from(c).map_err(|_| ExprError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ObjectVector::new(ring.clone(), coeffs).expect("length matches rank"))
}

fn eval_wide(
    expr: &ObjectExpr,
    ring: &FusionRing,
    shorthands: &[(String, Vec<u32>)],
) -> Result<Vec<u64>, ExprError> {
    let r = ring.rank();
    Ok(match expr {
        ObjectExpr::Int(n) => {
            let mut v = vec![0; r];
            v[ring.unit()] = *n as u64;
            v
        }
        ObjectExpr::Label { name, pos } => {
            if let Some(i) = ring.index_of(name) {
                let mut v = vec![0; r];
                v[i] = 1;
                v
            } else if let Some((_, s)) = shorthands.iter().find(|(n, _)| n == name) {
                s.iter().map(|&x| x as u64).collect()
            } else {
                return Err(ExprError::UnknownLabel {
                    pos: *pos,
                    label: name.clone(),
                });
            }
        }
        ObjectExpr::Sum(terms) => {
            let mut acc = vec![0u64; r];
            for t in terms {
                for (a, b) in acc.iter_mut().zip(eval_wide(t, ring, shorthands)?) {
                    *a = a.checked_add(b).ok_or(ExprError::Overflow)?;
                }
            }
            acc
        }
        ObjectExpr::Product(factors) => {
            let mut acc = eval_wide(&factors[0], ring, shorthands)?;
            for f in &factors[1..] {
                let rhs = eval_wide(f, ring, shorthands)?;
                let mut out = vec![0u64; r];
                for (i, &a) in acc.iter().enumerate().filter(|(_, a)| **a > 0) {
                    for (j, &b) in rhs.iter().enumerate().filter(|(_, b)| **b > 0) {
                        for (k, m) in ring.product(i, j) {
                            let t = a
                                .checked_mul(b)
                                .and_then(|x| x.checked_mul(m as u64))
                                .ok_or(ExprError::Overflow)?;
                            out[k] = out[k].checked_add(t).ok_or(ExprError::Overflow)?;
                        }
                    }
                }
                acc = out;
            }
            acc
        }
    })
}

/// Parse and evaluate `src` over `ring`, using the catalog shorthands
/// registered for it.
pub fn parse_object(ring: &Arc<FusionRing>, src: &str) -> Result<ObjectVector, ExprError> {
    parse_object_with(ring, &shorthands_for(ring), src)
}

pub fn parse_object_with(
    ring: &Arc<FusionRing>,
    shorthands: &[(String, Vec<u32>)],
    src: &str,
) -> Result<ObjectVector, ExprError> {
    eval(&parse_expr(src)?, ring, shorthands)
}

/// Sum-of-terms form in basis order; the unit is written `1`.
pub fn format_object(x: &ObjectVector) -> String {
    let ring = x.ring();
    let terms: Vec<String> = x
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(i, &c)| match (i == ring.unit(), c) {
            (true, c) => c.to_string(),
            (false, 1) => ring.label(i).to_string(),
            (false, c) => format!("{c}*{}", ring.label(i)),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::QuadNumber;
    use proptest::prelude::*;

    fn ring(name: &str) -> Arc<FusionRing> {
        catalog_ring(name).unwrap().ring
    }

    #[test]
    fn examples() {
        let z4 = ring("HI-Z4");
        assert_eq!(parse_object(&z4, "1 + r").unwrap().coeffs(), &[1, 0, 0, 0, 1, 0, 0, 0]);
        let k = ring("HI-Z2xZ2");
        let g = parse_object(&k, "Gamma*(1+3*r)").unwrap();
        assert_eq!(g.coeffs(), &[1, 1, 1, 1, 3, 3, 3, 3]);
        assert_eq!(g.dim().unwrap(), QuadNumber::in_d(4, 12));
        let p = parse_object(&z4, "Pi*(1+3*r)").unwrap();
        assert_eq!(p.dim().unwrap(), QuadNumber::in_d(4, 12));
    }

    #[test]
    fn juxtaposition_rules() {
        let c1 = ring("4442");
        let a = parse_object(&c1, "Lambda(1+2x)+b(1+6x)").unwrap();
        let b = parse_object(&c1, "Lambda*(1+2*x)+b*(1+6*x)").unwrap();
        assert_eq!(a, b);
        assert!(matches!(parse_object(&c1, "b x"), Err(ExprError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_object(&c1, "b*q"), Err(ExprError::UnknownLabel { pos: 2, .. })));
        assert!(matches!(parse_object(&c1, "(1+x"), Err(ExprError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_object(&c1, "1+"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_object(&c1, "1-x"), Err(ExprError::Syntax { pos: 1, .. })));
    }

    #[test]
    fn formatting() {
        let z4 = ring("HI-Z4");
        let v = |c: Vec<u32>| ObjectVector::new(z4.clone(), c).unwrap();
        assert_eq!(format_object(&v(vec![1, 0, 0, 0, 1, 0, 0, 0])), "1 + r");
        assert_eq!(format_object(&v(vec![1, 0, 0, 0, 2, 0, 0, 0])), "1 + 2*r");
        assert_eq!(format_object(&v(vec![0; 8])), "0");
        let k = ring("HI-Z2xZ2");
        let gamma = ObjectVector::new(k, vec![1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(format_object(&gamma), "1 + a1 + a2 + a3");
    }

    fn catalog_vector() -> impl Strategy<Value = ObjectVector> {
        let names = crate::ring::catalog::catalog_names();
        (0..names.len()).prop_flat_map(move |i| {
            let r = ring(names[i]);
            proptest::collection::vec(0u32..20, r.rank())
                .prop_map(move |c| ObjectVector::new(r.clone(), c).unwrap())
        })
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(x in catalog_vector()) {
            let back = parse_object(x.ring(), &format_object(&x)).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn distributive(a in 0usize..8, b in 0usize..8, c in 0usize..8, k in 1u32..4) {
            let r = ring("HI-Z4");
            let l = |i: usize| r.label(i).replace("a0", "1");
            let lhs = parse_object(&r, &format!("{k}*{}*({} + {})", l(a), l(b), l(c))).unwrap();
            let rhs = parse_object(&r, &format!("{k}*{}*{} + {k}*{}*{}", l(a), l(b), l(a), l(c))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mutated_input_never_panics(src in "[ab0-9rx()+* ]{0,16}") {
            let r = ring("4442");
            let _ = parse_object(&r, &src);
        }
    }
}
