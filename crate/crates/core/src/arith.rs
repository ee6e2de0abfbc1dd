//! Exact arithmetic in the real quadratic field Q(√5).
//!
//! Every Frobenius–Perron dimension handled by this crate lives in Q(√5). A
//! [`QuadNumber`] stores `a + b√5` with arbitrary-precision rational
//! coefficients, so products of dimensions never overflow and equality is
//! exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default tolerance for [`QuadNumber::recognize`].
pub const RECOGNITION_TOL: f64 = 1e-9;
/// Default bound on the half-integer lattice coordinates searched by
/// [`QuadNumber::recognize`].
pub const RECOGNITION_BOUND: i64 = 1_000_000;

const SQRT5: f64 = 2.236_067_977_499_79;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("ambiguous recognition of {value}: both {first} and {second} lie within {tol}")]
    Ambiguous {
        value: f64,
        tol: f64,
        first: String,
        second: String,
    },
    #[error("cannot parse quadratic number from {0:?}")]
    Parse(String),
}

/// An element `a + b√5` of Q(√5).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadNumber {
    a: BigRational,
    b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn rat_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Result<BigRational, ArithError> {
    let err = || ArithError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

impl QuadNumber {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadNumber { a, b }
    }

    pub fn zero() -> Self {
        QuadNumber::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        QuadNumber::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        QuadNumber::new(rat(n), BigRational::zero())
    }

    /// `(u + v√5) / 2`, the half-integer lattice parametrisation.
    pub fn half(u: i64, v: i64) -> Self {
        let two = BigInt::from(2);
        QuadNumber::new(
            BigRational::new(BigInt::from(u), two.clone()),
            BigRational::new(BigInt::from(v), two),
        )
    }

    /// `p + q√5` with rational coefficients `pn/pd`, `qn/qd`.
    pub fn from_ratios(pn: i64, pd: i64, qn: i64, qd: i64) -> Self {
        QuadNumber::new(
            BigRational::new(pn.into(), pd.into()),
            BigRational::new(qn.into(), qd.into()),
        )
    }

    pub fn sqrt5() -> Self {
        QuadNumber::new(BigRational::zero(), BigRational::one())
    }

    /// The number `d = 2 + √5`, dimension of ρ in the order-4 Haagerup–Izumi rings.
    pub fn d() -> Self {
        QuadNumber::new(rat(2), BigRational::one())
    }

    /// `p + q·d` with integer `p`, `q`.
    pub fn in_d(p: i64, q: i64) -> Self {
        QuadNumber::from_int(p) + QuadNumber::from_int(q) * QuadNumber::d()
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt5_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// True when `2a` and `2b` are integers.
    pub fn on_half_lattice(&self) -> bool {
        let two = rat(2);
        (&self.a * &two).is_integer() && (&self.b * &two).is_integer()
    }

    /// Galois conjugate `a - b√5`.
    pub fn conjugate(&self) -> Self {
        QuadNumber::new(self.a.clone(), -self.b.clone())
    }

    /// Field norm `a² - 5b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(5) * &self.b * &self.b
    }

    pub fn checked_div(&self, rhs: &QuadNumber) -> Result<QuadNumber, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let n = rhs.norm();
        let num = self * &rhs.conjugate();
        Ok(QuadNumber::new(num.a / &n, num.b / &n))
    }

    pub fn recip(&self) -> Result<QuadNumber, ArithError> {
        QuadNumber::one().checked_div(self)
    }

    /// Exact sign of `a + b√5` as a real number.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa >= 0 && sb >= 0 {
            return if sa == 0 && sb == 0 { 0 } else { 1 };
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        // opposite signs: compare a² against 5b²
        let a2 = &self.a * &self.a;
        let b2 = rat(5) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> QuadNumber {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * SQRT5
    }

    /// The nonnegative square root inside Q(√5), if it exists.
    pub fn sqrt(&self) -> Option<QuadNumber> {
        match self.signum() {
            -1 => return None,
            0 => return Some(QuadNumber::zero()),
            _ => {}
        }
        let two = rat(2);
        let mut candidates = Vec::new();
        if self.b.is_zero() {
            if let Some(p) = rat_sqrt(&self.a) {
                candidates.push(QuadNumber::new(p, BigRational::zero()));
            }
            if let Some(q) = rat_sqrt(&(&self.a / rat(5))) {
                candidates.push(QuadNumber::new(BigRational::zero(), q));
            }
        } else {
            // (p + q√5)² = p² + 5q² + 2pq√5, so p² is a root of
            // t² - a·t + 5b²/4 = 0 with discriminant a² - 5b².
            let m = rat_sqrt(&self.norm())?;
            for p2 in [(&self.a + &m) / &two, (&self.a - &m) / &two] {
                if let Some(p) = rat_sqrt(&p2) {
                    if p.is_zero() {
                        continue;
                    }
                    let q = &self.b / (&two * &p);
                    candidates.push(QuadNumber::new(p, q));
                }
            }
        }
        candidates
            .into_iter()
            .map(|y| y.abs())
            .find(|y| &(y * y) == self)
    }

    /// Recover the half-integer lattice point `(u + v√5)/2` within `tol` of
    /// `value` with `|u|, |v| <= bound`. Among matches the one of least
    /// height `max(|u|, |v|)` wins; two matches of that least height are
    /// reported as ambiguous.
    pub fn recognize_with_bound(
        value: f64,
        tol: f64,
        bound: i64,
    ) -> Result<Option<QuadNumber>, ArithError> {
        let mut best: Option<(i64, i64)> = None;
        let mut tie: Option<(i64, i64)> = None;
        let height = |(u, v): (i64, i64)| u.abs().max(v.abs());
        let twice = 2.0 * value;
        for v in -bound..=bound {
            let shift = v as f64 * SQRT5;
            let lo = (twice - 2.0 * tol - shift).ceil().max(-(bound as f64));
            let hi = (twice + 2.0 * tol - shift).floor().min(bound as f64);
            let mut u = lo;
            while u <= hi {
                let approx = (u + shift) / 2.0;
                if (approx - value).abs() <= tol {
                    let cand = (u as i64, v);
                    match best {
                        None => best = Some(cand),
                        Some(b) if height(cand) < height(b) => {
                            best = Some(cand);
                            tie = None;
                        }
                        Some(b) if height(cand) == height(b) => tie = Some(cand),
                        Some(_) => {}
                    }
                }
                u += 1.0;
            }
        }
        if let (Some((pu, pv)), Some((u, v))) = (best, tie) {
            return Err(ArithError::Ambiguous {
                value,
                tol,
                first: QuadNumber::half(pu, pv).to_text(),
                second: QuadNumber::half(u, v).to_text(),
            });
        }
        Ok(best.map(|(u, v)| QuadNumber::half(u, v)))
    }

    pub fn recognize(value: f64, tol: f64) -> Result<Option<QuadNumber>, ArithError> {
        QuadNumber::recognize_with_bound(value, tol, RECOGNITION_BOUND)
    }

    /// Canonical text form `(u+v*sqrt5)/w`; `w` is 2 on the half-integer lattice.
    pub fn to_text(&self) -> String {
        let two = BigInt::from(2);
        let den = num::integer::lcm(
            num::integer::lcm(self.a.denom().clone(), self.b.denom().clone()),
            two,
        );
        let u = (&self.a * BigRational::from_integer(den.clone())).to_integer();
        let v = (&self.b * BigRational::from_integer(den.clone())).to_integer();
        let sign = if v.is_negative() { '-' } else { '+' };
        format!("({}{}{}*sqrt5)/{}", u, sign, v.abs(), den)
    }

    /// Human form in terms of `d = 2+√5`, e.g. `3+3d` or `(1+3d)/2`.
    pub fn to_d_string(&self) -> String {
        // a + b√5 = (a - 2b) + b·d
        let p = &self.a - rat(2) * &self.b;
        let q = self.b.clone();
        let den = num::integer::lcm(p.denom().clone(), q.denom().clone());
        let pn = (&p * BigRational::from_integer(den.clone())).to_integer();
        let qn = (&q * BigRational::from_integer(den.clone())).to_integer();
        let mut s = String::new();
        if !pn.is_zero() || qn.is_zero() {
            s.push_str(&pn.to_string());
        }
        if !qn.is_zero() {
            if !s.is_empty() && !qn.is_negative() {
                s.push('+');
            }
            if qn.is_negative() {
                s.push('-');
            }
            if qn.abs() != BigInt::one() {
                s.push_str(&qn.abs().to_string());
            }
            s.push('d');
        }
        if den != BigInt::one() {
            s = format!("({})/{}", s, den);
        }
        s
    }

    /// JSON pair form `["a", "b"]` of the coefficients of 1 and √5.
    pub fn to_pair(&self) -> [String; 2] {
        [rat_to_string(&self.a), rat_to_string(&self.b)]
    }

    pub fn from_pair(pair: &[String; 2]) -> Result<QuadNumber, ArithError> {
        Ok(QuadNumber::new(parse_rat(&pair[0])?, parse_rat(&pair[1])?))
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl FromStr for QuadNumber {
    type Err = ArithError;

    /// Accepts the canonical `(u+v*sqrt5)/w` form, `u+v*sqrt5`, or a rational.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ArithError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, den) = if let Some(rest) = t.strip_prefix('(') {
            let (inner, tail) = rest.rsplit_once(')').ok_or_else(err)?;
            let den = match tail.strip_prefix('/') {
                Some(w) => parse_rat(w)?,
                None if tail.is_empty() => BigRational::one(),
                None => return Err(err()),
            };
            (inner.to_string(), den)
        } else {
            (t.clone(), BigRational::one())
        };
        if den.is_zero() {
            return Err(err());
        }
        let (a, b) = match body.find("sqrt5") {
            None => (parse_rat(&body)?, BigRational::zero()),
            Some(pos) => {
                let head = &body[..pos];
                if !body[pos + 5..].is_empty() {
                    return Err(err());
                }
                let head = head.strip_suffix('*').unwrap_or(head);
                // split the rational part from the coefficient of sqrt5
                let split = head
                    .char_indices()
                    .skip(1)
                    .filter(|&(_, c)| c == '+' || c == '-')
                    .map(|(i, _)| i)
                    .last();
                let (ra, rb) = match split {
                    Some(i) => (&head[..i], &head[i..]),
                    None => ("0", head),
                };
                let rb = match rb {
                    "" | "+" => "1",
                    "-" => "-1",
                    x => x.strip_prefix('+').unwrap_or(x),
                };
                (parse_rat(ra)?, parse_rat(rb)?)
            }
        };
        Ok(QuadNumber::new(a / &den, b / &den))
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_d_string())
    }
}

impl fmt::Debug for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PartialOrd for QuadNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Serialize for QuadNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_pair().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pair = <[String; 2]>::deserialize(d)?;
        QuadNumber::from_pair(&pair).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for QuadNumber {
    fn from(n: i64) -> Self {
        QuadNumber::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a QuadNumber> for &'a QuadNumber {
            type Output = QuadNumber;
            fn $method(self, rhs: &'a QuadNumber) -> QuadNumber {
                let f: fn(&QuadNumber, &QuadNumber) -> QuadNumber = $body;
                f(self, rhs)
            }
        }
        impl $tr<QuadNumber> for QuadNumber {
            type Output = QuadNumber;
            fn $method(self, rhs: QuadNumber) -> QuadNumber {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadNumber> for QuadNumber {
            type Output = QuadNumber;
            fn $method(self, rhs: &'a QuadNumber) -> QuadNumber {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QuadNumber::new(&x.a + &y.a, &x.b + &y.b));
forward_binop!(Sub, sub, |x, y| QuadNumber::new(&x.a - &y.a, &x.b - &y.b));
forward_binop!(Mul, mul, |x, y| QuadNumber::new(
    &x.a * &y.a + rat(5) * &x.b * &y.b,
    &x.a * &y.b + &x.b * &y.a
));

impl Neg for QuadNumber {
    type Output = QuadNumber;
    fn neg(self) -> QuadNumber {
        QuadNumber::new(-self.a, -self.b)
    }
}

impl AddAssign<&QuadNumber> for QuadNumber {
    fn add_assign(&mut self, rhs: &QuadNumber) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl Mul<i64> for &QuadNumber {
    type Output = QuadNumber;
    fn mul(self, rhs: i64) -> QuadNumber {
        QuadNumber::new(&self.a * rat(rhs), &self.b * rat(rhs))
    }
}

impl std::iter::Sum for QuadNumber {
    fn sum<I: Iterator<Item = QuadNumber>>(iter: I) -> Self {
        iter.fold(QuadNumber::zero(), |acc, x| acc + x)
    }
}

/// `a + b√5` scaled to integers: `(p + q√5) / den` with a shared denominator.
/// Used on hot paths where the BigRational representation is too slow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScaledInt {
    pub p: i128,
    pub q: i128,
}

impl ScaledInt {
    /// Write `x·den` as integers; `None` if `x·den` is not integral or overflows.
    pub fn from_quad(x: &QuadNumber, den: &BigInt) -> Option<ScaledInt> {
        let scale = BigRational::from_integer(den.clone());
        let a = &x.a * &scale;
        let b = &x.b * &scale;
        if !a.is_integer() || !b.is_integer() {
            return None;
        }
        Some(ScaledInt {
            p: a.to_integer().to_i128()?,
            q: b.to_integer().to_i128()?,
        })
    }
}

/// Least common denominator of the coefficients of every number given.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a QuadNumber>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| {
        num::integer::lcm(num::integer::lcm(acc, x.a.denom().clone()), x.b.denom().clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d() -> QuadNumber {
        QuadNumber::d()
    }

    #[test]
    fn field_examples() {
        assert_eq!(&d() * &d(), QuadNumber::new(rat(9), rat(4)));
        let g4 = QuadNumber::from_int(1) + &d() * 4;
        assert!((&d() * &d() - g4).is_zero());
        let x = QuadNumber::half(1, 1) * QuadNumber::half(-1, 1);
        assert_eq!(x, QuadNumber::one());
        assert_eq!(
            QuadNumber::one().checked_div(&QuadNumber::zero()),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn sign_examples() {
        assert_eq!(d().signum(), 1);
        assert_eq!(QuadNumber::from_ratios(-3, 1, 1, 1).signum(), -1);
        assert_eq!(QuadNumber::zero().signum(), 0);
        assert_eq!(QuadNumber::from_ratios(3, 1, -1, 1).signum(), 1);
    }

    #[test]
    fn sqrt_examples() {
        let one_4d = QuadNumber::in_d(1, 4);
        assert_eq!(one_4d.sqrt(), Some(d()));
        // ((d+1)/2)^2 = (1+3d)/2
        let x = QuadNumber::in_d(1, 3).checked_div(&2.into()).unwrap();
        let y = (d() + QuadNumber::one()).checked_div(&2.into()).unwrap();
        assert_eq!(x.sqrt(), Some(y));
        assert_eq!(QuadNumber::from_int(2).sqrt(), None);
        assert_eq!(QuadNumber::from_int(5).sqrt(), Some(QuadNumber::sqrt5()));
        assert_eq!(QuadNumber::from_int(-4).sqrt(), None);
        // sqrt(1+d) is not in the field
        assert_eq!(QuadNumber::in_d(1, 1).sqrt(), None);
    }

    #[test]
    fn recognize_examples() {
        assert_eq!(QuadNumber::recognize(4.23606797, 1e-6).unwrap(), Some(d()));
        assert_eq!(
            QuadNumber::recognize(2.61803398, 1e-6).unwrap(),
            Some(QuadNumber::half(3, 1))
        );
        assert_eq!(
            QuadNumber::recognize(0.5, 1e-9).unwrap(),
            Some(QuadNumber::half(1, 0))
        );
        assert!(matches!(
            QuadNumber::recognize_with_bound(1.0, 0.6, 4),
            Err(ArithError::Ambiguous { .. })
        ));
        assert_eq!(QuadNumber::recognize_with_bound(0.3, 1e-9, 3).unwrap(), None);
    }

    #[test]
    fn text_forms() {
        assert_eq!(d().to_text(), "(4+2*sqrt5)/2");
        assert_eq!(QuadNumber::half(1, -3).to_text(), "(1-3*sqrt5)/2");
        assert_eq!(QuadNumber::in_d(3, 3).to_d_string(), "3+3d");
        let x = QuadNumber::in_d(1, 3).checked_div(&2.into()).unwrap();
        assert_eq!(x.to_d_string(), "(1+3d)/2");
        assert_eq!(QuadNumber::in_d(-1, 1).to_d_string(), "-1+d");
        assert_eq!("2+sqrt5".parse::<QuadNumber>().unwrap(), d());
        assert_eq!("1/2".parse::<QuadNumber>().unwrap(), QuadNumber::half(1, 0));
        assert_eq!("-sqrt5".parse::<QuadNumber>().unwrap(), -QuadNumber::sqrt5());
        assert!("(1+2*sqrt5)/0".parse::<QuadNumber>().is_err());
        assert!("x".parse::<QuadNumber>().is_err());
    }

    fn lattice() -> impl Strategy<Value = QuadNumber> {
        (-60i64..60, -60i64..60).prop_map(|(u, v)| QuadNumber::half(u, v))
    }

    proptest! {
        #[test]
        fn field_axioms(x in lattice(), y in lattice(), z in lattice()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &y, &y + &x);
            if !y.is_zero() {
                let q = x.checked_div(&y).unwrap();
                prop_assert_eq!(&q * &y, x.clone());
            }
        }

        #[test]
        fn sqrt_of_square(x in lattice()) {
            prop_assert_eq!((&x * &x).sqrt(), Some(x.abs()));
        }

        #[test]
        fn recognize_round_trip(u in -2000i64..2000, v in -2000i64..2000) {
            let x = QuadNumber::half(u, v);
            prop_assert_eq!(QuadNumber::recognize(x.to_f64(), 1e-9).unwrap(), Some(x));
        }

        #[test]
        fn sign_agrees_with_float(u in -10_000i64..10_000, v in -10_000i64..10_000) {
            let x = QuadNumber::half(u, v);
            let f = (u as f64 + v as f64 * 5f64.sqrt()) / 2.0;
            if f.abs() > 1e-6 {
                prop_assert_eq!(x.signum(), if f > 0.0 { 1 } else { -1 });
            } else {
                prop_assert_eq!(x.signum() == 0, u == 0 && v == 0);
            }
        }

        #[test]
        fn text_round_trip(u in -500i64..500, v in -500i64..500, w in 1i64..9) {
            let x = QuadNumber::from_ratios(u, w, v, w);
            prop_assert_eq!(x.to_text().parse::<QuadNumber>().unwrap(), x.clone());
            let json = serde_json::to_string(&x).unwrap();
            prop_assert_eq!(serde_json::from_str::<QuadNumber>(&json).unwrap(), x);
        }
    }
}
