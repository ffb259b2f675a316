//! Exact arithmetic in `R = C[t^Q]` over a residue field `C` that is either
//! `Q` or `F_p`.

mod parse;
mod residue_poly;
mod rpoly;

pub use parse::{parse_puiseux, parse_rational_function, RationalFunction};
pub use residue_poly::{residue_roots, ResidueForm, ResiduePoly, RootReport, P1};
pub use rpoly::{NewtonPolygon, RPoly};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents of `t`.
pub type Exp = Rational64;

/// Elements of the residue field. Over `F_p` the value is always an integer in `[0, p)`.
pub type ResidueElem = BigRational;

pub fn exp(n: i64, d: i64) -> Exp {
    Exp::new(n, d)
}

pub fn exp_int(n: i64) -> Exp {
    Exp::from_integer(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResidueField {
    Rationals,
    Prime(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

impl ResidueField {
    pub fn prime(p: u64) -> Result<Self> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(ResidueField::Prime(p))
    }

    /// Parses `Q` or `F<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" || s == "q" {
            return Ok(ResidueField::Rationals);
        }
        if let Some(rest) = s.strip_prefix('F').or_else(|| s.strip_prefix('f')) {
            let p: u64 = rest
                .parse()
                .map_err(|_| Error::InvalidField(s.to_string()))?;
            return ResidueField::prime(p);
        }
        Err(Error::InvalidField(s.to_string()))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            ResidueField::Rationals => 0,
            ResidueField::Prime(p) => *p,
        }
    }

    fn reduce_int(&self, n: &BigInt) -> ResidueElem {
        match self {
            ResidueField::Rationals => BigRational::from_integer(n.clone()),
            ResidueField::Prime(p) => {
                let m = BigInt::from(*p);
                let mut r = n % &m;
                if r.is_negative() {
                    r += &m;
                }
                BigRational::from_integer(r)
            }
        }
    }

    /// Image of a rational number, `None` when the denominator vanishes mod p.
    pub fn from_rational(&self, x: &BigRational) -> Option<ResidueElem> {
        match self {
            ResidueField::Rationals => Some(x.clone()),
            ResidueField::Prime(_) => {
                let num = self.reduce_int(x.numer());
                let den = self.reduce_int(x.denom());
                self.inv(&den).map(|d| self.mul(&num, &d))
            }
        }
    }

    pub fn from_int(&self, n: i64) -> ResidueElem {
        self.reduce_int(&BigInt::from(n))
    }

    pub fn zero(&self) -> ResidueElem {
        BigRational::zero()
    }

    pub fn one(&self) -> ResidueElem {
        BigRational::one()
    }

    pub fn add(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        match self {
            ResidueField::Rationals => a + b,
            ResidueField::Prime(_) => self.reduce_int(&(a.numer() + b.numer())),
        }
    }

    pub fn sub(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        match self {
            ResidueField::Rationals => a - b,
            ResidueField::Prime(_) => self.reduce_int(&(a.numer() - b.numer())),
        }
    }

    pub fn mul(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        match self {
            ResidueField::Rationals => a * b,
            ResidueField::Prime(_) => self.reduce_int(&(a.numer() * b.numer())),
        }
    }

    pub fn neg(&self, a: &ResidueElem) -> ResidueElem {
        match self {
            ResidueField::Rationals => -a,
            ResidueField::Prime(_) => self.reduce_int(&(-a.numer())),
        }
    }

    pub fn inv(&self, a: &ResidueElem) -> Option<ResidueElem> {
        if a.is_zero() {
            return None;
        }
        match self {
            ResidueField::Rationals => Some(a.recip()),
            ResidueField::Prime(p) => {
                let m = BigInt::from(*p);
                let e = BigInt::from(*p - 2);
                Some(BigRational::from_integer(a.numer().modpow(&e, &m)))
            }
        }
    }

    pub fn div(&self, a: &ResidueElem, b: &ResidueElem) -> Option<ResidueElem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &ResidueElem, n: u64) -> ResidueElem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// All field elements, for prime fields only.
    pub fn elements(&self) -> Option<Vec<ResidueElem>> {
        match self {
            ResidueField::Rationals => None,
            ResidueField::Prime(p) => Some((0..*p).map(|k| self.from_int(k as i64)).collect()),
        }
    }
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueField::Rationals => write!(f, "Q"),
            ResidueField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// `Q ∪ {+∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Exp),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<Exp> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(e) => write!(f, "{e}"),
            Valuation::Infinity => write!(f, "+inf"),
        }
    }
}

/// A finite sum `Σ c_q t^q` with rational exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PuiseuxPoly {
    field: ResidueField,
    terms: BTreeMap<Exp, ResidueElem>,
}

impl PuiseuxPoly {
    pub fn zero(field: ResidueField) -> Self {
        PuiseuxPoly { field, terms: BTreeMap::new() }
    }

    pub fn one(field: ResidueField) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: ResidueField, c: ResidueElem) -> Self {
        Self::monomial(field, c, Exp::zero())
    }

    pub fn from_int(field: ResidueField, n: i64) -> Self {
        Self::constant(field, field.from_int(n))
    }

    pub fn monomial(field: ResidueField, c: ResidueElem, e: Exp) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        PuiseuxPoly { field, terms }
    }

    /// `t^e`.
    pub fn t_pow(field: ResidueField, e: Exp) -> Self {
        Self::monomial(field, field.one(), e)
    }

    /// Builds from `(exponent, coefficient)` pairs; coefficients are reduced into the field
    /// and repeated exponents summed.
    pub fn from_terms<I>(field: ResidueField, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exp, ResidueElem)>,
    {
        let mut out = Self::zero(field);
        for (e, c) in terms {
            let c = field.from_rational(&c).expect("coefficient not defined in residue field");
            out.add_term(e, &c);
        }
        out
    }

    fn add_term(&mut self, e: Exp, c: &ResidueElem) {
        if c.is_zero() {
            return;
        }
        let field = self.field;
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = field.add(v, c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exp, &ResidueElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn ord(&self) -> Valuation {
        match self.terms.keys().next() {
            Some(e) => Valuation::Finite(*e),
            None => Valuation::Infinity,
        }
    }

    /// Lowest term `(exponent, coefficient)`.
    pub fn initial(&self) -> Option<(Exp, &ResidueElem)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn max_exp(&self) -> Option<Exp> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: Exp) -> ResidueElem {
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of `t^0`; requires `ord ≥ 0`.
    pub fn residue(&self) -> Result<ResidueElem> {
        if let Valuation::Finite(e) = self.ord() {
            if e < Exp::zero() {
                return Err(Error::NegativeValuation(e.to_string()));
            }
        }
        Ok(self.coeff(Exp::zero()))
    }

    pub fn monomial_shift(&self, q: Exp) -> Self {
        PuiseuxPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (*e + q, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &ResidueElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.field);
        }
        PuiseuxPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, v)| (*e, self.field.mul(v, c))).collect(),
        }
    }

    /// Terms with exponent strictly below `bound`.
    pub fn truncate(&self, bound: Exp) -> Self {
        PuiseuxPoly {
            field: self.field,
            terms: self.terms.range(..bound).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// `self · other` modulo `t^bound`, for factors with nonnegative exponents.
    pub fn mul_trunc(&self, other: &PuiseuxPoly, bound: Exp) -> Self {
        let field = self.field;
        let mut out = Self::zero(field);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = *ea + *eb;
                if e >= bound {
                    break;
                }
                out.add_term(e, &field.mul(ca, cb));
            }
        }
        out
    }

    /// Inverse of a unit (`ord = 0`) modulo `t^bound`, by Newton iteration.
    pub fn inv_trunc(&self, bound: Exp) -> Option<Self> {
        let (e0, c0) = self.initial()?;
        if !e0.is_zero() {
            return None;
        }
        let one = Self::one(self.field);
        let mut x = Self::constant(self.field, self.field.inv(c0)?);
        loop {
            let r = &one - &self.mul_trunc(&x, bound);
            if r.is_zero() {
                return Some(x);
            }
            x = &x + &x.mul_trunc(&r, bound);
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.field);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient in `R`, or `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &PuiseuxPoly) -> Option<PuiseuxPoly> {
        let (e_b, c_b) = divisor.initial()?;
        if self.is_zero() {
            return Some(Self::zero(self.field));
        }
        let field = self.field;
        let inv = field.inv(c_b)?;
        let bound = self.max_exp()? - divisor.max_exp()?;
        let mut rem = self.terms.clone();
        let mut quot = BTreeMap::new();
        while let Some((&e_r, c_r)) = rem.iter().next() {
            let e = e_r - e_b;
            if e > bound {
                return None;
            }
            let c = field.mul(c_r, &inv);
            for (e2, c2) in divisor.terms.iter() {
                let key = e + *e2;
                let prod = field.mul(&c, c2);
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v = field.sub(v, &prod);
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, field.neg(&prod));
                    }
                }
            }
            quot.insert(e, c);
        }
        Some(PuiseuxPoly { field, terms: quot })
    }

    /// The constant lift of a residue element.
    pub fn canonical_lift(field: ResidueField, a: &ResidueElem) -> Self {
        Self::constant(field, a.clone())
    }

    /// Least common denominator of the exponents.
    pub fn exponent_denominator(&self) -> i64 {
        self.terms
            .keys()
            .fold(1i64, |acc, e| num_integer::lcm(acc, *e.denom()))
    }
}

pub fn monomial_shift(x: &PuiseuxPoly, q: Exp) -> PuiseuxPoly {
    x.monomial_shift(q)
}

pub fn canonical_lift(field: ResidueField, a: &ResidueElem) -> PuiseuxPoly {
    PuiseuxPoly::canonical_lift(field, a)
}

pub fn ord(x: &PuiseuxPoly) -> Valuation {
    x.ord()
}

pub fn residue(x: &PuiseuxPoly) -> Result<ResidueElem> {
    x.residue()
}

impl<'a> Add<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn add(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        debug_assert_eq!(self.field, rhs.field);
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.add_term(*e, c);
        }
        out
    }
}

impl<'a> Sub<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn sub(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        debug_assert_eq!(self.field, rhs.field);
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.add_term(*e, &self.field.neg(c));
        }
        out
    }
}

impl<'a> Mul<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn mul(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        debug_assert_eq!(self.field, rhs.field);
        let field = self.field;
        let terms = match field {
            // Residues are integers in [0, p); accumulate in machine words and reduce once.
            ResidueField::Prime(p) => {
                let small = |c: &ResidueElem| c.numer().to_u64().expect("reduced residue") as u128;
                let mut acc: BTreeMap<Exp, u128> = BTreeMap::new();
                for (e1, c1) in self.terms.iter() {
                    let a = small(c1);
                    for (e2, c2) in rhs.terms.iter() {
                        let v = acc.entry(*e1 + *e2).or_insert(0);
                        *v = (*v + a * small(c2)) % p as u128;
                    }
                }
                acc.into_iter()
                    .filter(|(_, v)| *v != 0)
                    .map(|(e, v)| (e, BigRational::from_integer(BigInt::from(v as u64))))
                    .collect()
            }
            ResidueField::Rationals => {
                let mut acc: BTreeMap<Exp, BigRational> = BTreeMap::new();
                for (e1, c1) in self.terms.iter() {
                    for (e2, c2) in rhs.terms.iter() {
                        *acc.entry(*e1 + *e2).or_insert_with(BigRational::zero) += c1 * c2;
                    }
                }
                acc.retain(|_, v| !v.is_zero());
                acc
            }
        };
        PuiseuxPoly { field, terms }
    }
}

impl Neg for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        PuiseuxPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (*e, self.field.neg(c))).collect(),
        }
    }
}

impl Add for PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn add(self, rhs: PuiseuxPoly) -> PuiseuxPoly {
        &self + &rhs
    }
}

impl Sub for PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn sub(self, rhs: PuiseuxPoly) -> PuiseuxPoly {
        &self - &rhs
    }
}

impl Mul for PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn mul(self, rhs: PuiseuxPoly) -> PuiseuxPoly {
        &self * &rhs
    }
}

impl Neg for PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        -&self
    }
}

/// Nonnegative integers bare; negatives and fractions parenthesized, as in `(-3/2)`.
pub fn fmt_exp(e: &Exp) -> String {
    if e.is_integer() {
        let n = e.to_integer();
        if n < 0 {
            format!("({n})")
        } else {
            format!("{n}")
        }
    } else {
        format!("({e})")
    }
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter() {
            let negative = c.is_negative();
            let mag = if negative { -c } else { c.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            if *e == Exp::one() {
                write!(f, "t")?;
            } else {
                write!(f, "t^{}", fmt_exp(e))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ResidueField {
        ResidueField::Rationals
    }

    fn p(s: &str) -> PuiseuxPoly {
        parse_puiseux(s, q()).unwrap()
    }

    #[test]
    fn ord_examples() {
        assert_eq!(PuiseuxPoly::zero(q()).ord(), Valuation::Infinity);
        assert_eq!(p("t^(1/2) + 3*t^2").ord(), Valuation::Finite(exp(1, 2)));
        let prod = &p("1 + t") * &p("1 - t");
        assert_eq!(prod, p("1 - t^2"));
        assert_eq!(prod.ord(), Valuation::Finite(exp_int(0)));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(p("1 + t").residue().unwrap(), BigRational::one());
        assert!(p("t").residue().unwrap().is_zero());
        assert_eq!(
            p("3/2 + t^(1/3)").residue().unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        assert!(matches!(p("t^(-1)").residue(), Err(Error::NegativeValuation(_))));
    }

    #[test]
    fn monomial_shift_examples() {
        assert_eq!(p("1 + t").monomial_shift(exp_int(1)), p("t + t^2"));
        assert_eq!(p("t^(1/2)").monomial_shift(exp(-1, 2)), p("1"));
        assert!(PuiseuxPoly::zero(q()).monomial_shift(exp_int(5)).is_zero());
    }

    #[test]
    fn canonical_lift_examples() {
        let f7 = ResidueField::prime(7).unwrap();
        assert!(canonical_lift(f7, &f7.zero()).is_zero());
        let five = canonical_lift(f7, &f7.from_int(5));
        assert_eq!(five.residue().unwrap(), f7.from_int(5));
        assert_eq!(five.ord(), Valuation::Finite(exp_int(0)));
        assert_eq!(canonical_lift(q(), &q().from_int(-1)), p("-1"));
    }

    #[test]
    fn exact_division() {
        let a = p("1 + t^(1/2)");
        let b = p("2 - t^3 + t^(-1)");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&a), Some(b));
        assert_eq!(p("1 + t").div_exact(&p("1 - t")), None);
    }

    #[test]
    fn prime_field_arithmetic() {
        let f7 = ResidueField::prime(7).unwrap();
        let x = parse_puiseux("3 + 5*t", f7).unwrap();
        let y = parse_puiseux("4 + 2*t", f7).unwrap();
        assert_eq!(&x + &y, parse_puiseux("0 + 0*t", f7).unwrap());
        assert_eq!((&x * &y).residue().unwrap(), f7.from_int(5));
        assert_eq!(f7.inv(&f7.from_int(3)), Some(f7.from_int(5)));
        assert_eq!(f7.from_rational(&BigRational::new(1.into(), 2.into())), Some(f7.from_int(4)));
    }

    #[test]
    fn display_round_trip() {
        for s in ["3/2*t^(1/2) + 1 - t^2", "-t^(-1) + 7", "0", "t"] {
            let x = p(s);
            assert_eq!(p(&x.to_string()), x);
        }
    }

    #[test]
    fn field_parsing() {
        assert_eq!(ResidueField::parse("Q").unwrap(), q());
        assert_eq!(ResidueField::parse("F7").unwrap(), ResidueField::Prime(7));
        assert!(ResidueField::parse("F8").is_err());
    }
}
