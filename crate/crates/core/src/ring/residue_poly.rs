use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{ResidueElem, ResidueField};
use crate::error::{Error, Result};

/// A point of `P¹(C)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum P1 {
    Finite(ResidueElem),
    Infinity,
}

impl fmt::Display for P1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1::Finite(a) => write!(f, "{a}"),
            P1::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for P1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Univariate polynomial over the residue field, coefficients from degree 0 upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePoly {
    field: ResidueField,
    c: Vec<ResidueElem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport {
    pub roots: Vec<(P1, usize)>,
    pub nonsplit: Vec<usize>,
}

impl RootReport {
    pub fn is_split(&self) -> bool {
        self.nonsplit.is_empty()
    }

    pub fn multiplicity(&self, a: &P1) -> usize {
        self.roots.iter().find(|(r, _)| r == a).map(|(_, m)| *m).unwrap_or(0)
    }
}

impl ResiduePoly {
    pub fn new(field: ResidueField, c: Vec<ResidueElem>) -> Self {
        let mut p = ResiduePoly { field, c };
        p.trim();
        p
    }

    pub fn zero(field: ResidueField) -> Self {
        ResiduePoly { field, c: vec![] }
    }

    pub fn constant(field: ResidueField, a: ResidueElem) -> Self {
        Self::new(field, vec![a])
    }

    /// `x - a`.
    pub fn linear(field: ResidueField, a: &ResidueElem) -> Self {
        Self::new(field, vec![field.neg(a), field.one()])
    }

    pub fn x(field: ResidueField) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    fn trim(&mut self) {
        while matches!(self.c.last(), Some(x) if x.is_zero()) {
            self.c.pop();
        }
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn coeffs(&self) -> &[ResidueElem] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> ResidueElem {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> ResidueElem {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &ResidueElem) -> ResidueElem {
        let f = self.field;
        self.c
            .iter()
            .rev()
            .fold(f.zero(), |acc, a| f.add(&f.mul(&acc, x), a))
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = self.field;
        let n = self.c.len().max(o.c.len());
        Self::new(f, (0..n).map(|i| f.add(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let f = self.field;
        let n = self.c.len().max(o.c.len());
        Self::new(f, (0..n).map(|i| f.sub(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = self.field;
        if self.is_zero() || o.is_zero() {
            return Self::zero(f);
        }
        let mut out = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn scale(&self, a: &ResidueElem) -> Self {
        let f = self.field;
        Self::new(f, self.c.iter().map(|x| f.mul(x, a)).collect())
    }

    pub fn monic(&self) -> Self {
        match self.field.inv(&self.lc()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let f = self.field;
        Self::new(
            f,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| f.mul(&f.from_int(i as i64), a))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let f = self.field;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = f.inv(&d.lc()).unwrap();
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let coef = f.mul(&rem[k + dd], &inv);
            if coef.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                rem[k + j] = f.sub(&rem[k + j], &f.mul(&coef, b));
            }
            quot[k] = coef;
        }
        rem.truncate(dd);
        (Self::new(f, quot), Self::new(f, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &ResidueElem) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Self::linear(self.field, a);
        let mut p = self.clone();
        let mut m = 0;
        while let Some(q) = p.div_exact(&lin) {
            p = q;
            m += 1;
        }
        m
    }

    fn powmod(&self, e: &BigInt, m: &Self) -> Self {
        let f = self.field;
        let mut acc = Self::constant(f, f.one()).rem(m);
        let mut base = self.rem(m);
        let mut e = e.clone();
        let two = BigInt::from(2);
        while e.is_positive() {
            if e.is_odd() {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e /= &two;
        }
        acc
    }

    /// Distinct roots with multiplicities, plus the degrees of the unsplit part.
    pub fn roots(&self) -> Result<RootReport> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let distinct = match self.field {
            ResidueField::Rationals => rational_roots(self),
            ResidueField::Prime(p) => prime_roots(self, p),
        };
        let mut roots = Vec::new();
        let mut rest = self.clone();
        for a in distinct {
            let m = rest.root_multiplicity(&a);
            if m > 0 {
                let lin = Self::linear(self.field, &a);
                for _ in 0..m {
                    rest = rest.div_exact(&lin).unwrap();
                }
                roots.push((P1::Finite(a), m));
            }
        }
        roots.sort();
        let nonsplit = match rest.degree() {
            Some(0) | None => vec![],
            _ => match self.field {
                ResidueField::Rationals => squarefree_degrees(&rest),
                ResidueField::Prime(p) => distinct_degree_degrees(&rest, p),
            },
        };
        Ok(RootReport { roots, nonsplit })
    }
}

impl fmt::Display for ResiduePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| match i {
                0 => format!("({a})"),
                1 => format!("({a})*x"),
                _ => format!("({a})*x^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn prime_roots(p: &ResiduePoly, prime: u64) -> Vec<ResidueElem> {
    let f = p.field;
    if p.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    if prime == 2 {
        return (0..2)
            .map(|k| f.from_int(k))
            .filter(|a| p.eval(a).is_zero())
            .collect();
    }
    let x = ResiduePoly::x(f);
    let xp = x.powmod(&BigInt::from(prime), p);
    let r = p.gcd(&xp.sub(&x));
    let mut out = Vec::new();
    split_linear(&r, prime, &mut out);
    out.sort();
    out
}

/// Splits a squarefree product of distinct linear factors over `F_p`, p odd.
fn split_linear(r: &ResiduePoly, prime: u64, out: &mut Vec<ResidueElem>) {
    let f = r.field;
    match r.degree() {
        None | Some(0) => return,
        Some(1) => {
            let a = f.neg(&f.div(&r.coeff(0), &r.coeff(1)).unwrap());
            out.push(a);
            return;
        }
        _ => {}
    }
    let e = BigInt::from((prime - 1) / 2);
    for delta in 0..prime {
        let shifted = ResiduePoly::new(f, vec![f.from_int(delta as i64), f.one()]);
        let h = shifted.powmod(&e, r).sub(&ResiduePoly::constant(f, f.one()));
        let g = r.gcd(&h);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < r.degree().unwrap() {
            split_linear(&g, prime, out);
            split_linear(&r.div_exact(&g).unwrap(), prime, out);
            return;
        }
    }
    unreachable!("equal-degree splitting failed");
}

/// Degrees of irreducible factors of a polynomial without linear factors over `F_p`.
fn distinct_degree_degrees(p: &ResiduePoly, prime: u64) -> Vec<usize> {
    let f = p.field;
    let mut h = p.monic();
    let x = ResiduePoly::x(f);
    let pp = BigInt::from(prime);
    let mut frob = x.clone();
    let mut degs = Vec::new();
    let mut k = 0usize;
    while h.degree().unwrap_or(0) > 0 {
        k += 1;
        frob = frob.powmod(&pp, &h);
        let mut pk = h.gcd(&frob.sub(&x));
        while pk.degree().unwrap_or(0) > 0 {
            let count = pk.degree().unwrap() / k;
            degs.extend(std::iter::repeat_n(k, count));
            h = h.div_exact(&pk).unwrap();
            if h.degree().unwrap_or(0) == 0 {
                break;
            }
            pk = h.gcd(&pk);
        }
        if h.degree().unwrap_or(0) > 0 {
            frob = frob.rem(&h);
        }
    }
    degs.sort();
    degs
}

/// Yun squarefree decomposition in characteristic zero; returns each factor's degree
/// repeated by its multiplicity.
fn squarefree_degrees(p: &ResiduePoly) -> Vec<usize> {
    let f = p.monic();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_exact(&a0).unwrap();
    let c = df.div_exact(&a0).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut degs = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let da = a.degree().unwrap_or(0);
        degs.extend(std::iter::repeat_n(da, if da > 0 { i } else { 0 }));
        b = b.div_exact(&a).unwrap();
        let c = d.div_exact(&a).unwrap();
        d = c.sub(&b.derivative());
        i += 1;
    }
    degs.sort();
    degs
}

fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut k = BigInt::from(2);
    let limit = BigInt::from(2_000_000u64);
    while &k * &k <= m && k < limit {
        let mut e = 0;
        while (&m % &k).is_zero() {
            m /= &k;
            e += 1;
        }
        if e > 0 {
            factors.push((k.clone(), e));
        }
        k += 1;
    }
    if m > BigInt::one() {
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (q, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pw);
                pw *= &q;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

fn rational_roots(p: &ResiduePoly) -> Vec<ResidueElem> {
    let mut roots = Vec::new();
    let lcm = p
        .c
        .iter()
        .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    let mut ints: Vec<BigInt> = p
        .c
        .iter()
        .map(|a| (a * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    if ints[0].is_zero() {
        roots.push(BigRational::zero());
        while ints[0].is_zero() {
            ints.remove(0);
        }
    }
    if ints.len() <= 1 {
        return roots;
    }
    let a0 = ints[0].clone();
    let an = ints.last().unwrap().clone();
    let eval = |x: &BigRational| {
        ints.iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + BigRational::from_integer(a.clone()))
    };
    let nums = small_divisors(&a0);
    let dens = small_divisors(&an);
    for num in &nums {
        for den in &dens {
            if !num.gcd(den).is_one() {
                continue;
            }
            for sign in [1i32, -1] {
                let x = BigRational::new(num * BigInt::from(sign), den.clone());
                if eval(&x).is_zero() && !roots.contains(&x) {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Homogeneous binary form over the residue field; `c[i]` is the coefficient of `X^i Y^{n-i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueForm {
    field: ResidueField,
    c: Vec<ResidueElem>,
}

impl ResidueForm {
    pub fn new(field: ResidueField, c: Vec<ResidueElem>) -> Self {
        assert!(!c.is_empty(), "a binary form has at least one coefficient");
        ResidueForm { field, c }
    }

    pub fn zero(field: ResidueField, degree: usize) -> Self {
        ResidueForm { field, c: vec![field.zero(); degree + 1] }
    }

    /// Homogenizes a univariate polynomial to the given degree.
    pub fn from_poly(p: &ResiduePoly, degree: usize) -> Self {
        let f = p.field();
        assert!(p.degree().is_none_or(|d| d <= degree));
        ResidueForm { field: f, c: (0..=degree).map(|i| p.coeff(i)).collect() }
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[ResidueElem] {
        &self.c
    }

    /// Coefficient of `X^i Y^{n-i}`.
    pub fn coeff(&self, i: usize) -> &ResidueElem {
        &self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    /// `F(x, 1)`.
    pub fn dehomogenize(&self) -> ResiduePoly {
        ResiduePoly::new(self.field, self.c.clone())
    }

    /// Multiplicity of `(1:0)`.
    pub fn infinity_multiplicity(&self) -> usize {
        match self.dehomogenize().degree() {
            Some(k) => self.degree() - k,
            None => usize::MAX,
        }
    }

    pub fn multiplicity(&self, a: &P1) -> usize {
        match a {
            P1::Infinity => self.infinity_multiplicity(),
            P1::Finite(x) => self.dehomogenize().root_multiplicity(x),
        }
    }

    /// Value at the representative `(a, 1)` or `(1, 0)`.
    pub fn eval(&self, a: &P1) -> ResidueElem {
        match a {
            P1::Finite(x) => self.dehomogenize().eval(x),
            P1::Infinity => self.c.last().unwrap().clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.dehomogenize().mul(&o.dehomogenize());
        Self::from_poly(&p, self.degree() + o.degree())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree());
        let f = self.field;
        ResidueForm { field: f, c: self.c.iter().zip(&o.c).map(|(a, b)| f.add(a, b)).collect() }
    }

    pub fn scale(&self, a: &ResidueElem) -> Self {
        let f = self.field;
        ResidueForm { field: f, c: self.c.iter().map(|x| f.mul(x, a)).collect() }
    }

    /// `X·self`.
    pub fn times_x(&self) -> Self {
        let mut c = vec![self.field.zero()];
        c.extend(self.c.iter().cloned());
        ResidueForm { field: self.field, c }
    }

    /// `Y·self`.
    pub fn times_y(&self) -> Self {
        let mut c = self.c.clone();
        c.push(self.field.zero());
        ResidueForm { field: self.field, c }
    }

    /// `F(Y, X)`.
    pub fn swap_variables(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        ResidueForm { field: self.field, c }
    }

    /// Gcd of two forms, normalized so that its dehomogenization is monic.
    pub fn gcd(&self, o: &Self) -> Result<Self> {
        if self.is_zero() && o.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(o.normalized());
        }
        if o.is_zero() {
            return Ok(self.normalized());
        }
        let e = self.infinity_multiplicity().min(o.infinity_multiplicity());
        let g = self.dehomogenize().gcd(&o.dehomogenize());
        let deg = e + g.degree().unwrap();
        Ok(Self::from_poly(&g, deg))
    }

    fn normalized(&self) -> Self {
        let p = self.dehomogenize().monic();
        Self::from_poly(&p, self.degree())
    }

    /// Exact quotient of forms.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() || d.degree() > self.degree() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.field, self.degree() - d.degree()));
        }
        if d.infinity_multiplicity() > self.infinity_multiplicity() {
            return None;
        }
        let q = self.dehomogenize().div_exact(&d.dehomogenize())?;
        Some(Self::from_poly(&q, self.degree() - d.degree()))
    }

    /// Roots in `P¹(C)` with multiplicities.
    pub fn roots(&self) -> Result<RootReport> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let e = self.infinity_multiplicity();
        let mut rep = self.dehomogenize().roots()?;
        if e > 0 {
            rep.roots.push((P1::Infinity, e));
        }
        Ok(rep)
    }
}

/// Roots of a binary residue form; see [`ResidueForm::roots`].
pub fn residue_roots(p: &ResidueForm) -> Result<RootReport> {
    p.roots()
}
