//! Recursive-descent parser for Puiseux polynomials in `t` and rational functions in `z`.
//!
//! Grammar (implicit multiplication is accepted between adjacent factors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/')? unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! atom   := integer | 't' | 'z' | '(' expr ')'
//! ```
//!
//! Exponents of `t` may be rational, e.g. `t^(3/2)` or `t^-1`; other bases take
//! integer exponents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Exp, PuiseuxPoly, RPoly, ResidueField};
use crate::error::{Error, Result};

/// `num / den` with both parts polynomials in `z` over `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: RPoly,
    pub den: RPoly,
}

impl RationalFunction {
    fn constant(c: PuiseuxPoly) -> Self {
        let f = c.field();
        RationalFunction { num: RPoly::constant(c), den: RPoly::constant(PuiseuxPoly::one(f)) }
    }

    fn field(&self) -> ResidueField {
        self.num.field()
    }

    /// The constant monomial `c t^e` this value equals, if it is one.
    fn as_monomial(&self) -> Option<PuiseuxPoly> {
        if self.den.degree() != Some(0) || self.num.degree() != Some(0) {
            return None;
        }
        let n = self.num.coeff(0);
        let d = self.den.coeff(0);
        let q = n.div_exact(&d)?;
        (q.num_terms() == 1).then_some(q)
    }

    fn monomial_inverse(m: &PuiseuxPoly) -> Option<PuiseuxPoly> {
        let (e, c) = m.initial()?;
        let f = m.field();
        Some(PuiseuxPoly::monomial(f, f.inv(c)?, -e))
    }

    /// Folds a monomial denominator into the numerator.
    fn fold(self) -> Self {
        if self.den.degree() == Some(0) {
            let d = self.den.coeff(0);
            if d.num_terms() == 1 {
                let inv = Self::monomial_inverse(&d).expect("nonzero monomial is invertible");
                let f = self.field();
                return RationalFunction { num: self.num.scale(&inv), den: RPoly::constant(PuiseuxPoly::one(f)) };
            }
        }
        self
    }

    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RationalFunction { num: self.num.add(&o.num), den: self.den.clone() }.fold();
        }
        RationalFunction {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .fold()
    }

    fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    fn mul(&self, o: &Self) -> Self {
        RationalFunction { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.fold()
    }

    fn div(&self, o: &Self) -> Option<Self> {
        if o.num.is_zero() {
            return None;
        }
        if let Some(m) = o.as_monomial() {
            let inv = Self::monomial_inverse(&m)?;
            return Some(RationalFunction { num: self.num.scale(&inv), den: self.den.clone() }.fold());
        }
        Some(RationalFunction { num: self.num.mul(&o.den), den: self.den.mul(&o.num) }.fold())
    }

    fn powi(&self, n: i64) -> Option<Self> {
        let base = if n < 0 {
            RationalFunction::constant(PuiseuxPoly::one(self.field())).div(self)?
        } else {
            self.clone()
        };
        let k = u32::try_from(n.unsigned_abs()).ok()?;
        Some(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) }.fold())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    T,
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let ch = b[i];
        let tok = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = s[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            b't' => Tok::T,
            b'z' => Tok::Z,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                return Err(Error::Parse { pos: i, msg: format!("unexpected character {:?}", s[i..].chars().next().unwrap()) })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    field: ResidueField,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.unary()?;
                    acc = acc.div(&d).ok_or(Error::Parse { pos: at, msg: "division by zero".into() })?;
                }
                Some(Tok::Num(_) | Tok::T | Tok::Z | Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat(&Tok::Minus) {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let is_t = self.peek() == Some(&Tok::T);
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let at = self.here();
        let e = self.exponent()?;
        if is_t {
            return Ok(RationalFunction::constant(PuiseuxPoly::t_pow(self.field, e)));
        }
        if !e.is_integer() {
            return Err(Error::Parse { pos: at, msg: "only t may carry a fractional exponent".into() });
        }
        base.powi(e.to_integer()).ok_or(Error::Parse { pos: at, msg: "invalid power".into() })
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v: i64 = i64::try_from(n).or_else(|_| self.err("exponent too large"))?;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected integer"),
        }
    }

    fn exponent(&mut self) -> Result<Exp> {
        if self.eat(&Tok::LParen) {
            let n = self.signed_int()?;
            let d = if self.eat(&Tok::Slash) { self.signed_int()? } else { 1 };
            if d == 0 {
                return self.err("zero denominator in exponent");
            }
            self.expect(&Tok::RParen)?;
            Ok(Exp::new(n, d))
        } else {
            Ok(Exp::from_integer(self.signed_int()?))
        }
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        let f = self.field;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let c = f.from_rational(&BigRational::from_integer(n)).expect("integers reduce");
                Ok(RationalFunction::constant(PuiseuxPoly::constant(f, c)))
            }
            Some(Tok::T) => {
                self.pos += 1;
                Ok(RationalFunction::constant(PuiseuxPoly::t_pow(f, Exp::one())))
            }
            Some(Tok::Z) => {
                self.pos += 1;
                Ok(RationalFunction { num: RPoly::z(f), den: RPoly::constant(PuiseuxPoly::one(f)) })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(v)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_all(text: &str, field: ResidueField) -> Result<RationalFunction> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), field };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses a rational function of `z` with coefficients in `R`, e.g. `(z^3 - (1+t)*z^2)/(-t)`.
pub fn parse_rational_function(text: &str, field: ResidueField) -> Result<RationalFunction> {
    parse_all(text, field)
}

/// Parses an element of `R`, e.g. `3/2*t^(1/2) + 1 - t^2`.
pub fn parse_puiseux(text: &str, field: ResidueField) -> Result<PuiseuxPoly> {
    let v = parse_all(text, field)?;
    let one = RPoly::constant(PuiseuxPoly::one(field));
    if v.num.degree().unwrap_or(0) > 0 || (v.den != one && !v.num.is_zero()) {
        return Err(Error::Parse { pos: 0, msg: "expected a Puiseux polynomial in t".into() });
    }
    let c = v.num.coeff(0);
    debug_assert!(!c.terms().any(|(_, a)| a.is_zero()));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_monomial_division() {
        let q = ResidueField::Rationals;
        let r = parse_rational_function("(z^3 - (1+t)*z^2)/(-t)", q).unwrap();
        assert_eq!(r.den, RPoly::constant(PuiseuxPoly::one(q)));
        assert_eq!(r.num.coeff(3), parse_puiseux("-t^-1", q).unwrap());
        assert_eq!(r.num.coeff(2), parse_puiseux("t^(-1) + 1", q).unwrap());
    }

    #[test]
    fn keeps_genuine_denominators() {
        let q = ResidueField::Rationals;
        let r = parse_rational_function("(2z^3 - z^2)/(z^2 + t z - t)", q).unwrap();
        assert_eq!(r.num.degree(), Some(3));
        assert_eq!(r.den.degree(), Some(2));
        let r = parse_rational_function("1/z", q).unwrap();
        assert_eq!(r.num.degree(), Some(0));
        assert_eq!(r.den, RPoly::z(q));
    }

    #[test]
    fn rational_constants_mod_p() {
        let f7 = ResidueField::Prime(7);
        let x = parse_puiseux("3/2", f7).unwrap();
        assert_eq!(x, PuiseuxPoly::from_int(f7, 5));
        assert!(parse_puiseux("1/7", f7).is_err());
    }

    #[test]
    fn reports_positions() {
        let q = ResidueField::Rationals;
        match parse_puiseux("1 + $", q) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_puiseux("z^(1/2)", q).is_err());
        assert!(parse_puiseux("(1 + t", q).is_err());
        assert!(parse_puiseux("z", q).is_err());
        assert!(parse_puiseux("0", q).unwrap().is_zero());
    }
}
