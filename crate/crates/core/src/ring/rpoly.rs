use std::fmt;

use super::{Exp, PuiseuxPoly, ResidueField, ResiduePoly, Valuation};

/// Univariate polynomial `Σ c_i z^i` with coefficients in `R`, stored from degree 0 upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPoly {
    field: ResidueField,
    c: Vec<PuiseuxPoly>,
}

impl RPoly {
    pub fn new(field: ResidueField, c: Vec<PuiseuxPoly>) -> Self {
        let mut p = RPoly { field, c };
        while matches!(p.c.last(), Some(x) if x.is_zero()) {
            p.c.pop();
        }
        p
    }

    pub fn zero(field: ResidueField) -> Self {
        RPoly { field, c: vec![] }
    }

    pub fn constant(c: PuiseuxPoly) -> Self {
        let f = c.field();
        Self::new(f, vec![c])
    }

    /// `z`.
    pub fn z(field: ResidueField) -> Self {
        Self::new(field, vec![PuiseuxPoly::zero(field), PuiseuxPoly::one(field)])
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn coeffs(&self) -> &[PuiseuxPoly] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> PuiseuxPoly {
        self.c.get(i).cloned().unwrap_or_else(|| PuiseuxPoly::zero(self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> PuiseuxPoly {
        self.c.last().cloned().unwrap_or_else(|| PuiseuxPoly::zero(self.field))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.field, (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.field, (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.field, self.c.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        let mut out = vec![PuiseuxPoly::zero(self.field); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(self.field, out)
    }

    pub fn scale(&self, a: &PuiseuxPoly) -> Self {
        Self::new(self.field, self.c.iter().map(|x| x * a).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![PuiseuxPoly::zero(self.field); k];
        c.extend(self.c.iter().cloned());
        Self::new(self.field, c)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(PuiseuxPoly::one(self.field));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &PuiseuxPoly) -> PuiseuxPoly {
        self.c
            .iter()
            .rev()
            .fold(PuiseuxPoly::zero(self.field), |acc, a| &(&acc * x) + a)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.field,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.scale(&self.field.from_int(i as i64)))
                .collect(),
        )
    }

    /// `p(c + w)` as a polynomial in `w`.
    pub fn taylor_shift(&self, c: &PuiseuxPoly) -> Self {
        let lin = Self::new(self.field, vec![c.clone(), PuiseuxPoly::one(self.field)]);
        let mut acc = Self::zero(self.field);
        for a in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(a.clone()));
        }
        acc
    }

    /// Smallest coefficient valuation.
    pub fn min_ord(&self) -> Valuation {
        self.c.iter().map(|a| a.ord()).min().unwrap_or(Valuation::Infinity)
    }

    /// Divides every coefficient by `t^m`, `m` the smallest coefficient valuation.
    pub fn monomial_normalize(&self) -> Self {
        match self.min_ord() {
            Valuation::Finite(m) => Self::new(self.field, self.c.iter().map(|a| a.monomial_shift(-m)).collect()),
            Valuation::Infinity => self.clone(),
        }
    }

    /// Pseudo-division: `lc(d)^(deg self - deg d + 1) · self = q·d + r`.
    pub fn pseudo_divide(&self, d: &Self) -> (Self, Self) {
        let dn = d.degree().expect("pseudo-division by zero");
        let lcd = d.lc();
        let mut r = self.clone();
        let mut q = Self::zero(self.field);
        let m = match self.degree() {
            Some(m) if m >= dn => m,
            _ => return (q, r),
        };
        for k in (0..=m - dn).rev() {
            q = q.scale(&lcd);
            if r.degree() == Some(dn + k) {
                let lr = r.lc();
                r = r.scale(&lcd).sub(&d.shift(k).scale(&lr));
                q = q.add(&Self::constant(lr).shift(k));
            } else {
                r = r.scale(&lcd);
            }
        }
        (q, r)
    }

    fn div_coeffs_exact(&self, a: &PuiseuxPoly) -> Self {
        Self::new(
            self.field,
            self.c
                .iter()
                .map(|x| x.div_exact(a).expect("inexact coefficient division in subresultant sequence"))
                .collect(),
        )
    }

    /// A gcd over the fraction field of `R`, up to a nonzero factor in `R`, via the
    /// subresultant remainder sequence.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = if self.degree() >= o.degree() {
            (self.clone(), o.clone())
        } else {
            (o.clone(), self.clone())
        };
        if b.is_zero() {
            return a.monomial_normalize();
        }
        let one = PuiseuxPoly::one(self.field);
        let mut g = one.clone();
        let mut h = one.clone();
        loop {
            let delta = (a.degree().unwrap() - b.degree().unwrap()) as u32;
            let (_, r) = a.pseudo_divide(&b);
            if r.is_zero() {
                return b.monomial_normalize();
            }
            if r.degree() == Some(0) {
                return Self::constant(one);
            }
            let divisor = &g * &h.pow(delta);
            a = b;
            b = r.div_coeffs_exact(&divisor);
            g = a.lc();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta)
                    .div_exact(&h.pow(delta - 1))
                    .expect("inexact subresultant scaling")
            };
        }
    }

    /// A polynomial with the same roots as `self`, each of multiplicity one.
    pub fn squarefree_part(&self) -> Self {
        let d = self.derivative();
        if d.is_zero() {
            return self.monomial_normalize();
        }
        let g = self.gcd(&d);
        if g.degree() == Some(0) {
            return self.monomial_normalize();
        }
        let (q, r) = self.pseudo_divide(&g);
        debug_assert!(r.is_zero());
        q.monomial_normalize()
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::new(self)
    }

    /// Residue polynomial attached to the Newton polygon at root valuation `s`:
    /// `Σ lc(c_i) x^(i - i0)` over indices on the supporting line of slope `-s`.
    pub fn edge_polynomial(&self, s: Exp) -> ResiduePoly {
        let vals: Vec<(usize, Exp)> = self
            .c
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.ord().finite().map(|v| (i, v + s * Exp::from_integer(i as i64))))
            .collect();
        let m = vals.iter().map(|(_, v)| *v).min().expect("edge polynomial of zero polynomial");
        let on: Vec<usize> = vals.iter().filter(|(_, v)| *v == m).map(|(i, _)| *i).collect();
        let i0 = on[0];
        let i1 = *on.last().unwrap();
        let mut coeffs = vec![self.field.zero(); i1 - i0 + 1];
        for i in on {
            coeffs[i - i0] = self.c[i].initial().unwrap().1.clone();
        }
        ResiduePoly::new(self.field, coeffs)
    }
}

impl fmt::Display for RPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| match i {
                0 => format!("({a})"),
                1 => format!("({a})*z"),
                _ => format!("({a})*z^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Lower convex hull of `(i, ord c_i)`; segments give root valuations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Multiplicity of the root `0`.
    pub zero_roots: usize,
    /// `(valuation, count)` from the largest valuation to the smallest.
    pub slopes: Vec<(Exp, usize)>,
}

impl NewtonPolygon {
    fn new(p: &RPoly) -> Self {
        let pts: Vec<(i64, Exp)> = p
            .c
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.ord().finite().map(|v| (i as i64, v)))
            .collect();
        let zero_roots = pts.first().map(|(i, _)| *i as usize).unwrap_or(0);
        let mut hull: Vec<(i64, Exp)> = Vec::new();
        for pt in pts {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // Drop the middle point unless it lies strictly below the chord.
                let lhs = (y2 - y1) * Exp::from_integer(pt.0 - x1);
                let rhs = (pt.1 - y1) * Exp::from_integer(x2 - x1);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let slopes = hull
            .windows(2)
            .map(|w| {
                let len = w[1].0 - w[0].0;
                ((w[0].1 - w[1].1) / Exp::from_integer(len), len as usize)
            })
            .collect();
        NewtonPolygon { zero_roots, slopes }
    }

    /// Number of roots (with multiplicity) of valuation strictly greater than `r`;
    /// `None` stands for `-∞`.
    pub fn count_above(&self, r: Option<Exp>) -> usize {
        self.zero_roots
            + self
                .slopes
                .iter()
                .filter(|(s, _)| r.is_none_or(|r| *s > r))
                .map(|(_, n)| n)
                .sum::<usize>()
    }

    /// Smallest finite root valuation strictly greater than `r`, if any.
    pub fn min_valuation_above(&self, r: Option<Exp>) -> Option<Exp> {
        self.slopes
            .iter()
            .map(|(s, _)| *s)
            .filter(|s| r.is_none_or(|r| *s > r))
            .min()
    }

    pub fn total_roots(&self) -> usize {
        self.count_above(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_puiseux;
    use num_traits::{One, Zero};

    fn q() -> ResidueField {
        ResidueField::Rationals
    }

    fn poly(cs: &[&str]) -> RPoly {
        RPoly::new(q(), cs.iter().map(|s| parse_puiseux(s, q()).unwrap()).collect())
    }

    #[test]
    fn newton_polygon_of_z2_minus_t() {
        let p = poly(&["-t", "0", "1"]);
        let np = p.newton_polygon();
        assert_eq!(np.zero_roots, 0);
        assert_eq!(np.slopes, vec![(Exp::new(1, 2), 2)]);
        let e = p.edge_polynomial(Exp::new(1, 2));
        let rep = e.roots().unwrap();
        assert_eq!(rep.roots.len(), 2);
    }

    #[test]
    fn newton_polygon_mixed_valuations() {
        // (z - t)(z - 1)(z - t^-1) z
        let f = poly(&["0", "1"])
            .mul(&poly(&["-t", "1"]))
            .mul(&poly(&["-1", "1"]))
            .mul(&poly(&["-t^(-1)", "1"]));
        let np = f.newton_polygon();
        assert_eq!(np.zero_roots, 1);
        assert_eq!(np.count_above(None), 4);
        assert_eq!(np.count_above(Some(Exp::zero())), 2);
        assert_eq!(np.count_above(Some(Exp::from_integer(-1))), 3);
        assert_eq!(np.min_valuation_above(Some(Exp::zero())), Some(Exp::one()));
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let f = poly(&["1", "t", "-2", "t^(1/2)"]);
        let c = parse_puiseux("1 + t", q()).unwrap();
        let g = f.taylor_shift(&c);
        let w = parse_puiseux("3*t^2 - 1", q()).unwrap();
        assert_eq!(g.eval(&w), f.eval(&(&c + &w)));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = poly(&["-t", "1"]);
        let b = poly(&["1", "0", "1"]);
        let c = poly(&["t^2", "1"]);
        let f = a.mul(&a).mul(&b);
        let g = a.mul(&c);
        let d = f.gcd(&g);
        assert_eq!(d.degree(), Some(1));
        assert!(d.eval(&parse_puiseux("t", q()).unwrap()).is_zero());
        let sf = f.squarefree_part();
        assert_eq!(sf.degree(), Some(3));
    }

    #[test]
    fn pseudo_division_identity() {
        let a = poly(&["1", "t", "2", "t^(1/3)"]);
        let b = poly(&["t", "1 + t"]);
        let (qq, r) = a.pseudo_divide(&b);
        let k = 3;
        let lhs = a.scale(&b.lc().pow(k));
        assert_eq!(lhs, qq.mul(&b).add(&r));
    }
}
