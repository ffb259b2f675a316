//! Binary forms over `R`, map representations, resultants and conjugation.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{
    Exp, PuiseuxPoly, RPoly, RationalFunction, ResidueElem, ResidueField, ResidueForm, Valuation, P1,
};

/// `F(X,Y) = Σ c_i X^i Y^(d-i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    field: ResidueField,
    c: Vec<PuiseuxPoly>,
}

impl BinaryForm {
    /// `c[i]` is the coefficient of `X^i Y^(d-i)`; the degree is `c.len() - 1`.
    pub fn new(field: ResidueField, c: Vec<PuiseuxPoly>) -> Self {
        assert!(!c.is_empty(), "a binary form has at least one coefficient");
        BinaryForm { field, c }
    }

    /// Coefficients `f_d, …, f_0`, highest power of `X` first.
    pub fn from_descending(field: ResidueField, mut c: Vec<PuiseuxPoly>) -> Self {
        c.reverse();
        Self::new(field, c)
    }

    pub fn zero(field: ResidueField, degree: usize) -> Self {
        Self::new(field, vec![PuiseuxPoly::zero(field); degree + 1])
    }

    pub fn x(field: ResidueField) -> Self {
        Self::new(field, vec![PuiseuxPoly::zero(field), PuiseuxPoly::one(field)])
    }

    pub fn y(field: ResidueField) -> Self {
        Self::new(field, vec![PuiseuxPoly::one(field), PuiseuxPoly::zero(field)])
    }

    /// Homogenizes `p(z)` to degree `d`.
    pub fn homogenize(p: &RPoly, d: usize) -> Result<Self> {
        if let Some(k) = p.degree() {
            if k > d {
                return Err(Error::DegreeMismatch(k, d));
            }
        }
        Ok(Self::new(p.field(), (0..=d).map(|i| p.coeff(i)).collect()))
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficient of `X^i Y^(d-i)`.
    pub fn coeff(&self, i: usize) -> &PuiseuxPoly {
        &self.c[i]
    }

    pub fn coeffs(&self) -> &[PuiseuxPoly] {
        &self.c
    }

    /// `f_d, …, f_0`.
    pub fn coeffs_descending(&self) -> Vec<PuiseuxPoly> {
        self.c.iter().rev().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    /// `F(z, 1)`.
    pub fn dehomogenize(&self) -> RPoly {
        RPoly::new(self.field, self.c.clone())
    }

    pub fn min_ord(&self) -> Valuation {
        self.c.iter().map(|a| a.ord()).min().unwrap()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree());
        Self::new(self.field, self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree());
        Self::new(self.field, self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.field, self.c.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![PuiseuxPoly::zero(self.field); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Self::new(self.field, out)
    }

    pub fn scale(&self, a: &PuiseuxPoly) -> Self {
        Self::new(self.field, self.c.iter().map(|x| x * a).collect())
    }

    pub fn monomial_shift(&self, q: Exp) -> Self {
        Self::new(self.field, self.c.iter().map(|x| x.monomial_shift(q)).collect())
    }

    pub fn times_x(&self) -> Self {
        let mut c = vec![PuiseuxPoly::zero(self.field)];
        c.extend(self.c.iter().cloned());
        Self::new(self.field, c)
    }

    pub fn times_y(&self) -> Self {
        let mut c = self.c.clone();
        c.push(PuiseuxPoly::zero(self.field));
        Self::new(self.field, c)
    }

    /// `F(Y, X)`.
    pub fn swap_variables(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self::new(self.field, c)
    }

    pub fn eval(&self, x: &PuiseuxPoly, y: &PuiseuxPoly) -> PuiseuxPoly {
        let d = self.degree();
        let mut acc = PuiseuxPoly::zero(self.field);
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                acc = &acc + &(&(a * &x.pow(i as u32)) * &y.pow((d - i) as u32));
            }
        }
        acc
    }

    /// `F(aX + bY, cX + dY)` for `M = [[a, b], [c, d]]`.
    pub fn compose(&self, m: &Mobius) -> Self {
        let f = self.field;
        let n = self.degree();
        let l1 = Self::new(f, vec![m.b.clone(), m.a.clone()]);
        let l2 = Self::new(f, vec![m.d.clone(), m.c.clone()]);
        let mut p1 = vec![Self::new(f, vec![PuiseuxPoly::one(f)])];
        let mut p2 = vec![Self::new(f, vec![PuiseuxPoly::one(f)])];
        for k in 0..n {
            p1.push(p1[k].mul(&l1));
            p2.push(p2[k].mul(&l2));
        }
        let mut acc = Self::zero(f, n);
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                acc = acc.add(&p1[i].mul(&p2[n - i]).scale(a));
            }
        }
        acc
    }

    /// Coefficient-wise residue. Requires all coefficients to have `ord ≥ 0`.
    pub fn reduce(&self) -> Result<ResidueForm> {
        let c = self.c.iter().map(|a| a.residue()).collect::<Result<Vec<_>>>()?;
        Ok(ResidueForm::new(self.field, c))
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut parts = Vec::new();
        for i in (0..=d).rev() {
            let a = &self.c[i];
            if a.is_zero() {
                continue;
            }
            let mut mono = String::new();
            match i {
                0 => {}
                1 => mono.push('X'),
                _ => mono.push_str(&format!("X^{i}")),
            }
            match d - i {
                0 => {}
                1 => mono.push('Y'),
                k => mono.push_str(&format!("Y^{k}")),
            }
            if mono.is_empty() {
                parts.push(format!("({a})"));
            } else {
                parts.push(format!("({a})*{mono}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `[[a, b], [c, d]]` acting by `z ↦ (az + b)/(cz + d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: PuiseuxPoly,
    pub b: PuiseuxPoly,
    pub c: PuiseuxPoly,
    pub d: PuiseuxPoly,
}

impl Mobius {
    pub fn new(a: PuiseuxPoly, b: PuiseuxPoly, c: PuiseuxPoly, d: PuiseuxPoly) -> Result<Self> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(m)
    }

    pub fn identity(field: ResidueField) -> Self {
        let (o, z) = (PuiseuxPoly::one(field), PuiseuxPoly::zero(field));
        Mobius { a: o.clone(), b: z.clone(), c: z, d: o }
    }

    /// `z ↦ 1/z`.
    pub fn swap(field: ResidueField) -> Self {
        let (o, z) = (PuiseuxPoly::one(field), PuiseuxPoly::zero(field));
        Mobius { a: z.clone(), b: o.clone(), c: o, d: z }
    }

    /// `z ↦ z + c`.
    pub fn translation(c: PuiseuxPoly) -> Self {
        let f = c.field();
        Mobius { a: PuiseuxPoly::one(f), b: c, c: PuiseuxPoly::zero(f), d: PuiseuxPoly::one(f) }
    }

    /// `z ↦ t^q z`.
    pub fn scaling(field: ResidueField, q: Exp) -> Self {
        Mobius {
            a: PuiseuxPoly::t_pow(field, q),
            b: PuiseuxPoly::zero(field),
            c: PuiseuxPoly::zero(field),
            d: PuiseuxPoly::one(field),
        }
    }

    pub fn field(&self) -> ResidueField {
        self.a.field()
    }

    pub fn det(&self) -> PuiseuxPoly {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn adjugate(&self) -> Self {
        Mobius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Matrix product `self · o` (apply `o` first).
    pub fn compose(&self, o: &Self) -> Self {
        Mobius {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }
}

fn sylvester(f: &BinaryForm, g: &BinaryForm) -> Vec<Vec<PuiseuxPoly>> {
    let d = f.degree();
    let n = 2 * d;
    let fd = f.coeffs_descending();
    let gd = g.coeffs_descending();
    let mut m = vec![vec![PuiseuxPoly::zero(f.field()); n]; n];
    for r in 0..d {
        for k in 0..=d {
            m[r][r + k] = fd[k].clone();
            m[d + r][r + k] = gd[k].clone();
        }
    }
    m
}

/// Determinant of the Sylvester matrix of two forms of equal degree `d`, rows built
/// from `f_d, …, f_0` and `g_d, …, g_0`.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> Result<PuiseuxPoly> {
    if f.degree() != g.degree() {
        return Err(Error::DegreeMismatch(f.degree(), g.degree()));
    }
    if f.degree() == 0 {
        return Ok(PuiseuxPoly::one(f.field()));
    }
    Ok(bareiss_det(sylvester(f, g), f.field()))
}

/// `ord Res(F, G)` without forming the resultant: elimination over the valuation ring
/// modulo `t^B`, pivoting on an entry of least order so that no precision is lost.
/// When the remaining block vanishes modulo `t^B` the bound is doubled; past a cap the
/// exact determinant decides whether the resultant is zero.
pub fn ord_resultant(f: &BinaryForm, g: &BinaryForm) -> Result<Valuation> {
    if f.degree() != g.degree() {
        return Err(Error::DegreeMismatch(f.degree(), g.degree()));
    }
    if f.degree() == 0 {
        return Ok(Valuation::Finite(Exp::zero()));
    }
    let mut m = sylvester(f, g);
    // Scaling a row by t^{-e} shifts ord det by −e.
    let mut base = Exp::zero();
    for row in m.iter_mut() {
        let Some(e) = row.iter().filter_map(|x| x.ord().finite()).min() else {
            return Ok(Valuation::Infinity);
        };
        base += e;
        for x in row.iter_mut() {
            *x = x.monomial_shift(-e);
        }
    }
    let mut bound = Exp::from_integer(8);
    while bound <= Exp::from_integer(64) {
        if let Some(v) = ord_det_mod(&m, bound) {
            return Ok(Valuation::Finite(base + v));
        }
        bound *= Exp::from_integer(2);
    }
    Ok(resultant(f, g)?.ord())
}

/// `ord det` of an integral matrix if it is below `bound`, else `None`.
fn ord_det_mod(m: &[Vec<PuiseuxPoly>], bound: Exp) -> Option<Exp> {
    let n = m.len();
    let mut m: Vec<Vec<PuiseuxPoly>> = m.iter().map(|r| r.iter().map(|x| x.truncate(bound)).collect()).collect();
    let mut total = Exp::zero();
    for k in 0..n {
        let (pi, pj, v) = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| m[i][j].ord().finite().map(|v| (i, j, v)))
            .min_by_key(|t| t.2)?;
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        let prec = bound - v;
        let inv = m[k][k].monomial_shift(-v).inv_trunc(prec)?;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let q = m[i][k].monomial_shift(-v).mul_trunc(&inv, prec);
            for j in k + 1..n {
                let sub = q.mul_trunc(&m[k][j], bound);
                m[i][j] = &m[i][j] - &sub;
            }
        }
        total += v;
    }
    Some(total)
}

/// Fraction-free elimination; every division is exact in `R`.
fn bareiss_det(mut m: Vec<Vec<PuiseuxPoly>>, field: ResidueField) -> PuiseuxPoly {
    let n = m.len();
    let mut sign = false;
    let mut prev = PuiseuxPoly::one(field);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return PuiseuxPoly::zero(field),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = PuiseuxPoly::zero(field);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// A pair `(F, G)` of degree-`d` forms with `Res(F, G) ≠ 0`, representing `φ(z) = F(z,1)/G(z,1)`.
///
/// `ord Res(F, G)` is computed once by elimination and then carried through conjugation
/// and scaling by the transformation laws `Res(F∘M, G∘M) = det(M)^(d²) Res(F, G)` and
/// `Res(A·(F, G)) = det(A)^d Res(F, G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapRep {
    f: BinaryForm,
    g: BinaryForm,
    ord_res: Exp,
}

/// Residue data of a normalized representation: `F̃ = Ã·F̃₀`, `G̃ = Ã·G̃₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedTriple {
    pub a: ResidueForm,
    pub f0: ResidueForm,
    pub g0: ResidueForm,
    pub deg_red: usize,
}

impl ReducedTriple {
    pub fn is_constant(&self) -> bool {
        self.deg_red == 0
    }

    /// Value of a constant reduction.
    pub fn constant_value(&self) -> Option<P1> {
        if !self.is_constant() {
            return None;
        }
        let field = self.f0.field();
        let (x, y) = (self.f0.coeff(0), self.g0.coeff(0));
        Some(if y.is_zero() { P1::Infinity } else { P1::Finite(field.div(x, y).unwrap()) })
    }

    /// `[[a, b], [c, d]]` with `F̃₀ = aX + bY`, `G̃₀ = cX + dY`, when `degRed = 1`.
    pub fn mobius(&self) -> Option<[ResidueElem; 4]> {
        (self.deg_red == 1).then(|| {
            [
                self.f0.coeff(1).clone(),
                self.f0.coeff(0).clone(),
                self.g0.coeff(1).clone(),
                self.g0.coeff(0).clone(),
            ]
        })
    }

    /// Whether the reduced map is the identity.
    pub fn is_identity(&self) -> bool {
        match self.mobius() {
            Some([a, b, c, d]) => b.is_zero() && c.is_zero() && a == d,
            None => false,
        }
    }

    /// Image of `a` under the reduced map `F̃₀/G̃₀`.
    pub fn apply(&self, a: &P1) -> P1 {
        let field = self.f0.field();
        let (x, y) = match a {
            P1::Infinity => (self.f0.eval(a), self.g0.eval(a)),
            P1::Finite(_) => (self.f0.eval(a), self.g0.eval(a)),
        };
        if y.is_zero() {
            P1::Infinity
        } else {
            P1::Finite(field.div(&x, &y).unwrap())
        }
    }
}

impl MapRep {
    pub fn new(f: BinaryForm, g: BinaryForm) -> Result<Self> {
        if f.degree() != g.degree() {
            return Err(Error::DegreeMismatch(f.degree(), g.degree()));
        }
        if f.degree() < 2 {
            return Err(Error::DegenerateMap(format!("degree {} < 2", f.degree())));
        }
        let ord_res = ord_resultant(&f, &g)?
            .finite()
            .ok_or_else(|| Error::DegenerateMap("Res(F, G) = 0: F and G share a factor".into()))?;
        Ok(MapRep { f, g, ord_res })
    }

    /// Builds the representation of `num(z)/den(z)`, normalized.
    pub fn from_rational_function(r: &RationalFunction) -> Result<Self> {
        let d = r.num.degree().unwrap_or(0).max(r.den.degree().unwrap_or(0));
        if r.den.is_zero() {
            return Err(Error::DegenerateMap("zero denominator".into()));
        }
        let f = BinaryForm::homogenize(&r.num, d)?;
        let g = BinaryForm::homogenize(&r.den, d)?;
        Ok(Self::new(f, g)?.normalize().0)
    }

    pub fn f(&self) -> &BinaryForm {
        &self.f
    }

    pub fn g(&self) -> &BinaryForm {
        &self.g
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn field(&self) -> ResidueField {
        self.f.field()
    }

    /// `ord Res(F, G)` of this particular pair.
    pub fn ord_res(&self) -> Exp {
        self.ord_res
    }

    pub fn min_ord(&self) -> Exp {
        self.f.min_ord().min(self.g.min_ord()).finite().expect("F and G are not both zero")
    }

    pub fn is_normalized(&self) -> bool {
        self.min_ord().is_zero()
    }

    /// Scales both forms by `t^(-m)` with `m` the least coefficient valuation; returns `m`.
    pub fn normalize(&self) -> (Self, Exp) {
        let m = self.min_ord();
        if m.is_zero() {
            return (self.clone(), m);
        }
        let d = Exp::from_integer(self.degree() as i64);
        let rep = MapRep {
            f: self.f.monomial_shift(-m),
            g: self.g.monomial_shift(-m),
            ord_res: self.ord_res - Exp::from_integer(2) * d * m,
        };
        (rep, m)
    }

    /// `adj(M)·(F∘M, G∘M)`, a representation of `M⁻¹∘φ∘M`.
    pub fn conjugate(&self, m: &Mobius) -> Result<Self> {
        let det = m.det();
        let od = det.ord().finite().ok_or(Error::SingularMatrix)?;
        let fm = self.f.compose(m);
        let gm = self.g.compose(m);
        let f = fm.scale(&m.d).sub(&gm.scale(&m.b));
        let g = gm.scale(&m.a).sub(&fm.scale(&m.c));
        let d = self.degree() as i64;
        Ok(MapRep { f, g, ord_res: self.ord_res + Exp::from_integer(d * d + d) * od })
    }

    /// Conjugates by `m` and normalizes.
    pub fn conjugate_normalized(&self, m: &Mobius) -> Result<Self> {
        Ok(self.conjugate(m)?.normalize().0)
    }

    /// Applies the linear map `A` to the pair: `(a·F + b·G, c·F + d·G)`.
    pub fn left_multiply(&self, a: &Mobius) -> Result<Self> {
        let od = a.det().ord().finite().ok_or(Error::SingularMatrix)?;
        let f = self.f.scale(&a.a).add(&self.g.scale(&a.b));
        let g = self.f.scale(&a.c).add(&self.g.scale(&a.d));
        Ok(MapRep { f, g, ord_res: self.ord_res + Exp::from_integer(self.degree() as i64) * od })
    }

    /// `H = X·G − Y·F`, whose roots are the classical fixed points.
    pub fn fixed_point_form(&self) -> BinaryForm {
        self.g.times_x().sub(&self.f.times_y())
    }

    /// Residue triple `(Ã, F̃₀, G̃₀)`; requires a normalized pair.
    pub fn reduce(&self) -> Result<ReducedTriple> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let ft = self.f.reduce()?;
        let gt = self.g.reduce()?;
        let mut a = ft.gcd(&gt)?;
        let mut f0 = ft.div_exact(&a).expect("gcd divides");
        let mut g0 = gt.div_exact(&a).expect("gcd divides");
        let deg_red = f0.degree();
        let field = self.field();
        // Fix the scalar so that an identity reduction reads F̃₀ = X, G̃₀ = Y.
        if deg_red == 1 {
            let s = if !f0.coeff(1).is_zero() { f0.coeff(1).clone() } else { g0.coeff(0).clone() };
            if !s.is_one() && !s.is_zero() {
                let inv = field.inv(&s).unwrap();
                f0 = f0.scale(&inv);
                g0 = g0.scale(&inv);
                a = a.scale(&s);
            }
        }
        Ok(ReducedTriple { a, f0, g0, deg_red })
    }

    /// `φ(z)` as numerator and denominator.
    pub fn as_rational_function(&self) -> RationalFunction {
        RationalFunction { num: self.f.dehomogenize(), den: self.g.dehomogenize() }
    }
}

impl fmt::Display for MapRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F = {}; G = {}", self.f, self.g)
    }
}
