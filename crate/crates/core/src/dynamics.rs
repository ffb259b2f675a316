//! Reduction of `φ` at a type II point and the local dynamical invariants derived from it:
//! classification, surplus and fixed-point multiplicities, tangent maps, weights,
//! persistence radii and multipliers of classical fixed points.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::berktree::BerkPoint;
use crate::error::{Error, Result};
use crate::forms::{BinaryForm, MapRep, Mobius, ReducedTriple};
use crate::ordres::{local_rep, reduced_fixed_form};
use crate::ring::{Exp, PuiseuxPoly, ResidueElem, ResidueForm, ResiduePoly, Valuation, P1};

/// Cap on the refinement steps used to locate the image of a moved point.
const IMAGE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedKind {
    IdIndifferent,
    /// Reduction conjugate to `z ↦ λ̃z`; the pair `{λ̃, λ̃⁻¹}` in canonical order.
    Multiplicative { multipliers: (ResidueElem, ResidueElem) },
    /// Reduction conjugate to `z ↦ z + ã`, read in the chart `p + 1/z` at the fixed point `p`.
    Additive { translation: ResidueElem },
    Repelling { degree: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    Moved { direction: P1 },
    Fixed(FixedKind),
}

impl ReductionKind {
    pub fn label(&self) -> String {
        match self {
            ReductionKind::Moved { direction } => format!("moved (image in direction {direction})"),
            ReductionKind::Fixed(FixedKind::IdIndifferent) => "id-indifferent".into(),
            ReductionKind::Fixed(FixedKind::Multiplicative { multipliers: (a, b) }) => {
                format!("multiplicatively indifferent (multipliers {{{a}, {b}}})")
            }
            ReductionKind::Fixed(FixedKind::Additive { translation }) => {
                format!("additively indifferent (translation {translation})")
            }
            ReductionKind::Fixed(FixedKind::Repelling { degree }) => format!("repelling of degree {degree}"),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ReductionKind::Fixed(_))
    }

    pub fn is_id_indifferent(&self) -> bool {
        matches!(self, ReductionKind::Fixed(FixedKind::IdIndifferent))
    }

    pub fn is_repelling(&self) -> bool {
        matches!(self, ReductionKind::Fixed(FixedKind::Repelling { .. }))
    }
}

impl Serialize for ReductionKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Where a moved point goes: `target` sends the Gauss point to `φ(P)` (in the chart of `P`),
/// and `image` is the normalized pair `adj(target)·ψ`, whose reduction is nonconstant.
#[derive(Clone, Debug)]
pub struct MovedImage {
    pub target: Mobius,
    pub image: MapRep,
    pub triple: ReducedTriple,
}

/// Everything computed at one point.
#[derive(Clone, Debug)]
pub struct Local {
    pub point: BerkPoint,
    pub degree: usize,
    /// Normalized pair in the chart of the point.
    pub psi: MapRep,
    pub triple: ReducedTriple,
    /// Reduction of the monomially normalized fixed-point form.
    pub h: ResidueForm,
    pub kind: ReductionKind,
    pub moved: Option<MovedImage>,
}

/// Reduction summary at a point.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionInfo {
    pub point: BerkPoint,
    pub fixed: bool,
    pub image_direction: Option<P1>,
    pub deg_red: usize,
    pub kind: ReductionKind,
}

/// Per-direction multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionalData {
    pub s: usize,
    pub m: Option<usize>,
    pub nf: usize,
    pub nfred: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WeightReport {
    pub point: BerkPoint,
    pub classification: ReductionKind,
    pub shearing: usize,
    pub v_count: usize,
    pub weight: usize,
}

fn proportional(a: &ResidueForm, b: &ResidueForm) -> Option<ResidueElem> {
    let f = a.field();
    let k = (0..=b.degree()).find(|&i| !b.coeff(i).is_zero())?;
    let lam = f.div(a.coeff(k), b.coeff(k))?;
    (0..=a.degree()).all(|i| *a.coeff(i) == f.mul(&lam, b.coeff(i))).then_some(lam)
}

fn neg_form(a: &ResidueForm) -> ResidueForm {
    a.scale(&a.field().from_int(-1))
}

/// `X·G̃₀ − Y·F̃₀`, the fixed-point form of the reduction.
pub fn reduced_h0(t: &ReducedTriple) -> ResidueForm {
    t.g0.times_x().add(&neg_form(&t.f0.times_y()))
}

fn split_roots(form: &ResidueForm) -> Result<Vec<(P1, usize)>> {
    let rep = form.roots()?;
    if !rep.nonsplit.is_empty() {
        return Err(Error::ResidueExtensionRequired(rep.nonsplit));
    }
    Ok(rep.roots)
}

/// Solves for the image of the Gauss point under a normalized pair with constant reduction `c`.
fn moved_image(psi: &MapRep, c: &P1) -> Result<MovedImage> {
    let field = psi.field();
    let (src, swap) = match c {
        P1::Finite(_) => (psi.clone(), false),
        P1::Infinity => (psi.left_multiply(&Mobius::swap(field))?, true),
    };
    let c0 = match c {
        P1::Finite(a) => a.clone(),
        P1::Infinity => field.zero(),
    };
    let g = src.g().clone();
    let gt = g.reduce()?;
    let mut beta = PuiseuxPoly::canonical_lift(field, &c0);
    for _ in 0..IMAGE_CAP {
        let f1 = src.f().sub(&g.scale(&beta));
        let m = f1.min_ord().finite().ok_or_else(|| Error::DegenerateMap("F and G proportional".into()))?;
        let ft = f1.monomial_shift(-m).reduce()?;
        match proportional(&ft, &gt) {
            Some(lam) => beta = &beta + &PuiseuxPoly::monomial(field, lam, m),
            None => {
                let chart = Mobius {
                    a: PuiseuxPoly::t_pow(field, m),
                    b: beta.clone(),
                    c: PuiseuxPoly::zero(field),
                    d: PuiseuxPoly::one(field),
                };
                let image = src.left_multiply(&chart.adjugate())?.normalize().0;
                let triple = image.reduce()?;
                let target = if swap { Mobius::swap(field).compose(&chart) } else { chart };
                return Ok(MovedImage { target, image, triple });
            }
        }
    }
    Err(Error::CapExceeded(IMAGE_CAP))
}

fn classify_mobius(t: &ReducedTriple) -> Result<FixedKind> {
    let field = t.f0.field();
    let [a, b, c, d] = t.mobius().expect("degree one reduction");
    if t.is_identity() {
        return Ok(FixedKind::IdIndifferent);
    }
    let tr = field.add(&a, &d);
    let det = field.sub(&field.mul(&a, &d), &field.mul(&b, &c));
    let disc = field.sub(&field.mul(&tr, &tr), &field.mul(&field.from_int(4), &det));
    if disc.is_zero() {
        // Parabolic: move the double fixed point to ∞ and read off the translation.
        let fixed = split_roots(&reduced_h0(t))?;
        let p = fixed[0].0.clone();
        let translation = match p {
            P1::Infinity => field.div(&b, &d).unwrap(),
            P1::Finite(p) => {
                // N = adj(τ)·M̃·τ with τ = [[p, 1], [1, 0]] is upper triangular.
                let (ta, tb, tc, td) = (p.clone(), field.one(), field.one(), field.zero());
                let m00 = field.add(&field.mul(&a, &ta), &field.mul(&b, &tc));
                let m01 = field.add(&field.mul(&a, &tb), &field.mul(&b, &td));
                let m10 = field.add(&field.mul(&c, &ta), &field.mul(&d, &tc));
                let m11 = field.add(&field.mul(&c, &tb), &field.mul(&d, &td));
                // adj(τ) = [[0, -1], [-1, p]]
                let n00 = field.neg(&m10);
                let n01 = field.neg(&m11);
                let n11 = field.add(&field.neg(&m01), &field.mul(&p, &m11));
                debug_assert!(field.add(&field.neg(&m00), &field.mul(&p, &m10)).is_zero());
                debug_assert_eq!(n00, n11);
                field.div(&n01, &n00).unwrap()
            }
        };
        return Ok(FixedKind::Additive { translation });
    }
    let charpoly = ResiduePoly::new(field, vec![det, field.neg(&tr), field.one()]);
    let rep = charpoly.roots()?;
    if !rep.nonsplit.is_empty() {
        return Err(Error::ResidueExtensionRequired(rep.nonsplit));
    }
    let ev: Vec<ResidueElem> = rep
        .roots
        .iter()
        .filter_map(|(r, _)| match r {
            P1::Finite(x) => Some(x.clone()),
            P1::Infinity => None,
        })
        .collect();
    let l = field.div(&ev[0], &ev[1]).unwrap();
    let li = field.inv(&l).unwrap();
    let pair = if l <= li { (l, li) } else { (li, l) };
    Ok(FixedKind::Multiplicative { multipliers: pair })
}

/// Builds the local analysis of `φ` at `P`.
pub fn analyze(phi: &MapRep, p: &BerkPoint) -> Result<Local> {
    let psi = local_rep(phi, p)?;
    let triple = psi.reduce()?;
    let h = reduced_fixed_form(&psi)?;
    let (kind, moved) = if triple.is_constant() {
        let c = triple.constant_value().unwrap();
        let img = moved_image(&psi, &c)?;
        (ReductionKind::Moved { direction: c }, Some(img))
    } else if triple.deg_red >= 2 {
        (ReductionKind::Fixed(FixedKind::Repelling { degree: triple.deg_red }), None)
    } else {
        (ReductionKind::Fixed(classify_mobius(&triple)?), None)
    };
    Ok(Local { point: p.clone(), degree: phi.degree(), psi, triple, h, kind, moved })
}

pub fn reduction_at(phi: &MapRep, p: &BerkPoint) -> Result<ReductionInfo> {
    let l = analyze(phi, p)?;
    Ok(l.info())
}

/// Multiplicity of `a` as a point where the reduced map `F̃₀/G̃₀` takes the value `b`.
fn local_degree(t: &ReducedTriple, a: &P1) -> usize {
    let field = t.f0.field();
    let (x, y) = match t.apply(a) {
        P1::Infinity => (field.one(), field.zero()),
        P1::Finite(v) => (v, field.one()),
    };
    // y·F̃₀ − x·G̃₀ vanishes exactly on the fibre over (x : y).
    let form = t.f0.scale(&y).add(&neg_form(&t.g0.scale(&x)));
    form.multiplicity(a)
}

impl Local {
    pub fn info(&self) -> ReductionInfo {
        ReductionInfo {
            point: self.point.clone(),
            fixed: self.kind.is_fixed(),
            image_direction: match &self.kind {
                ReductionKind::Moved { direction } => Some(direction.clone()),
                _ => None,
            },
            deg_red: self.local_degree(),
            kind: self.kind.clone(),
        }
    }

    /// `deg_φ(P)`: the degree of the reduction, or of the reduction onto the image at a moved point.
    pub fn local_degree(&self) -> usize {
        match &self.moved {
            Some(m) => m.triple.deg_red,
            None => self.triple.deg_red,
        }
    }

    /// The reduced triple that carries the surplus.
    fn surplus_triple(&self) -> &ReducedTriple {
        match &self.moved {
            Some(m) => &m.triple,
            None => &self.triple,
        }
    }

    /// `s_φ(P, v)`.
    pub fn surplus(&self, v: &P1) -> usize {
        self.surplus_triple().a.multiplicity(v)
    }

    /// `#F_φ(P, v)`.
    pub fn fixed_count(&self, v: &P1) -> usize {
        self.h.multiplicity(v)
    }

    /// `#F̃_φ(P, v)`; undefined at id-indifferent or moved points.
    pub fn reduced_fixed_count(&self, v: &P1) -> Result<usize> {
        match &self.kind {
            ReductionKind::Fixed(FixedKind::IdIndifferent) => Err(Error::IdIndifferentUndefined),
            ReductionKind::Moved { .. } => Err(Error::NotFixed),
            _ => Ok(reduced_h0(&self.triple).multiplicity(v)),
        }
    }

    /// `m_φ(P, v)`, from the reduction onto `φ(P)`.
    pub fn directional_multiplicity(&self, v: &P1) -> Result<usize> {
        if self.kind.is_id_indifferent() {
            return Err(Error::IdIndifferentUndefined);
        }
        Ok(local_degree(self.surplus_triple(), v))
    }

    pub fn multiplicities(&self, v: &P1) -> DirectionalData {
        DirectionalData {
            s: self.surplus(v),
            m: self.directional_multiplicity(v).ok(),
            nf: self.fixed_count(v),
            nfred: self.reduced_fixed_count(v).ok(),
        }
    }

    /// `φ_*(v)` at a fixed point, in the chart of `P`.
    pub fn tangent_image(&self, v: &P1) -> Result<P1> {
        if !self.kind.is_fixed() {
            return Err(Error::NotFixed);
        }
        Ok(self.triple.apply(v))
    }

    /// `φ_*(v)` at a moved point, as a direction at `φ(P)` in the chart of `target`.
    pub fn tangent_image_moved(&self, v: &P1) -> Result<P1> {
        let m = self.moved.as_ref().ok_or(Error::Precondition("point is fixed".into()))?;
        Ok(m.triple.apply(v))
    }

    /// Directions holding classical fixed points.
    pub fn fixed_directions(&self) -> Result<Vec<(P1, usize)>> {
        split_roots(&self.h)
    }

    /// Weight: `deg − 1 + N_shearing` at fixed points, `max(0, v − 2)` at moved points.
    pub fn weight(&self) -> Result<WeightReport> {
        let dirs = self.fixed_directions()?;
        let v_count = dirs.len();
        let (shearing, weight) = if self.kind.is_fixed() {
            let sh = dirs.iter().filter(|(a, _)| self.triple.apply(a) != *a).count();
            (sh, self.triple.deg_red - 1 + sh)
        } else {
            (0, v_count.saturating_sub(2))
        };
        Ok(WeightReport { point: self.point.clone(), classification: self.kind.clone(), shearing, v_count, weight })
    }

    /// Slope of `ordRes_φ` in direction `v` from the dynamical formulas.
    pub fn dynamical_slope(&self, v: &P1) -> Result<i64> {
        let d = self.degree as i64;
        Ok(match &self.kind {
            ReductionKind::Moved { .. } => d * d + d - 2 * d * self.fixed_count(v) as i64,
            ReductionKind::Fixed(FixedKind::IdIndifferent) => d * d - d - 2 * d * self.surplus(v) as i64,
            ReductionKind::Fixed(_) => {
                let shear = i64::from(self.tangent_image(v)? != *v);
                d * d - d - 2 * d * self.surplus(v) as i64 + 2 * d * shear
            }
        })
    }
}

pub fn surplus(phi: &MapRep, p: &BerkPoint, v: &P1) -> Result<usize> {
    Ok(analyze(phi, p)?.surplus(v))
}

pub fn multiplicities(phi: &MapRep, p: &BerkPoint, v: &P1) -> Result<DirectionalData> {
    Ok(analyze(phi, p)?.multiplicities(v))
}

pub fn weight(phi: &MapRep, p: &BerkPoint) -> Result<WeightReport> {
    analyze(phi, p)?.weight()
}

/// `η/(d+1)` with `η = min(ord(F − Â·X), ord(G − Â·Y))`; `None` when `η = +∞`.
pub fn persistence_radius(phi: &MapRep, p: &BerkPoint) -> Result<Option<Exp>> {
    let l = analyze(phi, p)?;
    if !l.kind.is_id_indifferent() {
        return Err(Error::NotIdIndifferent);
    }
    let field = phi.field();
    let lift = BinaryForm::new(
        field,
        l.triple.a.coeffs().iter().map(|c| PuiseuxPoly::canonical_lift(field, c)).collect(),
    );
    let df = l.psi.f().sub(&lift.times_x());
    let dg = l.psi.g().sub(&lift.times_y());
    let eta = df.min_ord().min(dg.min_ord());
    Ok(match eta {
        Valuation::Finite(e) => Some(e / Exp::from_integer(phi.degree() as i64 + 1)),
        Valuation::Infinity => None,
    })
}

/// Derivative of the reduction at its fixed point `a`.
pub fn reduced_multiplier(phi: &MapRep, p: &BerkPoint, v: &P1) -> Result<ResidueElem> {
    let l = analyze(phi, p)?;
    if !l.kind.is_fixed() {
        return Err(Error::NotFixed);
    }
    if l.kind.is_id_indifferent() {
        return Err(Error::IdIndifferentUndefined);
    }
    if l.triple.apply(v) != *v {
        return Err(Error::Precondition("direction is not fixed by the tangent map".into()));
    }
    let (f0, g0, a) = match v {
        P1::Finite(a) => (l.triple.f0.clone(), l.triple.g0.clone(), a.clone()),
        // 1/φ̃(1/w) at w = 0.
        P1::Infinity => (l.triple.g0.swap_variables(), l.triple.f0.swap_variables(), phi.field().zero()),
    };
    Ok(derivative_at(&f0.dehomogenize(), &g0.dehomogenize(), &a))
}

fn derivative_at(f: &ResiduePoly, g: &ResiduePoly, a: &ResidueElem) -> ResidueElem {
    let field = f.field();
    let num = field.sub(
        &field.mul(&f.derivative().eval(a), &g.eval(a)),
        &field.mul(&f.eval(a), &g.derivative().eval(a)),
    );
    let den = field.mul(&g.eval(a), &g.eval(a));
    field.div(&num, &den).expect("fixed point is not a pole")
}

/// Classification of a classical fixed point by its multiplier `λ = φ′(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeIKind {
    Superattracting,
    Attracting,
    Repelling,
    IdIndifferent,
    /// Indifferent with reduced multiplier `λ̃ ≠ 1`.
    RotIndifferent(ResidueElem),
}

impl TypeIKind {
    pub fn label(&self) -> String {
        match self {
            TypeIKind::Superattracting => "superattracting".into(),
            TypeIKind::Attracting => "attracting".into(),
            TypeIKind::Repelling => "repelling".into(),
            TypeIKind::IdIndifferent => "id-indifferent".into(),
            TypeIKind::RotIndifferent(l) => format!("rot-indifferent (reduced multiplier {l})"),
        }
    }
}

/// Classifies the classical fixed point `α` (`None` for `∞`).
pub fn classify_type_i(phi: &MapRep, alpha: Option<&PuiseuxPoly>) -> Result<TypeIKind> {
    let field = phi.field();
    let (rep, a) = match alpha {
        Some(a) => (phi.clone(), a.clone()),
        None => (phi.conjugate(&Mobius::swap(field))?, PuiseuxPoly::zero(field)),
    };
    let one = PuiseuxPoly::one(field);
    if !rep.fixed_point_form().eval(&a, &one).is_zero() {
        return Err(Error::NotFixed);
    }
    let f = rep.f().dehomogenize();
    let g = rep.g().dehomogenize();
    let num = &(&f.derivative().eval(&a) * &g.eval(&a)) - &(&f.eval(&a) * &g.derivative().eval(&a));
    let ga = g.eval(&a);
    let Some((eg, cg)) = ga.initial() else {
        return Err(Error::Precondition("fixed point is a pole".into()));
    };
    let Some((en, cn)) = num.initial() else {
        return Ok(TypeIKind::Superattracting);
    };
    let ord = en - eg * Exp::from_integer(2);
    Ok(if ord > Exp::zero() {
        TypeIKind::Attracting
    } else if ord < Exp::zero() {
        TypeIKind::Repelling
    } else {
        let r = field.div(cn, &field.mul(cg, cg)).unwrap();
        if r.is_one() {
            TypeIKind::IdIndifferent
        } else {
            TypeIKind::RotIndifferent(r)
        }
    })
}

/// `1/x` to precision: `y` with `ord(y − 1/x) ≥ prec`.
pub fn inverse_to_precision(x: &PuiseuxPoly, prec: Exp) -> Result<PuiseuxPoly> {
    let field = x.field();
    let (o, c) = x.initial().ok_or(Error::ZeroPolynomial)?;
    let cinv = field.inv(c).ok_or(Error::ZeroPolynomial)?;
    let lead_inv = PuiseuxPoly::monomial(field, cinv.clone(), -o);
    // x = c t^o (1 + u), ord(u) > 0
    let u = &x.monomial_shift(-o).scale(&cinv) - &PuiseuxPoly::one(field);
    let mut sum = PuiseuxPoly::one(field);
    if let Valuation::Finite(du) = u.ord() {
        let need = prec + o;
        let mut term = PuiseuxPoly::one(field);
        let mut k = 0i64;
        while du * Exp::from_integer(k + 1) < need {
            term = (&term * &(-&u)).truncate(need);
            sum = &sum + &term;
            k += 1;
        }
        sum = sum.truncate(need);
    }
    Ok(&lead_inv * &sum)
}

/// `φ(P)` as a point, for a moved point.
pub fn image_point(phi: &MapRep, p: &BerkPoint) -> Result<BerkPoint> {
    let l = analyze(phi, p)?;
    let Some(m) = &l.moved else {
        return Ok(p.clone());
    };
    let field = phi.field();
    let t = &m.target;
    // Image in the chart of P: target(ζ_G).
    let local = if t.c.is_zero() {
        BerkPoint::new(t.b.clone(), t.a.ord().finite().unwrap())
    } else {
        // swap ∘ chart(β, e): the disc D(β, e) under w ↦ 1/w.
        let beta = &t.d;
        let e = t.c.ord().finite().unwrap();
        match beta.ord() {
            Valuation::Finite(o) if o < e => {
                let depth = e - o * Exp::from_integer(2);
                BerkPoint::new(inverse_to_precision(beta, depth)?, depth)
            }
            _ => BerkPoint::new(PuiseuxPoly::zero(field), -e),
        }
    };
    Ok(BerkPoint::new(
        &p.center().clone() + &local.center().monomial_shift(p.depth()),
        local.depth() + p.depth(),
    ))
}
