//! `ordRes_φ` at type II points, its restriction to rays, directional slopes and the
//! candidate directions for descent.

use num_traits::Zero;
use serde::Serialize;

use crate::berktree::BerkPoint;
use crate::error::{Error, Result};
use crate::forms::{MapRep, Mobius};
use crate::ring::{fmt_exp, Exp, PuiseuxPoly, ResidueForm, Valuation, P1};

/// `ordRes_φ(P)`: conjugate by the chart of `P`, normalize, take `ord Res`.
pub fn ordres_at(phi: &MapRep, p: &BerkPoint) -> Result<Exp> {
    Ok(local_rep(phi, p)?.ord_res())
}

/// Normalized representation of `φ` in the chart of `P`.
pub fn local_rep(phi: &MapRep, p: &BerkPoint) -> Result<MapRep> {
    phi.conjugate_normalized(&p.chart())
}

/// A Möbius map sending the Gauss point to `P` and `v_0` to `v`.
pub fn ray_frame(p: &BerkPoint, v: &P1) -> Mobius {
    match v {
        P1::Finite(_) => frame_toward(p, &p.direction_center(v)),
        P1::Infinity => p.chart().compose(&Mobius::swap(p.field())),
    }
}

/// `[[t^r, x], [0, 1]]` for `P = ζ_{x, r}`: the ray from `P` toward the classical point `x`.
fn frame_toward(p: &BerkPoint, x: &PuiseuxPoly) -> Mobius {
    let f = p.field();
    Mobius {
        a: PuiseuxPoly::t_pow(f, p.depth()),
        b: x.clone(),
        c: PuiseuxPoly::zero(f),
        d: PuiseuxPoly::one(f),
    }
}

/// Exact convex piecewise-affine function on `q ∈ [0, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Paf {
    pub degree: usize,
    #[serde(serialize_with = "ser_exp")]
    pub base: Exp,
    #[serde(serialize_with = "ser_exps")]
    pub breakpoints: Vec<Exp>,
    pub slopes: Vec<i64>,
    #[serde(serialize_with = "ser_exps")]
    pub values: Vec<Exp>,
}

fn ser_exp<S: serde::Serializer>(e: &Exp, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_exp(e))
}

fn ser_exps<S: serde::Serializer>(e: &[Exp], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(e.iter().map(fmt_exp))
}

impl Paf {
    /// `base + (d²+d)q − 2d·min_k(c_k + s_k q)` for lines with `min_k c_k = 0`.
    fn from_lines(degree: usize, base: Exp, lines: &[(Exp, i64)]) -> Paf {
        let d = degree as i64;
        let top = d * d + d;
        let mut q = Exp::zero();
        let mut cur = *lines
            .iter()
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
            .expect("a nonzero pair has a coefficient");
        let mut breakpoints = Vec::new();
        let mut slopes = vec![top - 2 * d * cur.1];
        loop {
            // Next line to take over: smallest crossing point, then smallest slope.
            let mut best: Option<(Exp, (Exp, i64))> = None;
            for &l in lines.iter().filter(|l| l.1 < cur.1) {
                let x = (l.0 - cur.0) / Exp::from_integer(cur.1 - l.1);
                let x = x.max(q);
                let better = match best {
                    None => true,
                    Some((bx, bl)) => x < bx || (x == bx && l.1 < bl.1),
                };
                if better {
                    best = Some((x, l));
                }
            }
            match best {
                Some((x, l)) => {
                    if x > q || breakpoints.is_empty() && x > Exp::zero() {
                        breakpoints.push(x);
                        slopes.push(top - 2 * d * l.1);
                    } else {
                        *slopes.last_mut().unwrap() = top - 2 * d * l.1;
                    }
                    q = x;
                    cur = l;
                }
                None => break,
            }
        }
        let mut paf = Paf { degree, base, breakpoints, slopes, values: Vec::new() };
        paf.values = paf.breakpoints.iter().map(|&b| paf.eval(b)).collect();
        paf
    }

    pub fn eval(&self, q: Exp) -> Exp {
        let mut v = self.base;
        let mut at = Exp::zero();
        for (k, &m) in self.slopes.iter().enumerate() {
            let end = self.breakpoints.get(k).copied();
            match end {
                Some(e) if e < q => {
                    v += Exp::from_integer(m) * (e - at);
                    at = e;
                }
                _ => return v + Exp::from_integer(m) * (q - at),
            }
        }
        v
    }

    /// Right derivative at `q`.
    pub fn slope_after(&self, q: Exp) -> i64 {
        let k = self.breakpoints.iter().filter(|&&b| b <= q).count();
        self.slopes[k]
    }

    /// Least `q ≥ 0` from which the slope is nonnegative.
    pub fn first_nonnegative(&self) -> Exp {
        match self.slopes.iter().position(|&m| m >= 0) {
            Some(0) | None => Exp::zero(),
            Some(k) => self.breakpoints[k - 1],
        }
    }

    /// End of the piece starting at `q` (exclusive upper breakpoint), if any.
    pub fn piece_end(&self, q: Exp) -> Option<Exp> {
        self.breakpoints.iter().copied().find(|&b| b > q)
    }

    /// Slopes are increasing, `≡ d² + d (mod 2d)` and bounded by `d² + d`.
    pub fn check_invariants(&self) -> bool {
        let d = self.degree as i64;
        self.slopes.windows(2).all(|w| w[0] < w[1])
            && self.slopes.iter().all(|&m| (m - d * d - d).rem_euclid(2 * d) == 0 && m.abs() <= d * d + d)
    }
}

/// Lines `ord(a_i) + i·q`, `ord(b_j) + (j+1)·q` of a normalized pair.
fn envelope_lines(psi: &MapRep) -> Vec<(Exp, i64)> {
    let mut lines = Vec::new();
    for (i, a) in psi.f().coeffs().iter().enumerate() {
        if let Valuation::Finite(o) = a.ord() {
            lines.push((o, i as i64));
        }
    }
    for (j, b) in psi.g().coeffs().iter().enumerate() {
        if let Valuation::Finite(o) = b.ord() {
            lines.push((o, j as i64 + 1));
        }
    }
    lines
}

fn paf_in_frame(phi: &MapRep, frame: &Mobius) -> Result<Paf> {
    let psi = phi.conjugate_normalized(frame)?;
    Ok(Paf::from_lines(phi.degree(), psi.ord_res(), &envelope_lines(&psi)))
}

/// `ordRes_φ` along the ray from `P` in direction `v`, as a function of distance.
pub fn ordres_on_ray(phi: &MapRep, p: &BerkPoint, v: &P1) -> Result<Paf> {
    paf_in_frame(phi, &ray_frame(p, v))
}

/// `ordRes_φ` along the path from `P` down toward a classical point `x` in its disc.
pub fn ordres_toward(phi: &MapRep, p: &BerkPoint, x: &PuiseuxPoly) -> Result<Paf> {
    if !p.contains_center(x) {
        return Err(Error::Precondition("target outside the disc".into()));
    }
    paf_in_frame(phi, &frame_toward(p, x))
}

/// `d² + d − 2d·min(ℓ₁, ℓ₂ + 1)` in the ray frame.
pub fn slope(phi: &MapRep, p: &BerkPoint, v: &P1) -> Result<i64> {
    let psi = phi.conjugate_normalized(&ray_frame(p, v))?;
    Ok(raw_slope(&psi))
}

/// The coefficient slope formula of a normalized pair in direction `v_0`.
pub fn raw_slope(psi: &MapRep) -> i64 {
    let d = psi.degree() as i64;
    let sentinel = 2 * d + 3;
    let unit = |c: &PuiseuxPoly| c.ord() == Valuation::Finite(Exp::zero());
    let l1 = psi.f().coeffs().iter().position(unit).map_or(sentinel, |i| i as i64);
    let l2 = psi.g().coeffs().iter().position(unit).map_or(sentinel, |j| j as i64);
    d * d + d - 2 * d * l1.min(l2 + 1)
}

/// Directions at `P` that can carry slope below `d² − d`, together with every direction
/// holding a classical fixed point: `v_∞`, roots of `G̃` and roots of `H̃`. When `G̃ ≡ 0` the
/// point is moved and only directions holding fixed points can have small slope.
pub fn candidate_directions(phi: &MapRep, p: &BerkPoint) -> Result<Vec<P1>> {
    let psi = local_rep(phi, p)?;
    let gt = psi.g().reduce()?;
    let ht = reduced_fixed_form(&psi)?;
    let mut out = vec![P1::Infinity];
    let forms: Vec<&ResidueForm> = if gt.is_zero() { vec![&ht] } else { vec![&gt, &ht] };
    for form in forms {
        let rep = form.roots()?;
        if !rep.nonsplit.is_empty() {
            return Err(Error::ResidueExtensionRequired(rep.nonsplit));
        }
        out.extend(rep.roots.into_iter().map(|(a, _)| a));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Reduction of the fixed-point form `H` of a pair after scaling its least coefficient to a unit.
pub fn reduced_fixed_form(psi: &MapRep) -> Result<ResidueForm> {
    let h = psi.fixed_point_form();
    let m = h.min_ord().finite().expect("H is nonzero for d ≥ 2");
    h.monomial_shift(-m).reduce()
}

/// Whether all slopes at `P` are nonnegative, with the most negative direction otherwise.
pub fn steepest(phi: &MapRep, p: &BerkPoint) -> Result<Option<(P1, i64)>> {
    let mut best: Option<(P1, i64)> = None;
    for v in candidate_directions(phi, p)? {
        let s = slope(phi, p, &v)?;
        if s < 0 && best.as_ref().is_none_or(|b| s < b.1) {
            best = Some((v, s));
        }
    }
    Ok(best)
}
