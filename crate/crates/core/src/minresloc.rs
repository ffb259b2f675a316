//! The minimal resultant locus, found three ways: convex descent on `ordRes_φ`, the
//! barycenter of the crucial measure, and GIT semistability of the local reduction.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::berktree::{direction_of, path_dist, point_on_path, BerkPoint, FiniteTree};
use crate::crucial::{crucial_set_on, crucial_tree, support_tree, CrucialMeasure};
use crate::dynamics::{analyze, FixedKind, ReductionKind};
use crate::error::{Error, Result};
use crate::forms::MapRep;
use crate::ordres::{candidate_directions, local_rep, ordres_at, ordres_on_ray, slope, steepest};
use crate::ring::{fmt_exp, Exp, ResidueElem, ResidueField, ResidueForm, P1};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Point(BerkPoint),
    /// Endpoints in decreasing point order (deeper first).
    Segment(BerkPoint, BerkPoint),
}

impl Shape {
    pub fn segment(a: BerkPoint, b: BerkPoint) -> Shape {
        match a.cmp(&b) {
            Ordering::Equal => Shape::Point(a),
            Ordering::Greater => Shape::Segment(a, b),
            Ordering::Less => Shape::Segment(b, a),
        }
    }

    pub fn endpoints(&self) -> Vec<BerkPoint> {
        match self {
            Shape::Point(p) => vec![p.clone()],
            Shape::Segment(a, b) => vec![a.clone(), b.clone()],
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Shape::Point(_))
    }

    /// Midpoint of a segment, or the point itself.
    pub fn midpoint(&self) -> BerkPoint {
        match self {
            Shape::Point(p) => p.clone(),
            Shape::Segment(a, b) => point_on_path(a, b, path_dist(a, b) / Exp::from_integer(2)),
        }
    }

    /// Whether `p` lies on the shape.
    pub fn contains(&self, p: &BerkPoint) -> bool {
        match self {
            Shape::Point(q) => p == q,
            Shape::Segment(a, b) => path_dist(a, p) + path_dist(p, b) == path_dist(a, b),
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Point(p) => write!(f, "point {p}"),
            Shape::Segment(a, b) => write!(f, "segment [{a}, {b}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificates {
    pub descent_ok: bool,
    pub barycenter_ok: bool,
    pub balance_ok: bool,
    pub semistable_ok: bool,
}

#[derive(Clone, Debug)]
pub struct MinResResult {
    pub shape: Shape,
    pub min_value: Exp,
    pub certificates: Certificates,
    pub crucial_measure: Option<CrucialMeasure>,
}

impl Serialize for MinResResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MinResResult", 5)?;
        st.serialize_field("shape", if self.shape.is_point() { "point" } else { "segment" })?;
        st.serialize_field("endpoints", &self.shape.endpoints())?;
        st.serialize_field("minValue", &fmt_exp(&self.min_value))?;
        st.serialize_field("certificates", &self.certificates)?;
        st.serialize_field("crucialMeasure", &self.crucial_measure)?;
        st.end()
    }
}

fn zero_directions(phi: &MapRep, p: &BerkPoint, skip: Option<&P1>) -> Result<Vec<P1>> {
    let mut out = Vec::new();
    for v in candidate_directions(phi, p)? {
        if Some(&v) != skip && slope(phi, p, &v)? == 0 {
            out.push(v);
        }
    }
    Ok(out)
}

/// Follows the flat part of `ordRes_φ` from `start` in direction `v` to its far end.
fn extend_flat(phi: &MapRep, start: &BerkPoint, v: &P1, cap: usize) -> Result<BerkPoint> {
    let (mut p, mut v) = (start.clone(), v.clone());
    for _ in 0..cap {
        let paf = ordres_on_ray(phi, &p, &v)?;
        let end = paf
            .piece_end(Exp::zero())
            .ok_or_else(|| Error::CrossCheckFailure("flat ray never turns upward".into()))?;
        let q = p.point_along(&v, end);
        let back = direction_of(&q, &p)?;
        let next = zero_directions(phi, &q, Some(&back))?;
        match next.len() {
            0 => return Ok(q),
            1 => {
                p = q;
                v = next[0].clone();
            }
            _ => return Err(Error::CrossCheckFailure(format!("minimum locus branches at {q}"))),
        }
    }
    Err(Error::CapExceeded(cap))
}

fn descent_cap(phi: &MapRep, tree: &FiniteTree) -> usize {
    16 * phi.degree() * (tree.edges.len() + tree.leaves.len()).max(1)
}

fn descend(phi: &MapRep, cap: usize) -> Result<(Shape, Exp)> {
    let mut p = BerkPoint::gauss(phi.field());
    for _ in 0..cap {
        match steepest(phi, &p)? {
            None => {
                let zero = zero_directions(phi, &p, None)?;
                let shape = match zero.len() {
                    0 => Shape::Point(p.clone()),
                    1 => Shape::segment(p.clone(), extend_flat(phi, &p, &zero[0], cap)?),
                    2 => Shape::segment(extend_flat(phi, &p, &zero[0], cap)?, extend_flat(phi, &p, &zero[1], cap)?),
                    _ => return Err(Error::CrossCheckFailure(format!("minimum locus branches at {p}"))),
                };
                return Ok((shape, ordres_at(phi, &p)?));
            }
            Some((v, _)) => {
                let q = ordres_on_ray(phi, &p, &v)?.first_nonnegative();
                p = p.point_along(&v, q);
            }
        }
    }
    Err(Error::CapExceeded(cap))
}

/// Convex descent from the Gauss point.
pub fn min_by_descent(phi: &MapRep) -> Result<MinResResult> {
    let tree = support_tree(phi)?;
    let (shape, min_value) = descend(phi, descent_cap(phi, &tree))?;
    Ok(MinResResult {
        shape,
        min_value,
        certificates: Certificates { descent_ok: true, ..Default::default() },
        crucial_measure: None,
    })
}

/// Points of the crucial tree where no complementary ball holds more than half the mass.
pub fn barycenter(measure: &CrucialMeasure) -> Result<Shape> {
    let tree = crucial_tree(measure)?;
    let total = measure.total_weight();
    let mut inside = Vec::new();
    for (i, q) in tree.vertices.iter().enumerate() {
        let mut masses: Vec<(P1, usize)> = Vec::new();
        for a in measure.atoms.iter().filter(|a| &a.point != q) {
            let v = direction_of(q, &a.point)?;
            match masses.iter_mut().find(|m| m.0 == v) {
                Some(m) => m.1 += a.weight,
                None => masses.push((v, a.weight)),
            }
        }
        if masses.iter().all(|m| 2 * m.1 <= total) {
            inside.push(i);
        }
    }
    let adjacent = |i: usize, j: usize| {
        tree.edges.iter().any(|e| (e.parent == i && e.child == j) || (e.parent == j && e.child == i))
    };
    let ends: Vec<usize> = inside
        .iter()
        .copied()
        .filter(|&i| inside.iter().filter(|&&j| adjacent(i, j)).count() <= 1)
        .collect();
    match (inside.len(), ends.as_slice()) {
        (1, _) => Ok(Shape::Point(tree.vertices[inside[0]].clone())),
        (_, [a, b]) => Ok(Shape::segment(tree.vertices[*a].clone(), tree.vertices[*b].clone())),
        _ => Err(Error::CrossCheckFailure(format!("barycenter is not a point or segment ({} vertices)", inside.len()))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Out,
    In,
    Unique,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionBalance {
    pub direction: P1,
    pub slope: i64,
    pub holds: bool,
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub point: BerkPoint,
    pub membership: Membership,
    pub directions: Vec<DirectionBalance>,
}

/// Balance conditions at `P` from surplus, fixed-point counts and the tangent map, checked
/// against the slope signs.
pub fn balance_report(phi: &MapRep, p: &BerkPoint) -> Result<BalanceReport> {
    let l = analyze(phi, p)?;
    let d = phi.degree();
    let mut directions = Vec::new();
    for v in candidate_directions(phi, p)? {
        let (holds, strict) = match &l.kind {
            ReductionKind::Moved { .. } => {
                let nf = l.fixed_count(&v);
                (2 * nf <= d + 1, 2 * nf < d + 1)
            }
            ReductionKind::Fixed(FixedKind::IdIndifferent) => {
                let s = l.surplus(&v);
                (2 * s < d, 2 * s + 1 < d)
            }
            ReductionKind::Fixed(_) => {
                let s = l.surplus(&v);
                let shear = l.tangent_image(&v)? != v;
                (2 * s < d || (2 * s <= d + 1 && shear), 2 * s + 1 < d || (2 * s < d + 1 && shear))
            }
        };
        let m = slope(phi, p, &v)?;
        if holds != (m >= 0) || strict != (m > 0) {
            return Err(Error::CrossCheckFailure(format!("balance vs slope at {p} in direction {v}")));
        }
        directions.push(DirectionBalance { direction: v, slope: m, holds, strict });
    }
    let membership = if directions.iter().all(|x| x.strict) {
        Membership::Unique
    } else if directions.iter().all(|x| x.holds) {
        Membership::In
    } else {
        Membership::Out
    };
    Ok(BalanceReport { point: p.clone(), membership, directions })
}

/// `Σ c_i (aX + bY)^i (cX + dY)^{n−i}`.
fn compose_residue(form: &ResidueForm, m: [&ResidueElem; 4]) -> ResidueForm {
    let field = form.field();
    let n = form.degree();
    let l1 = ResidueForm::new(field, vec![m[1].clone(), m[0].clone()]);
    let l2 = ResidueForm::new(field, vec![m[3].clone(), m[2].clone()]);
    let pow = |l: &ResidueForm, k: usize| (0..k).fold(ResidueForm::new(field, vec![field.one()]), |acc, _| acc.mul(l));
    let mut out = ResidueForm::zero(field, n);
    for i in 0..=n {
        let c = form.coeff(i);
        if !c.is_zero() {
            out = out.add(&pow(&l1, i).mul(&pow(&l2, n - i)).scale(c));
        }
    }
    out
}

/// The Hilbert–Mumford coefficient test in direction `a` on the reduced coefficient point:
/// returns `(semistable, stable)` for the direction.
fn coefficient_test(field: ResidueField, f: &ResidueForm, g: &ResidueForm, a: &P1) -> (bool, bool) {
    let (nf, ng) = match a {
        P1::Infinity => (f.clone(), g.clone()),
        P1::Finite(a) => {
            // τ = [[a, −1], [1, 0]] sends ∞ to a; conjugate by adj(τ) = [[0, 1], [−1, a]].
            let (one, zero, m1) = (field.one(), field.zero(), field.from_int(-1));
            let ft = compose_residue(f, [a, &m1, &one, &zero]);
            let gt = compose_residue(g, [a, &m1, &one, &zero]);
            (gt.clone(), gt.scale(a).add(&ft.scale(&m1)))
        }
    };
    let d = f.degree();
    let nz = |form: &ResidueForm, k: usize| !form.coeff(k).is_zero();
    let semi = (0..=d).any(|k| (2 * k > d && nz(&nf, k)) || (2 * k + 1 >= d && nz(&ng, k)));
    let stable = (0..=d).any(|k| (2 * k > d + 1 && nz(&nf, k)) || (2 * k + 1 > d && nz(&ng, k)));
    (semi, stable)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GitReport {
    pub semistable: bool,
    pub stable: bool,
}

/// Semistability and stability of the reduction at `P`, by slope signs and by the direct
/// coefficient test, which must agree direction by direction.
pub fn git_report(phi: &MapRep, p: &BerkPoint) -> Result<GitReport> {
    let psi = local_rep(phi, p)?;
    let (f, g) = (psi.f().reduce()?, psi.g().reduce()?);
    let field = phi.field();
    let mut rep = GitReport { semistable: true, stable: true };
    for v in candidate_directions(phi, p)? {
        let m = slope(phi, p, &v)?;
        let (semi, stable) = coefficient_test(field, &f, &g, &v);
        if semi != (m >= 0) || stable != (m > 0) {
            return Err(Error::CrossCheckFailure(format!("coefficient test vs slope at {p} in direction {v}")));
        }
        rep.semistable &= semi;
        rep.stable &= stable;
    }
    Ok(rep)
}

pub fn semistable_at(phi: &MapRep, p: &BerkPoint) -> Result<bool> {
    Ok(git_report(phi, p)?.semistable)
}

pub fn stable_at(phi: &MapRep, p: &BerkPoint) -> Result<bool> {
    Ok(git_report(phi, p)?.stable)
}

fn fail(what: &str) -> Error {
    Error::CrossCheckFailure(what.into())
}

/// Descent, barycenter, balance and semistability, cross-checked against each other.
pub fn min_res_loc(phi: &MapRep) -> Result<MinResResult> {
    let tree = support_tree(phi)?;
    let measure = crucial_set_on(phi, &tree)?;
    let (shape, min_value) = descend(phi, descent_cap(phi, &tree))?;
    let mut cert = Certificates { descent_ok: true, ..Default::default() };

    let bary = barycenter(&measure)?;
    if bary != shape {
        return Err(Error::CrossCheckFailure(format!("descent ({shape}) vs barycenter ({bary})")));
    }
    cert.barycenter_ok = true;
    if phi.degree().is_multiple_of(2) && !shape.is_point() {
        return Err(fail("even degree with a segment minimum"));
    }

    let mut probes = shape.endpoints();
    if !shape.is_point() {
        probes.push(shape.midpoint());
    }
    for p in &probes {
        if ordres_at(phi, p)? != min_value {
            return Err(Error::CrossCheckFailure(format!("descent value differs at {p}")));
        }
        let want = if shape.is_point() { Membership::Unique } else { Membership::In };
        if balance_report(phi, p)?.membership != want {
            return Err(Error::CrossCheckFailure(format!("descent vs balance at {p}")));
        }
    }
    cert.balance_ok = true;

    for p in &probes {
        let git = git_report(phi, p)?;
        if !git.semistable || git.stable != shape.is_point() {
            return Err(Error::CrossCheckFailure(format!("descent vs semistability at {p}")));
        }
    }
    for e in shape.endpoints() {
        for v in candidate_directions(phi, &e)? {
            let outside = e.point_along(&v, Exp::from_integer(1));
            if shape.contains(&outside) || shape.contains(&e.point_along(&v, Exp::new(1, 1 << 20))) {
                continue;
            }
            if semistable_at(phi, &outside)? {
                return Err(Error::CrossCheckFailure(format!("semistable outside the locus at {outside}")));
            }
        }
    }
    cert.semistable_ok = true;

    Ok(MinResResult { shape, min_value, certificates: cert, crucial_measure: Some(measure) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_rational_function;

    const Q: ResidueField = ResidueField::Rationals;

    fn map(s: &str) -> MapRep {
        MapRep::from_rational_function(&parse_rational_function(s, Q).unwrap()).unwrap()
    }

    fn pt(s: &str) -> BerkPoint {
        BerkPoint::parse(s, Q).unwrap()
    }

    #[test]
    fn square_is_minimal_at_gauss() {
        let phi = map("z^2");
        let r = min_res_loc(&phi).unwrap();
        assert_eq!(r.shape, Shape::Point(BerkPoint::gauss(Q)));
        assert_eq!(r.min_value, Exp::zero());
        let g = git_report(&phi, &BerkPoint::gauss(Q)).unwrap();
        assert!(g.semistable && g.stable);
        assert!(!semistable_at(&phi, &pt("0,1")).unwrap());
        assert_eq!(balance_report(&phi, &BerkPoint::gauss(Q)).unwrap().membership, Membership::Unique);
    }

    #[test]
    fn flat_segment() {
        let phi = map("(z^3 - (1+t)*z^2)/(-t)");
        let r = min_res_loc(&phi).unwrap();
        assert_eq!(r.shape, Shape::Segment(pt("0,1"), BerkPoint::gauss(Q)));
        let mid = pt("0,1/2");
        let g = git_report(&phi, &mid).unwrap();
        assert!(g.semistable && !g.stable);
    }

    #[test]
    fn path_midpoint() {
        let s = Shape::segment(pt("0,-1"), pt("1,2"));
        assert_eq!(s.midpoint(), pt("1,1/2"));
        assert!(s.contains(&pt("1,1")));
        assert!(!s.contains(&pt("2,1")));
    }
}
