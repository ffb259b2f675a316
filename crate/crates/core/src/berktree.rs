//! Type II points of the Berkovich line, tangent directions, root localization by
//! Newton polygons, and finite trees spanned by points and classical roots.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::forms::{BinaryForm, Mobius};
use crate::ring::{fmt_exp, Exp, PuiseuxPoly, RPoly, ResidueElem, ResidueField, Valuation, P1};

/// The type II point `ζ_{c, q}` of the closed disc `{x : ord(x − c) ≥ q}`.
///
/// The center is kept truncated below the depth, so equal points have equal fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BerkPoint {
    center: PuiseuxPoly,
    depth: Exp,
}

impl BerkPoint {
    pub fn new(center: PuiseuxPoly, depth: Exp) -> Self {
        BerkPoint { center: center.truncate(depth), depth }
    }

    pub fn gauss(field: ResidueField) -> Self {
        BerkPoint { center: PuiseuxPoly::zero(field), depth: Exp::zero() }
    }

    pub fn center(&self) -> &PuiseuxPoly {
        &self.center
    }

    pub fn depth(&self) -> Exp {
        self.depth
    }

    pub fn field(&self) -> ResidueField {
        self.center.field()
    }

    pub fn is_gauss(&self) -> bool {
        self.depth.is_zero() && self.center.is_zero()
    }

    /// Whether `x` lies in the disc of `self`.
    pub fn contains_center(&self, x: &PuiseuxPoly) -> bool {
        match (x - &self.center).ord() {
            Valuation::Infinity => true,
            Valuation::Finite(v) => v >= self.depth,
        }
    }

    /// Whether the disc of `other` lies in the disc of `self`.
    pub fn contains(&self, other: &BerkPoint) -> bool {
        other.depth >= self.depth && self.contains_center(&other.center)
    }

    /// Direction at `self` of the classical point `x`.
    pub fn direction_toward_center(&self, x: &PuiseuxPoly) -> P1 {
        let diff = x - &self.center;
        match diff.ord() {
            Valuation::Finite(v) if v < self.depth => P1::Infinity,
            _ => P1::Finite(diff.coeff(self.depth)),
        }
    }

    /// `[[t^q, c], [0, 1]]`, sending the Gauss point to `self`.
    pub fn chart(&self) -> Mobius {
        let f = self.field();
        Mobius {
            a: PuiseuxPoly::t_pow(f, self.depth),
            b: self.center.clone(),
            c: PuiseuxPoly::zero(f),
            d: PuiseuxPoly::one(f),
        }
    }

    /// The point at distance `q > 0` from `self` in direction `v`.
    pub fn point_along(&self, v: &P1, q: Exp) -> BerkPoint {
        let f = self.field();
        match v {
            P1::Finite(a) => {
                let c = &self.center + &PuiseuxPoly::monomial(f, a.clone(), self.depth);
                BerkPoint::new(c, self.depth + q)
            }
            P1::Infinity => BerkPoint::new(self.center.clone(), self.depth - q),
        }
    }

    /// Center used to reach direction `v` from `self`: `c + ã·t^q` for `v_ã`.
    pub fn direction_center(&self, v: &P1) -> PuiseuxPoly {
        match v {
            P1::Finite(a) => &self.center + &PuiseuxPoly::monomial(self.field(), a.clone(), self.depth),
            P1::Infinity => self.center.clone(),
        }
    }

    /// Parses `c,q` with `c` a Puiseux polynomial and `q` a rational depth.
    pub fn parse(text: &str, field: ResidueField) -> Result<Self> {
        let (c, q) = text
            .rsplit_once(',')
            .ok_or_else(|| Error::Parse { pos: 0, msg: "expected center,depth".into() })?;
        let center = crate::ring::parse_puiseux(c.trim(), field)?;
        let depth = parse_exp(q.trim()).ok_or_else(|| Error::Parse { pos: c.len() + 1, msg: "invalid depth".into() })?;
        Ok(BerkPoint::new(center, depth))
    }
}

pub(crate) fn parse_exp(s: &str) -> Option<Exp> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Exp::new(n, d))
        }
        None => Some(Exp::from_integer(s.trim().parse().ok()?)),
    }
}

impl Ord for BerkPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        self.depth.cmp(&o.depth).then_with(|| self.center.cmp(&o.center))
    }
}

impl PartialOrd for BerkPoint {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for BerkPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta({}, {})", self.center, fmt_exp(&self.depth))
    }
}

impl Serialize for BerkPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BerkPoint", 2)?;
        st.serialize_field("center", &self.center.to_string())?;
        st.serialize_field("depth", &fmt_exp(&self.depth))?;
        st.end()
    }
}

/// A tangent direction `v_a` at a type II point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Direction {
    pub at: BerkPoint,
    pub index: P1,
}

/// Least point whose disc contains both discs.
pub fn join(p: &BerkPoint, q: &BerkPoint) -> BerkPoint {
    let j = join_depth(p, q);
    BerkPoint::new(p.center.clone(), j)
}

fn join_depth(p: &BerkPoint, q: &BerkPoint) -> Exp {
    let m = p.depth.min(q.depth);
    match (&p.center - &q.center).ord() {
        Valuation::Finite(v) => v.min(m),
        Valuation::Infinity => m,
    }
}

/// Logarithmic path distance.
pub fn path_dist(p: &BerkPoint, q: &BerkPoint) -> Exp {
    let j = join_depth(p, q);
    (p.depth - j) + (q.depth - j)
}

/// The point at distance `s` from `p` on the path to `q`.
pub fn point_on_path(p: &BerkPoint, q: &BerkPoint, s: Exp) -> BerkPoint {
    let j = join_depth(p, q);
    let up = p.depth - j;
    if s <= up {
        BerkPoint::new(p.center.clone(), p.depth - s)
    } else {
        BerkPoint::new(q.center.clone(), j + (s - up))
    }
}

/// Direction at `p` containing `target`.
pub fn direction_of(p: &BerkPoint, target: &BerkPoint) -> Result<P1> {
    if p == target {
        return Err(Error::SamePoint);
    }
    if p.contains(target) {
        Ok(P1::Finite((&target.center - &p.center).coeff(p.depth)))
    } else {
        Ok(P1::Infinity)
    }
}

/// Refinement budget for a single root query.
const REFINE_CAP: usize = 512;

/// A classical root `α` of a squarefree polynomial over `R`, located by successive
/// approximation: `gap = ord(α − center)` and `α` is the only root with
/// `ord(x − center) ≥ radius`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootLocator {
    poly: RPoly,
    center: PuiseuxPoly,
    radius: Exp,
    gap: Valuation,
    next: Option<ResidueElem>,
}

impl RootLocator {
    fn new(poly: RPoly, center: PuiseuxPoly, radius: Exp) -> Result<Self> {
        let mut l = RootLocator { poly, center, radius, gap: Valuation::Infinity, next: None };
        l.measure()?;
        Ok(l)
    }

    /// Locator for a root of `f` lying in `R`.
    pub fn exact(f: &RPoly, root: PuiseuxPoly) -> Result<Self> {
        let sf = f.squarefree_part();
        if !sf.eval(&root).is_zero() {
            return Err(Error::Precondition("not a root".into()));
        }
        let h = sf.taylor_shift(&root);
        let np = h.newton_polygon();
        let radius = np.slopes.first().map(|(s, _)| *s + Exp::from_integer(1)).unwrap_or(Exp::zero());
        Self::new(sf, root, radius)
    }

    fn measure(&mut self) -> Result<()> {
        let h = self.poly.taylor_shift(&self.center);
        if h.coeff(0).is_zero() {
            self.gap = Valuation::Infinity;
            self.next = None;
            return Ok(());
        }
        let np = h.newton_polygon();
        let (v, n) = *np.slopes.first().ok_or(Error::Unresolved)?;
        if n != 1 || v < self.radius {
            return Err(Error::Unresolved);
        }
        let e = h.edge_polynomial(v);
        let f = self.poly.field();
        let a = f.neg(&f.div(&e.coeff(0), &e.coeff(1)).ok_or(Error::Unresolved)?);
        self.gap = Valuation::Finite(v);
        self.next = Some(a);
        Ok(())
    }

    fn refine(&mut self) -> Result<()> {
        if let (Valuation::Finite(v), Some(a)) = (self.gap, self.next.clone()) {
            self.center = &self.center + &PuiseuxPoly::monomial(self.poly.field(), a, v);
            self.measure()?;
        }
        Ok(())
    }

    pub fn poly(&self) -> &RPoly {
        &self.poly
    }

    pub fn field(&self) -> ResidueField {
        self.poly.field()
    }

    /// Current approximation.
    pub fn center(&self) -> &PuiseuxPoly {
        &self.center
    }

    /// `ord(α − center)`.
    pub fn gap(&self) -> Valuation {
        self.gap
    }

    /// The root itself when it lies in `R`.
    pub fn as_exact(&self) -> Option<&PuiseuxPoly> {
        self.gap.is_infinite().then_some(&self.center)
    }

    /// Refines until `ord(α − center) > depth`, returning the approximation.
    pub fn approx_beyond(&mut self, depth: Exp) -> Result<&PuiseuxPoly> {
        for _ in 0..REFINE_CAP {
            match self.gap {
                Valuation::Finite(g) if g <= depth => self.refine()?,
                _ => return Ok(&self.center),
            }
        }
        Err(Error::Unresolved)
    }

    /// `ord(α − x)`.
    pub fn ord_diff(&mut self, x: &PuiseuxPoly) -> Result<Valuation> {
        for _ in 0..REFINE_CAP {
            let o = (x - &self.center).ord();
            match (o, self.gap) {
                (_, Valuation::Infinity) => return Ok(o),
                (Valuation::Finite(a), Valuation::Finite(g)) if a != g => return Ok(Valuation::Finite(a.min(g))),
                (Valuation::Infinity, g) => return Ok(g),
                _ => self.refine()?,
            }
        }
        Err(Error::Unresolved)
    }

    /// `ord(α − β)` for distinct roots.
    pub fn ord_between(a: &mut RootLocator, b: &mut RootLocator) -> Result<Exp> {
        for _ in 0..REFINE_CAP {
            let o = (&a.center - &b.center).ord();
            let g = a.gap.min(b.gap);
            match (o, g) {
                (Valuation::Finite(v), _) if Valuation::Finite(v) < g => return Ok(v),
                (Valuation::Infinity, Valuation::Infinity) => return Err(Error::Precondition("roots coincide".into())),
                _ => {
                    if a.gap <= b.gap {
                        a.refine()?;
                    } else {
                        b.refine()?;
                    }
                }
            }
        }
        Err(Error::Unresolved)
    }

    /// Direction at `p` containing `α`.
    pub fn direction_from(&mut self, p: &BerkPoint) -> Result<P1> {
        let c = self.approx_beyond(p.depth)?.clone();
        Ok(p.direction_toward_center(&c))
    }

    /// Whether `α` lies in the disc of `p`.
    pub fn in_disc(&mut self, p: &BerkPoint) -> Result<bool> {
        Ok(match self.ord_diff(&p.center)? {
            Valuation::Infinity => true,
            Valuation::Finite(v) => v >= p.depth,
        })
    }

    /// The point at depth `q` on the path from `α` toward infinity.
    pub fn point_at(&mut self, q: Exp) -> Result<BerkPoint> {
        let c = self.approx_beyond(q)?.clone();
        Ok(BerkPoint::new(c, q))
    }
}

/// Squarefree part of `f`, rejecting inseparable input in small characteristic.
pub fn separable_part(f: &RPoly) -> Result<RPoly> {
    let sf = f.squarefree_part();
    let p = f.field().characteristic();
    if p != 0 && (p as usize) <= f.degree().unwrap_or(0) {
        let d = sf.derivative();
        if d.is_zero() || sf.gcd(&d).degree() != Some(0) {
            return Err(Error::Inseparable);
        }
    }
    Ok(sf)
}

/// Isolates the roots of squarefree `g` with `ord(x − c) > floor` (`None` = all roots).
pub fn isolate(g: &RPoly, c: &PuiseuxPoly, floor: Option<Exp>) -> Result<Vec<RootLocator>> {
    let mut out = Vec::new();
    let mut budget = 100_000usize;
    isolate_into(g, c, floor, &mut out, &mut budget)?;
    Ok(out)
}

fn isolate_into(
    g: &RPoly,
    c: &PuiseuxPoly,
    floor: Option<Exp>,
    out: &mut Vec<RootLocator>,
    budget: &mut usize,
) -> Result<()> {
    *budget = budget.checked_sub(1).ok_or(Error::Unresolved)?;
    let h = g.taylor_shift(c);
    let np = h.newton_polygon();
    let n = np.count_above(floor);
    if n == 0 {
        return Ok(());
    }
    let v = np.min_valuation_above(floor);
    if n == 1 {
        // A root exactly at c only needs a ball above the floor.
        let radius = match (np.zero_roots, v, floor) {
            (0, Some(v), _) => v,
            (_, _, Some(fl)) => fl + Exp::from_integer(1),
            _ => Exp::zero(),
        };
        out.push(RootLocator::new(g.clone(), c.clone(), radius)?);
        return Ok(());
    }
    let v = v.expect("two roots above the floor include a nonzero one");
    let e = h.edge_polynomial(v);
    let rep = e.roots()?;
    if !rep.nonsplit.is_empty() {
        return Err(Error::ResidueExtensionRequired(rep.nonsplit));
    }
    let f = g.field();
    isolate_into(g, c, Some(v), out, budget)?;
    for (a, _) in rep.roots {
        if let P1::Finite(a) = a {
            let c2 = c + &PuiseuxPoly::monomial(f, a, v);
            isolate_into(g, &c2, Some(v), out, budget)?;
        }
    }
    Ok(())
}

/// A classical point: `∞` or a located finite root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeIPoint {
    Infinity,
    Finite(RootLocator),
}

/// Roots of a binary form in `P¹(K)` with multiplicities.
pub fn form_roots(form: &BinaryForm) -> Result<Vec<(TypeIPoint, usize)>> {
    if form.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let f = form.dehomogenize();
    let deg = f.degree().unwrap_or(0);
    let mut out = Vec::new();
    if deg > 0 {
        let sf = separable_part(&f)?;
        for loc in isolate(&sf, &PuiseuxPoly::zero(form.field()), None)? {
            let h = f.taylor_shift(&loc.center);
            let np = h.newton_polygon();
            let m = np.zero_roots + np.slopes.iter().filter(|(s, _)| *s >= loc.radius).map(|(_, n)| n).sum::<usize>();
            out.push((TypeIPoint::Finite(loc), m));
        }
    }
    if form.degree() > deg {
        out.push((TypeIPoint::Infinity, form.degree() - deg));
    }
    Ok(out)
}

/// Leaf source bits.
pub const FIXED: u8 = 1;
/// Preimage of the support tree's target value (the poles when the target is `∞`).
pub const PREIMAGE: u8 = 2;

/// Input to [`span`].
#[derive(Clone, Debug)]
pub enum SpanItem {
    Point(BerkPoint),
    Leaf { point: TypeIPoint, multiplicity: usize, sources: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub parent: usize,
    pub child: usize,
    #[serde(serialize_with = "ser_exp")]
    pub length: Exp,
    /// Direction at the parent pointing to the child.
    pub parent_dir: P1,
}

fn ser_exp<S: Serializer>(e: &Exp, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_exp(e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub vertex: usize,
    pub direction: P1,
    pub point: TypeIPoint,
    pub multiplicity: usize,
    pub sources: u8,
}

impl Leaf {
    pub fn is_fixed(&self) -> bool {
        self.sources & FIXED != 0
    }

    /// Coordinates of the leaf when it lies in `R`.
    pub fn as_exact_root(&self) -> Option<&PuiseuxPoly> {
        match &self.point {
            TypeIPoint::Finite(loc) => loc.as_exact(),
            TypeIPoint::Infinity => None,
        }
    }
}

/// A finite subtree: type II vertices ordered by depth, parent edges, and legs to
/// classical points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    pub vertices: Vec<BerkPoint>,
    pub edges: Vec<Edge>,
    pub leaves: Vec<Leaf>,
}

impl FiniteTree {
    pub fn vertex_index(&self, p: &BerkPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    /// Number of edges and legs at vertex `i`.
    pub fn valence(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.parent == i || e.child == i).count()
            + self.leaves.iter().filter(|l| l.vertex == i).count()
    }

    /// Directions at vertex `i` along the tree.
    pub fn directions_at(&self, i: usize) -> Vec<P1> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.parent == i {
                out.push(e.parent_dir.clone());
            }
            if e.child == i {
                out.push(P1::Infinity);
            }
        }
        for l in self.leaves.iter().filter(|l| l.vertex == i) {
            out.push(l.direction.clone());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Neighbouring vertex of `i` in direction `v`, if the tree continues there by an edge.
    pub fn neighbor(&self, i: usize, v: &P1) -> Option<usize> {
        self.edges.iter().find_map(|e| {
            if e.parent == i && &e.parent_dir == v {
                Some(e.child)
            } else if e.child == i && *v == P1::Infinity {
                Some(e.parent)
            } else {
                None
            }
        })
    }

    /// `D − Σ (v − 2) = 2` over branch points, `D` the number of endpoints.
    pub fn euler_check(&self) -> bool {
        if self.edges.is_empty() && self.leaves.is_empty() {
            return self.vertices.len() == 1;
        }
        let mut endpoints = self.leaves.len() as i64;
        let mut branch = 0i64;
        for i in 0..self.vertices.len() {
            let v = self.valence(i) as i64;
            if v == 1 {
                endpoints += 1;
            }
            if v >= 3 {
                branch += v - 2;
            }
            if v == 0 {
                return false;
            }
        }
        endpoints - branch == 2 && self.edges.len() + 1 == self.vertices.len()
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph tree {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!("  v{i} [label=\"{v}\"];\n"));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  v{} -- v{} [label=\"{}\"];\n",
                e.parent,
                e.child,
                fmt_exp(&e.length)
            ));
        }
        for (k, l) in self.leaves.iter().enumerate() {
            let what = match &l.point {
                TypeIPoint::Infinity => "inf".to_string(),
                TypeIPoint::Finite(loc) => match loc.as_exact() {
                    Some(x) => x.to_string(),
                    None => format!("root near {}", loc.center()),
                },
            };
            let kind = match l.sources {
                FIXED => "fixed",
                PREIMAGE => "preimage",
                s if s == FIXED | PREIMAGE => "fixed preimage",
                _ => "root",
            };
            s.push_str(&format!(
                "  l{k} [shape=box, label=\"{what} ({kind}, mult {})\"];\n  v{} -- l{k} [label=\"dir {}\", style=dashed];\n",
                l.multiplicity, l.vertex, l.direction
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// The tree spanned by type II points and classical points.
pub fn span(items: Vec<SpanItem>) -> Result<FiniteTree> {
    let mut points: Vec<BerkPoint> = Vec::new();
    let mut leaves: Vec<(TypeIPoint, usize, u8)> = Vec::new();
    for it in items {
        match it {
            SpanItem::Point(p) => points.push(p),
            SpanItem::Leaf { point, multiplicity, sources } => {
                if let TypeIPoint::Infinity = point {
                    if let Some(l) = leaves.iter_mut().find(|l| l.0 == TypeIPoint::Infinity) {
                        l.1 += multiplicity;
                        l.2 |= sources;
                        continue;
                    }
                }
                leaves.push((point, multiplicity, sources))
            }
        }
    }
    let mut verts = points.clone();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            verts.push(join(&points[i], &points[j]));
        }
    }
    let finite: Vec<usize> = (0..leaves.len()).filter(|&k| leaves[k].0 != TypeIPoint::Infinity).collect();
    for &k in &finite {
        for p in &points {
            let TypeIPoint::Finite(loc) = &mut leaves[k].0 else { unreachable!() };
            let o = loc.ord_diff(p.center())?;
            let d = match o {
                Valuation::Finite(v) => v.min(p.depth),
                Valuation::Infinity => p.depth,
            };
            verts.push(BerkPoint::new(p.center.clone(), d));
        }
    }
    for x in 0..finite.len() {
        for y in x + 1..finite.len() {
            let (lo, hi) = (finite[x], finite[y]);
            let (left, right) = leaves.split_at_mut(hi);
            let (TypeIPoint::Finite(a), TypeIPoint::Finite(b)) = (&mut left[lo].0, &mut right[0].0) else {
                unreachable!()
            };
            let v = RootLocator::ord_between(a, b)?;
            verts.push(a.point_at(v)?);
        }
    }
    verts.sort();
    verts.dedup();
    if verts.is_empty() {
        return Err(Error::Precondition("span needs a type II point or two classical points".into()));
    }
    let mut edges = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        // Vertices are sorted by depth, so the deepest container comes last.
        if let Some(pi) = (0..i).rev().find(|&j| verts[j].contains(v) && verts[j] != *v) {
            edges.push(Edge {
                parent: pi,
                child: i,
                length: v.depth - verts[pi].depth,
                parent_dir: direction_of(&verts[pi], v)?,
            });
        }
    }
    let roots = verts.len() - edges.len();
    if roots != 1 {
        return Err(Error::Precondition(format!("span is disconnected ({roots} components)")));
    }
    let top = (0..verts.len()).find(|&i| edges.iter().all(|e| e.child != i)).unwrap();
    let mut out_leaves = Vec::new();
    for (point, multiplicity, sources) in leaves {
        match point {
            TypeIPoint::Infinity => out_leaves.push(Leaf {
                vertex: top,
                direction: P1::Infinity,
                point: TypeIPoint::Infinity,
                multiplicity,
                sources,
            }),
            TypeIPoint::Finite(mut loc) => {
                let mut host = None;
                for i in (0..verts.len()).rev() {
                    if loc.in_disc(&verts[i])? {
                        host = Some(i);
                        break;
                    }
                }
                let host = host.ok_or_else(|| Error::Precondition("leaf outside the spanned tree".into()))?;
                let direction = loc.direction_from(&verts[host])?;
                out_leaves.push(Leaf { vertex: host, direction, point: TypeIPoint::Finite(loc), multiplicity, sources });
            }
        }
    }
    Ok(FiniteTree { vertices: verts, edges, leaves: out_leaves })
}

/// The tree spanned by the Gauss point and the roots of `form`.
pub fn root_tree(form: &BinaryForm) -> Result<FiniteTree> {
    let mut items = vec![SpanItem::Point(BerkPoint::gauss(form.field()))];
    for (point, multiplicity) in form_roots(form)? {
        items.push(SpanItem::Leaf { point, multiplicity, sources: 0 });
    }
    span(items)
}
