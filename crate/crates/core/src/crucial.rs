//! The support tree of fixed points and the preimages of one value, the crucial set and
//! measure, the crucial tree, and the Laplacian identity on the tree of fixed and repelling
//! points.

use num_traits::Zero;
use serde::Serialize;

use crate::berktree::{form_roots, span, BerkPoint, FiniteTree, SpanItem, TypeIPoint, FIXED, PREIMAGE};
use crate::dynamics::{analyze, WeightReport};
use crate::error::{Error, Result};
use crate::forms::{BinaryForm, MapRep};
use crate::ordres::{ordres_on_ray, ordres_toward, slope, Paf};
use crate::ring::{Exp, PuiseuxPoly, ResidueField, Valuation, P1};

/// Refinement rounds allowed when chasing the breakpoints on a leg to an irrational root.
const LEG_CAP: usize = 64;

/// Finite target values tried over `Q` when the poles need a residue field extension.
const TARGET_CAP: i64 = 16;

#[derive(Clone, Debug, Serialize)]
pub struct CrucialAtom {
    pub point: BerkPoint,
    pub weight: usize,
    pub classification: WeightReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrucialMeasure {
    pub degree: usize,
    pub atoms: Vec<CrucialAtom>,
}

impl CrucialMeasure {
    pub fn total_weight(&self) -> usize {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Weight of `p`, zero off the support.
    pub fn weight_at(&self, p: &BerkPoint) -> usize {
        self.atoms.iter().find(|a| &a.point == p).map_or(0, |a| a.weight)
    }

    pub fn points(&self) -> Vec<BerkPoint> {
        self.atoms.iter().map(|a| a.point.clone()).collect()
    }
}

/// A classical point of `P¹(K)` used as the target of the preimage legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Infinity,
    Finite(PuiseuxPoly),
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Infinity => write!(f, "inf"),
            Target::Finite(x) => write!(f, "{x}"),
        }
    }
}

/// The value `a` whose preimages span the support tree together with the fixed points:
/// `∞` when the poles split over the residue field, else the first non-fixed entry of
/// [`finite_targets`] whose preimages split. Any `a ∈ P¹(K)` gives a tree containing
/// `Γ_{Fix,Repel}` and the minimal locus.
pub fn preimage_target(phi: &MapRep) -> Result<Target> {
    Ok(preimage_leaves(phi)?.0)
}

fn preimage_form(phi: &MapRep, a: &PuiseuxPoly) -> BinaryForm {
    phi.f().sub(&phi.g().scale(a))
}

/// Finite targets in trial order: `0, 1, −1, 2, …`, then `n·t`, `n·t^{−1}` and `n + t`.
fn finite_targets(field: ResidueField) -> Vec<PuiseuxPoly> {
    let cap = match field {
        ResidueField::Prime(p) => p.min(2 * TARGET_CAP as u64) as i64,
        ResidueField::Rationals => 2 * TARGET_CAP,
    };
    let ns: Vec<i64> = (0..cap).map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) }).collect();
    let t = PuiseuxPoly::t_pow(field, Exp::from_integer(1));
    let t_inv = PuiseuxPoly::t_pow(field, Exp::from_integer(-1));
    let mut out: Vec<PuiseuxPoly> = ns.iter().map(|&n| PuiseuxPoly::from_int(field, n)).collect();
    for &n in ns.iter().filter(|&&n| n != 0) {
        out.push(&PuiseuxPoly::from_int(field, n) * &t);
        out.push(&PuiseuxPoly::from_int(field, n) * &t_inv);
    }
    out.extend(ns.iter().map(|&n| &PuiseuxPoly::from_int(field, n) + &t));
    out
}

fn preimage_leaves(phi: &MapRep) -> Result<(Target, Vec<(TypeIPoint, usize)>)> {
    let field = phi.field();
    let first_err = match form_roots(phi.g()) {
        Ok(r) => return Ok((Target::Infinity, r)),
        Err(e @ Error::ResidueExtensionRequired(_)) => e,
        Err(e) => return Err(e),
    };
    let h = phi.fixed_point_form();
    for x in finite_targets(field) {
        // A fixed target would put a preimage leaf on top of a fixed leaf.
        if h.eval(&x, &PuiseuxPoly::one(field)).is_zero() {
            continue;
        }
        match form_roots(&preimage_form(phi, &x)) {
            Ok(r) => return Ok((Target::Finite(x), r)),
            Err(Error::ResidueExtensionRequired(_)) | Err(Error::ZeroPolynomial) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(first_err)
}

fn leaf_items(phi: &MapRep) -> Result<Vec<SpanItem>> {
    let mut items = Vec::new();
    for (point, multiplicity) in form_roots(&phi.fixed_point_form())? {
        items.push(SpanItem::Leaf { point, multiplicity, sources: FIXED });
    }
    for (point, multiplicity) in preimage_leaves(phi)?.1 {
        items.push(SpanItem::Leaf { point, multiplicity, sources: PREIMAGE });
    }
    Ok(items)
}

fn interior_breaks(paf: &Paf, limit: Option<Exp>) -> Vec<Exp> {
    paf.breakpoints
        .iter()
        .copied()
        .filter(|&b| b > Exp::zero() && limit.is_none_or(|l| b < l))
        .collect()
}

/// Breakpoints of `ordRes_φ` inside the edges and legs of `tree`.
fn breakpoint_points(phi: &MapRep, tree: &mut FiniteTree) -> Result<Vec<BerkPoint>> {
    let d = phi.degree() as i64;
    let mut out = Vec::new();
    for e in &tree.edges {
        let (p, c) = (&tree.vertices[e.parent], &tree.vertices[e.child]);
        let paf = ordres_toward(phi, p, c.center())?;
        for b in interior_breaks(&paf, Some(e.length)) {
            out.push(BerkPoint::new(c.center().clone(), p.depth() + b));
        }
    }
    let vertices = tree.vertices.clone();
    for leaf in &mut tree.leaves {
        let host = &vertices[leaf.vertex];
        let terminal = if leaf.is_fixed() { d * d - d } else { d * d + d };
        match &mut leaf.point {
            TypeIPoint::Infinity => {
                let paf = ordres_on_ray(phi, host, &P1::Infinity)?;
                for b in interior_breaks(&paf, None) {
                    out.push(host.point_along(&P1::Infinity, b));
                }
            }
            TypeIPoint::Finite(loc) => {
                let mut target = host.depth() + Exp::from_integer(1);
                let mut done = false;
                for _ in 0..LEG_CAP {
                    let x = loc.approx_beyond(target)?.clone();
                    let limit = match loc.gap() {
                        Valuation::Finite(g) => Some(g - host.depth()),
                        Valuation::Infinity => None,
                    };
                    let paf = ordres_toward(phi, host, &x)?;
                    let breaks = interior_breaks(&paf, limit);
                    // The path to x agrees with the path to the root up to `limit`; once the
                    // slope there is terminal, convexity rules out later breaks.
                    if limit.is_none() || paf.slopes[breaks.len()] == terminal {
                        for b in breaks {
                            out.push(BerkPoint::new(x.clone(), host.depth() + b));
                        }
                        done = true;
                        break;
                    }
                    target = host.depth() + limit.unwrap() * Exp::from_integer(2) + Exp::from_integer(1);
                }
                if !done {
                    return Err(Error::Unresolved);
                }
            }
        }
    }
    Ok(out)
}

/// Tree spanned by the Gauss point, the fixed points and the preimages of
/// [`preimage_target`], subdivided at every
/// breakpoint of `ordRes_φ` along its edges and legs.
pub fn support_tree(phi: &MapRep) -> Result<FiniteTree> {
    let mut items = vec![SpanItem::Point(BerkPoint::gauss(phi.field()))];
    items.extend(leaf_items(phi)?);
    let mut tree = span(items.clone())?;
    let extra = breakpoint_points(phi, &mut tree)?;
    if extra.is_empty() {
        return Ok(tree);
    }
    items.extend(extra.into_iter().map(SpanItem::Point));
    span(items)
}

/// Weights at every vertex of the support tree; errors unless they sum to `d − 1`.
pub fn crucial_set(phi: &MapRep) -> Result<CrucialMeasure> {
    let tree = support_tree(phi)?;
    crucial_set_on(phi, &tree)
}

pub fn crucial_set_on(phi: &MapRep, tree: &FiniteTree) -> Result<CrucialMeasure> {
    let d = phi.degree();
    let mut atoms = Vec::new();
    for p in &tree.vertices {
        let report = analyze(phi, p)?.weight()?;
        if report.weight > 0 {
            atoms.push(CrucialAtom { point: p.clone(), weight: report.weight, classification: report });
        }
    }
    let found: usize = atoms.iter().map(|a| a.weight).sum();
    if found != d - 1 {
        return Err(Error::IncompleteEnumeration {
            found: found as i64,
            expected: d as i64 - 1,
            residual: (d - 1) as i64 - found as i64,
        });
    }
    Ok(CrucialMeasure { degree: d, atoms })
}

/// Subtree spanned by the crucial atoms.
pub fn crucial_tree(measure: &CrucialMeasure) -> Result<FiniteTree> {
    span(measure.atoms.iter().map(|a| SpanItem::Point(a.point.clone())).collect())
}

/// The tree spanned by the classical fixed points and the crucial atoms (which contain the
/// repelling points).
pub fn fix_repel_tree(phi: &MapRep, measure: &CrucialMeasure) -> Result<FiniteTree> {
    let mut items: Vec<SpanItem> = measure.atoms.iter().map(|a| SpanItem::Point(a.point.clone())).collect();
    for (point, multiplicity) in form_roots(&phi.fixed_point_form())? {
        items.push(SpanItem::Leaf { point, multiplicity, sources: FIXED });
    }
    span(items)
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexBalance {
    pub point: BerkPoint,
    pub valence: usize,
    pub weight: usize,
    pub slope_sum: i64,
    pub expected: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplacianReport {
    pub vertices: Vec<VertexBalance>,
    /// Slopes at the leg cut points, measured back toward the tree.
    pub terminal_slopes: Vec<i64>,
    pub total_mass: i64,
}

/// Slopes at the cut points one unit down each leg, measured back toward the tree: `−(d²−d)`
/// on legs to fixed points and `−(d²+d)` otherwise, provided `ordRes_φ` is affine along the leg.
pub fn terminal_slopes(phi: &MapRep, tree: &FiniteTree) -> Result<Vec<i64>> {
    let d = phi.degree() as i64;
    let mut out = Vec::new();
    let mut legs = tree.leaves.clone();
    for leaf in &mut legs {
        let host = &tree.vertices[leaf.vertex];
        let cut = match &mut leaf.point {
            TypeIPoint::Infinity => host.point_along(&P1::Infinity, Exp::from_integer(1)),
            TypeIPoint::Finite(loc) => loc.point_at(host.depth() + Exp::from_integer(1))?,
        };
        let back = match leaf.point {
            TypeIPoint::Infinity => P1::Finite(phi.field().zero()),
            TypeIPoint::Finite(_) => P1::Infinity,
        };
        let m = slope(phi, &cut, &back)?;
        let want = if leaf.is_fixed() { -(d * d - d) } else { -(d * d + d) };
        if m != want {
            return Err(Error::IdentityViolation(format!("cut point {cut}: slope {m}, expected {want}")));
        }
        out.push(m);
    }
    Ok(out)
}

/// Checks `Σ_v ∂_v ordRes = (d²−d)(valence − 2) + 2d·w` at every vertex of `tree`, slope
/// cancellation along edges, and `−(d²−d)` at cut points on legs to fixed points.
pub fn laplacian_check(phi: &MapRep, tree: &FiniteTree) -> Result<LaplacianReport> {
    let d = phi.degree() as i64;
    let mut vertices = Vec::new();
    let mut total = 0i64;
    for (i, p) in tree.vertices.iter().enumerate() {
        let dirs = tree.directions_at(i);
        let mut sum = 0i64;
        for v in &dirs {
            sum += slope(phi, p, v)?;
        }
        let w = analyze(phi, p)?.weight()?.weight;
        let expected = (d * d - d) * (dirs.len() as i64 - 2) + 2 * d * w as i64;
        if sum != expected {
            return Err(Error::IdentityViolation(format!("vertex {p}: slope sum {sum}, expected {expected}")));
        }
        total += sum;
        vertices.push(VertexBalance { point: p.clone(), valence: dirs.len(), weight: w, slope_sum: sum, expected });
    }
    for e in &tree.edges {
        let a = slope(phi, &tree.vertices[e.parent], &e.parent_dir)?;
        let b = slope(phi, &tree.vertices[e.child], &P1::Infinity)?;
        if a + b != 0 {
            return Err(Error::IdentityViolation(format!(
                "edge {} -- {} is not affine",
                tree.vertices[e.parent], tree.vertices[e.child]
            )));
        }
    }
    let terminal_slopes = terminal_slopes(phi, tree)?;
    total += terminal_slopes.iter().sum::<i64>();
    if total != 0 {
        return Err(Error::IdentityViolation(format!("total Laplacian mass {total}")));
    }
    Ok(LaplacianReport { vertices, terminal_slopes, total_mass: total })
}
