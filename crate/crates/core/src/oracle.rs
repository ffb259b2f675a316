//! Brute-force cross-checks that avoid the primary code paths: a cofactor-expansion
//! resultant, a direct chart substitution, grid sampling and difference quotients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::berktree::{BerkPoint, FiniteTree};
use crate::forms::{BinaryForm, MapRep};
use crate::ring::{Exp, PuiseuxPoly, ResidueField, Valuation, P1};

/// Determinant by Laplace expansion along the last row, memoized over column subsets.
pub fn laplace_det(m: &[Vec<PuiseuxPoly>]) -> PuiseuxPoly {
    let n = m.len();
    let field = m[0][0].field();
    let mut dp = vec![PuiseuxPoly::zero(field); 1 << n];
    dp[0] = PuiseuxPoly::one(field);
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize - 1;
        let mut acc = PuiseuxPoly::zero(field);
        let mut idx = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let sub = &dp[mask & !(1 << j)];
            if !m[k][j].is_zero() && !sub.is_zero() {
                let term = &m[k][j] * sub;
                acc = if (k + idx).is_multiple_of(2) { &acc + &term } else { &acc - &term };
            }
            idx += 1;
        }
        dp[mask] = acc;
    }
    dp[(1 << n) - 1].clone()
}

/// Truncated series with integer coefficients, reduced modulo `p` over `F_p`.
type ZPoly = BTreeMap<Exp, BigInt>;

/// Clears the denominators of one row. Over `Q` this scales the row by a positive integer,
/// which changes the determinant by a unit only; over `F_p` residues are already integers.
fn integer_row(row: &[PuiseuxPoly]) -> Vec<ZPoly> {
    let den = row
        .iter()
        .flat_map(|x| x.terms().map(|(_, c)| c.denom().clone()))
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    row.iter()
        .map(|x| x.terms().map(|(e, c)| (*e, (c * BigRational::from_integer(den.clone())).to_integer())).collect())
        .collect()
}

fn add_product(acc: &mut ZPoly, a: &ZPoly, b: &ZPoly, negate: bool, bound: Exp, modulus: &Option<BigInt>) {
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = *ea + *eb;
            if e >= bound {
                break;
            }
            let prod = ca * cb;
            let slot = acc.entry(e).or_insert_with(BigInt::zero);
            if negate {
                *slot -= prod;
            } else {
                *slot += prod;
            }
            if let Some(p) = modulus {
                *slot = slot.mod_floor(p);
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
}

/// `ord det(m)` for a nonsingular matrix with integral entries, from cofactor expansions
/// modulo `t^B` with `B` doubled until one is nonzero.
pub fn laplace_det_ord(m: &[Vec<PuiseuxPoly>]) -> Exp {
    debug_assert!(m.iter().flatten().all(|x| x.ord() >= Valuation::Finite(Exp::from_integer(0))));
    let modulus = match m[0][0].field() {
        ResidueField::Prime(p) => Some(p),
        ResidueField::Rationals => None,
    };
    let z: Vec<Vec<ZPoly>> = m.iter().map(|row| integer_row(row)).collect();
    let den = z.iter().flatten().flat_map(|x| x.keys()).fold(1i64, |acc, e| acc.lcm(e.denom()));
    let mut bound = Exp::from_integer(8);
    loop {
        let found = match dense_det_ord(&z, den, bound, modulus) {
            Some(r) => r,
            None => sparse_det_ord(&z, bound, modulus),
        };
        if let Some(e) = found {
            return e;
        }
        bound *= Exp::from_integer(2);
    }
}

/// Cofactor expansion over `i128` in `s = t^{1/den}`. `None` on overflow over `Q`; the
/// inner option is the order found below `bound`.
fn dense_det_ord(z: &[Vec<ZPoly>], den: i64, bound: Exp, modulus: Option<u64>) -> Option<Option<Exp>> {
    let n = z.len();
    let len = (bound * Exp::from_integer(den)).ceil().to_integer() as usize;
    let dense = |x: &ZPoly| -> Option<Vec<i128>> {
        let mut v = vec![0i128; len];
        for (e, c) in x.range(..bound) {
            let c = match modulus {
                Some(p) => c.mod_floor(&BigInt::from(p)).to_i128()?,
                None => c.to_i128()?,
            };
            v[(*e * Exp::from_integer(den)).to_integer() as usize] = c;
        }
        Some(v)
    };
    let mut rows = Vec::with_capacity(n);
    for row in z {
        rows.push(row.iter().map(dense).collect::<Option<Vec<_>>>()?);
    }
    let mut dp: Vec<Vec<i128>> = vec![vec![0; len]; 1 << n];
    dp[0][0] = 1;
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize - 1;
        let mut acc = vec![0i128; len];
        let mut idx = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let (a, b) = (&rows[k][j], &dp[mask & !(1 << j)]);
            let negate = (k + idx) % 2 == 1;
            idx += 1;
            for (i, &ca) in a.iter().enumerate() {
                if ca == 0 {
                    continue;
                }
                for (jj, &cb) in b[..len - i].iter().enumerate() {
                    if cb == 0 {
                        continue;
                    }
                    let slot = &mut acc[i + jj];
                    match modulus {
                        Some(p) => {
                            let p = p as i128;
                            let prod = ca * cb % p;
                            *slot = if negate { (*slot - prod).rem_euclid(p) } else { (*slot + prod) % p };
                        }
                        None => {
                            let prod = ca.checked_mul(cb)?;
                            *slot = if negate { slot.checked_sub(prod)? } else { slot.checked_add(prod)? };
                        }
                    }
                }
            }
        }
        dp[mask] = acc;
    }
    let first = dp[(1 << n) - 1].iter().position(|&c| c != 0);
    Some(first.map(|i| Exp::new(i as i64, den)))
}

fn sparse_det_ord(z: &[Vec<ZPoly>], bound: Exp, modulus: Option<u64>) -> Option<Exp> {
    let n = z.len();
    let modulus = modulus.map(BigInt::from);
    let mut dp: Vec<ZPoly> = vec![ZPoly::new(); 1 << n];
    dp[0].insert(Exp::zero(), BigInt::one());
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize - 1;
        let mut acc = ZPoly::new();
        let mut idx = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            add_product(&mut acc, &z[k][j], &dp[mask & !(1 << j)], (k + idx) % 2 == 1, bound, &modulus);
            idx += 1;
        }
        dp[mask] = acc;
    }
    dp[(1 << n) - 1].keys().next().copied()
}

fn sylvester_matrix(f: &BinaryForm, g: &BinaryForm) -> Vec<Vec<PuiseuxPoly>> {
    let d = f.degree();
    assert_eq!(d, g.degree(), "equal degrees");
    let field = f.field();
    let n = 2 * d;
    let mut m = vec![vec![PuiseuxPoly::zero(field); n]; n];
    for (row, form) in [(0, f), (d, g)] {
        let desc = form.coeffs_descending();
        for s in 0..d {
            for (k, c) in desc.iter().enumerate() {
                m[row + s][s + k] = c.clone();
            }
        }
    }
    m
}

/// `Res(F, G)` from the `2d × 2d` Sylvester matrix of `f_d … f_0` and `g_d … g_0`.
pub fn sylvester_naive(f: &BinaryForm, g: &BinaryForm) -> PuiseuxPoly {
    laplace_det(&sylvester_matrix(f, g))
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `F(t^q X + cY, Y)` expanded term by term.
fn substitute(f: &BinaryForm, c: &PuiseuxPoly, q: Exp) -> Vec<PuiseuxPoly> {
    let field = f.field();
    let d = f.degree();
    let mut out = vec![PuiseuxPoly::zero(field); d + 1];
    for i in 0..=d {
        let fi = f.coeff(i);
        if fi.is_zero() {
            continue;
        }
        // (t^q X + cY)^i Y^{d−i} = Σ_j C(i,j) t^{qj} c^{i−j} X^j Y^{d−j}
        for j in 0..=i {
            let term = &(&PuiseuxPoly::t_pow(field, q * Exp::from_integer(j as i64)) * &c.pow((i - j) as u32))
                * &PuiseuxPoly::from_int(field, binomial(i, j));
            out[j] = &out[j] + &(fi * &term);
        }
    }
    out
}

/// `ordRes_φ(ζ_{c,q})` by direct substitution, normalization and the cofactor resultant.
/// The conjugate of a rational map has nonzero resultant, so the precision loop ends.
pub fn naive_ordres_at(phi: &MapRep, p: &BerkPoint) -> Exp {
    let field = phi.field();
    let (c, q) = (p.center(), p.depth());
    let fs = substitute(phi.f(), c, q);
    let gs = substitute(phi.g(), c, q);
    let tq = PuiseuxPoly::t_pow(field, q);
    let f2: Vec<PuiseuxPoly> = fs.iter().zip(&gs).map(|(a, b)| a - &(c * b)).collect();
    let g2: Vec<PuiseuxPoly> = gs.iter().map(|b| &tq * b).collect();
    let m = f2
        .iter()
        .chain(&g2)
        .filter_map(|x| x.ord().finite())
        .min()
        .expect("nonzero pair");
    let norm = |v: Vec<PuiseuxPoly>| BinaryForm::new(field, v.iter().map(|x| x.monomial_shift(-m)).collect());
    laplace_det_ord(&sylvester_matrix(&norm(f2), &norm(g2)))
}

/// Samples `ordRes_φ` at the vertices of `tree` and at evenly spaced interior points of its edges.
pub fn grid_scan(phi: &MapRep, tree: &FiniteTree, samples_per_edge: usize) -> Vec<(BerkPoint, Exp)> {
    let mut out: Vec<(BerkPoint, Exp)> = tree.vertices.iter().map(|v| (v.clone(), naive_ordres_at(phi, v))).collect();
    for e in &tree.edges {
        let (a, b) = (&tree.vertices[e.parent], &tree.vertices[e.child]);
        for k in 1..=samples_per_edge {
            let s = e.length * Exp::new(k as i64, samples_per_edge as i64 + 1);
            let p = BerkPoint::new(b.center().clone(), a.depth() + s);
            let v = naive_ordres_at(phi, &p);
            out.push((p, v));
        }
    }
    out
}

/// Slope of `ordRes_φ` at `P` in direction `v`, from difference quotients over halving steps;
/// by convexity two equal successive quotients certify the first affine piece.
pub fn finite_diff_slope(phi: &MapRep, p: &BerkPoint, v: &P1) -> i64 {
    let base = naive_ordres_at(phi, p);
    let quotient = |h: Exp| (naive_ordres_at(phi, &p.point_along(v, h)) - base) / h;
    let mut h = Exp::from_integer(1);
    let mut prev = quotient(h);
    loop {
        h /= Exp::from_integer(2);
        let cur = quotient(h);
        if cur == prev {
            assert!(cur.is_integer(), "slopes are integers");
            return cur.to_integer();
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::resultant;
    use crate::ring::parse_rational_function;

    const Q: ResidueField = ResidueField::Rationals;

    fn map(s: &str) -> MapRep {
        MapRep::from_rational_function(&parse_rational_function(s, Q).unwrap()).unwrap()
    }

    #[test]
    fn naive_resultant_basics() {
        let x2 = BinaryForm::x(Q).mul(&BinaryForm::x(Q));
        let y2 = BinaryForm::y(Q).mul(&BinaryForm::y(Q));
        assert_eq!(sylvester_naive(&x2, &y2), PuiseuxPoly::one(Q));
        assert!(sylvester_naive(&x2, &x2).is_zero());
        let phi = map("(2z^3 - (2+t)*z^2)/(z^2 - z - t)");
        assert_eq!(sylvester_naive(phi.f(), phi.g()), resultant(phi.f(), phi.g()).unwrap());
    }

    #[test]
    fn naive_values_and_slopes() {
        let phi = map("z^2");
        let g = BerkPoint::gauss(Q);
        assert_eq!(naive_ordres_at(&phi, &g), Exp::from_integer(0));
        assert_eq!(naive_ordres_at(&phi, &BerkPoint::parse("0,3/2", Q).unwrap()), Exp::from_integer(3));
        assert_eq!(finite_diff_slope(&phi, &g, &P1::Finite(Q.zero())), 2);
    }
}
