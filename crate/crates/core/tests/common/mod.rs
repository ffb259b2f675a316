//! Fixture maps shared by the integration suites, named by the behaviour they exhibit.
#![allow(dead_code)]

use minres::forms::{BinaryForm, MapRep};
use minres::ring::{parse_puiseux, Exp, PuiseuxPoly, ResidueField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const Q: ResidueField = ResidueField::Rationals;

pub fn p(s: &str, field: ResidueField) -> PuiseuxPoly {
    parse_puiseux(s, field).unwrap()
}

/// `aX + bY`.
pub fn lin(field: ResidueField, a: PuiseuxPoly, b: PuiseuxPoly) -> BinaryForm {
    BinaryForm::new(field, vec![b, a])
}

/// `X − rY`.
pub fn root_factor(r: &PuiseuxPoly) -> BinaryForm {
    let f = r.field();
    lin(f, PuiseuxPoly::one(f), -r)
}

pub fn product(field: ResidueField, factors: &[BinaryForm]) -> BinaryForm {
    factors.iter().fold(BinaryForm::new(field, vec![PuiseuxPoly::one(field)]), |acc, l| acc.mul(l))
}

pub fn from_forms(f: BinaryForm, g: BinaryForm) -> MapRep {
    MapRep::new(f, g).unwrap().normalize().0
}

pub fn from_text(s: &str, field: ResidueField) -> MapRep {
    minres::cli::parse_map(s, field).unwrap()
}

pub fn int(field: ResidueField, n: i64) -> PuiseuxPoly {
    PuiseuxPoly::from_int(field, n)
}

pub fn tp(field: ResidueField, e: i64) -> PuiseuxPoly {
    PuiseuxPoly::t_pow(field, Exp::from_integer(e))
}

/// `d − 1` focused repelling points of degree 2 around an id-indifferent Gauss point:
/// `F = X·∏(X − iY) + t·∏(tX − jY)`, `G = Y·∏(X − iY)`.
pub fn max_repelling(d: usize) -> MapRep {
    let f = Q;
    let t = tp(f, 1);
    let a = product(f, &(1..d as i64).map(|i| root_factor(&int(f, i))).collect::<Vec<_>>());
    let f1 = product(f, &(1..=d as i64).map(|j| lin(f, t.clone(), -&int(f, j))).collect::<Vec<_>>());
    let big_f = BinaryForm::x(f).mul(&a).add(&f1.scale(&t));
    let big_g = BinaryForm::y(f).mul(&a);
    from_forms(big_f, big_g)
}

/// Degree 5, symmetric under `z ↦ 1/z`: a flat segment `[ζ_{0,N}, ζ_{0,−N}]` with four
/// branches of fixed points off its interior (`μ = t`, `π = t^10`, `λ = t^100`).
pub fn symmetric_bar() -> MapRep {
    let f = Q;
    let (mu, pi, lam) = (tp(f, 1), tp(f, 10), tp(f, 100));
    let one = int(f, 1);
    let x_minus = root_factor(&lam);
    let y_minus = lin(f, -&lam, one.clone());
    let a = product(f, &[x_minus.clone(), x_minus, y_minus.clone(), y_minus]);
    let d = product(
        f,
        &[BinaryForm::x(f), BinaryForm::y(f), root_factor(&mu), lin(f, -&mu, one)],
    );
    let big_f = BinaryForm::x(f).mul(&a).add(&BinaryForm::y(f).mul(&d).scale(&pi));
    let big_g = BinaryForm::y(f).mul(&a).add(&BinaryForm::x(f).mul(&d).scale(&pi));
    from_forms(big_f, big_g)
}

/// Degree 5 over `F_7` with fixed points the sixth roots of unity; the minimum is a segment
/// whose endpoints carry no weight.
pub fn weightless_segment() -> MapRep {
    let f = ResidueField::Prime(7);
    let a = tp(f, 1);
    let a4 = tp(f, 4);
    let one_a = &int(f, 1) + &a;
    let big_f = BinaryForm::from_descending(f, vec![a4.clone(), a.clone(), one_a.clone(), a.clone(), a4.clone(), a4.clone()]);
    let big_g = BinaryForm::from_descending(f, vec![a4.clone(), a4.clone(), a.clone(), one_a, a, a4]);
    from_forms(big_f, big_g)
}

/// Cubic with fixed points `0, 1, t, ∞`: moved Gauss point, repelling `ζ_{0,1}`.
pub fn cubic_moved_repelling() -> MapRep {
    from_text("(z^3 - (1+t)*z^2)/(-t)", Q)
}

/// Cubic where both ends of the flat segment are moved.
pub fn cubic_both_moved() -> MapRep {
    from_text("(z^3 - (1+t)*z^2 + (t+t^2)*z)/t^2", Q)
}

/// Cubic with a multiplicatively indifferent Gauss point (`λ̃ = 2`) and moved `ζ_{0,1}`.
pub fn cubic_rotating_gauss() -> MapRep {
    from_text("(2z^3 - z^2)/(z^2 + t*z - t)", Q)
}

/// Cubic whose flat segment is multiplicatively indifferent inside and repelling at `ζ_{0,1}`.
pub fn cubic_rotating_segment() -> MapRep {
    from_text("(2z^3 - (2+t)*z^2)/(z^2 - z - t)", Q)
}

/// `z^d`: good reduction. Over `F_13` from degree 4 on, so that the fixed points split.
pub fn power_map(d: usize) -> MapRep {
    let field = if d >= 4 { ResidueField::Prime(13) } else { Q };
    from_text(&format!("z^{d}"), field)
}

/// `(∏_{i<d}(z − i) + tz)/t`: the Gauss point is moved and carries all the weight.
pub fn moved_single(d: usize) -> MapRep {
    let poly = (0..d).map(|i| format!("(z - {i})")).collect::<Vec<_>>().join("*");
    from_text(&format!("({poly} + t*z)/t"), Q)
}

fn shifted_factors(from: usize, count: usize) -> (String, String) {
    let f1 = (0..count).map(|i| format!("(z - {})", from + i)).collect::<Vec<_>>().join("*");
    let f1 = if f1.is_empty() { "1".to_string() } else { f1 };
    let f2 = format!("({f1} + t)");
    (f1, f2)
}

/// `z^k f₁/f₂` with `f̃` of degree `d − k`: repelling of degree `k` with `d − k` shearing directions.
pub fn repelling_single(d: usize, k: usize) -> MapRep {
    let (f1, f2) = shifted_factors(2, d - k);
    from_text(&format!("z^{k}*{f1}/{f2}"), Q)
}

/// `(z + 2) f₁/f₂`: additively indifferent Gauss point of weight `d − 1`.
pub fn additive_single(d: usize) -> MapRep {
    let (f1, f2) = shifted_factors(3, d - 1);
    from_text(&format!("(z + 2)*{f1}/{f2}"), Q)
}

/// `2z f₁/f₂`: multiplicatively indifferent Gauss point of weight `d − 1`.
pub fn multiplicative_single(d: usize) -> MapRep {
    let (f1, f2) = shifted_factors(3, d - 1);
    from_text(&format!("2*z*{f1}/{f2}"), Q)
}

/// Every named fixture with a label.
pub fn all_fixtures() -> Vec<(String, MapRep)> {
    let mut v: Vec<(String, MapRep)> = Vec::new();
    for d in 2..=5 {
        v.push((format!("max_repelling({d})"), max_repelling(d)));
        v.push((format!("power_map({d})"), power_map(d)));
        v.push((format!("moved_single({d})"), moved_single(d)));
        v.push((format!("additive_single({d})"), additive_single(d)));
        v.push((format!("multiplicative_single({d})"), multiplicative_single(d)));
    }
    v.push(("repelling_single(4, 2)".into(), repelling_single(4, 2)));
    v.push(("repelling_single(5, 3)".into(), repelling_single(5, 3)));
    v.push(("symmetric_bar".into(), symmetric_bar()));
    v.push(("weightless_segment".into(), weightless_segment()));
    v.push(("cubic_moved_repelling".into(), cubic_moved_repelling()));
    v.push(("cubic_both_moved".into(), cubic_both_moved()));
    v.push(("cubic_rotating_gauss".into(), cubic_rotating_gauss()));
    v.push(("cubic_rotating_segment".into(), cubic_rotating_segment()));
    v
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random element `c₁ t^{e₁} + c₂ t^{e₂}` with small coefficients and exponents in
/// `{−1, 0, 1/2, 1, 2}`.
pub fn random_element<R: Rng>(r: &mut R, field: ResidueField) -> PuiseuxPoly {
    let exps = [Exp::from_integer(-1), Exp::from_integer(0), Exp::new(1, 2), Exp::from_integer(1), Exp::from_integer(2)];
    let mut x = PuiseuxPoly::zero(field);
    for _ in 0..r.gen_range(1..=2) {
        let c = r.gen_range(-3i64..=3);
        let e = exps[r.gen_range(0..exps.len())];
        x = &x + &PuiseuxPoly::monomial(field, field.from_int(c), e);
    }
    x
}

pub fn random_field<R: Rng>(r: &mut R) -> ResidueField {
    match r.gen_range(0..4) {
        0 => ResidueField::Prime(7),
        1 => ResidueField::Prime(11),
        2 => ResidueField::Prime(13),
        _ => Q,
    }
}

/// A map of degree `d` whose `d` poles and `d + 1` fixed points are distinct elements of
/// the coefficient ring: `G = ∏(X − p_iY)`, `H = ∏(X − f_jY)`, `F = (XG − H)/Y`.
pub fn random_split_map<R: Rng>(r: &mut R, d: usize, field: ResidueField) -> MapRep {
    loop {
        let mut pts: Vec<PuiseuxPoly> = Vec::new();
        while pts.len() < 2 * d + 1 {
            let x = random_element(r, field);
            if !pts.contains(&x) {
                pts.push(x);
            }
        }
        let g = product(field, &pts[..d].iter().map(root_factor).collect::<Vec<_>>());
        let h = product(field, &pts[d..].iter().map(root_factor).collect::<Vec<_>>());
        // Both are monic in X, so XG − H has no X^{d+1} term and Y divides it.
        let diff = BinaryForm::x(field).mul(&g).sub(&h);
        debug_assert!(diff.coeff(d + 1).is_zero());
        let f = BinaryForm::new(field, diff.coeffs()[..=d].to_vec());
        if let Ok(m) = MapRep::new(f, g) {
            return m.normalize().0;
        }
    }
}

pub fn p1_elem(field: ResidueField, n: i64) -> minres::ring::P1 {
    minres::ring::P1::Finite(field.from_int(n))
}
