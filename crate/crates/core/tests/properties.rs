//! Property tests: ring laws, resultant against the cofactor oracle, and the shape of
//! `ordRes` along rays.

mod common;

use common::{random_element, random_field, random_split_map, rng};
use minres::berktree::BerkPoint;
use minres::crucial::crucial_set;
use minres::forms::{ord_resultant, resultant, BinaryForm};
use minres::minresloc::min_res_loc;
use minres::oracle::{naive_ordres_at, sylvester_naive};
use minres::ordres::{ordres_at, ordres_on_ray};
use minres::ring::{Exp, PuiseuxPoly, ResidueField, Valuation, P1};
use proptest::prelude::*;
use rand::Rng;

fn field_of(k: u8) -> ResidueField {
    match k % 3 {
        0 => ResidueField::Rationals,
        1 => ResidueField::Prime(7),
        _ => ResidueField::Prime(13),
    }
}

fn element(field: ResidueField, terms: &[(i64, i64, i64)]) -> PuiseuxPoly {
    terms.iter().fold(PuiseuxPoly::zero(field), |acc, &(c, n, den)| {
        &acc + &PuiseuxPoly::monomial(field, field.from_int(c), Exp::new(n, den))
    })
}

fn terms() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((-4i64..=4, -4i64..=6, 1i64..=3), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(k in any::<u8>(), a in terms(), b in terms(), c in terms()) {
        let f = field_of(k);
        let (a, b, c) = (element(f, &a), element(f, &b), element(f, &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
        }
        if let (Valuation::Finite(x), Valuation::Finite(y)) = (a.ord(), b.ord()) {
            prop_assert_eq!((&a * &b).ord(), Valuation::Finite(x + y));
        }
    }

    #[test]
    fn resultant_matches_cofactor_expansion(k in any::<u8>(), d in 1usize..=3, seed in any::<u64>()) {
        let field = field_of(k);
        let mut r = rng(seed);
        let mut form = || BinaryForm::new(field, (0..=d).map(|_| random_element(&mut r, field)).collect());
        let (f, g) = (form(), form());
        prop_assume!(!f.coeff(d).is_zero() || !g.coeff(d).is_zero());
        if let Ok(res) = resultant(&f, &g) {
            prop_assert_eq!(ord_resultant(&f, &g).unwrap(), res.ord());
            prop_assert_eq!(res, sylvester_naive(&f, &g));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ray_functions_are_convex_and_exact(seed in any::<u64>(), d in 2usize..=4, dir in -2i64..=3, depth in -2i64..=4) {
        let mut r = rng(seed);
        let field = random_field(&mut r);
        let phi = random_split_map(&mut r, d, field);
        let p = BerkPoint::new(random_element(&mut r, field), Exp::new(depth, 2));
        let v = if dir == 3 { P1::Infinity } else { P1::Finite(field.from_int(dir)) };
        let paf = ordres_on_ray(&phi, &p, &v).unwrap();
        prop_assert!(paf.check_invariants(), "{:?}", paf);
        prop_assert_eq!(paf.base, ordres_at(&phi, &p).unwrap());
        let mut qs: Vec<Exp> = paf.breakpoints.clone();
        qs.push(Exp::new(r.gen_range(1..20), 4));
        for q in qs {
            prop_assert_eq!(paf.eval(q), naive_ordres_at(&phi, &p.point_along(&v, q)));
        }
    }

    #[test]
    fn minimum_bounds_random_points(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let field = random_field(&mut r);
        let phi = random_split_map(&mut r, d, field);
        let loc = min_res_loc(&phi).unwrap();
        prop_assert!(loc.certificates.descent_ok && loc.certificates.barycenter_ok);
        for _ in 0..4 {
            let p = BerkPoint::new(random_element(&mut r, field), Exp::new(r.gen_range(-4..=6), 2));
            prop_assert!(ordres_at(&phi, &p).unwrap() >= loc.min_value);
        }
        let m = crucial_set(&phi).unwrap();
        prop_assert_eq!(m.total_weight(), d - 1);
    }
}
