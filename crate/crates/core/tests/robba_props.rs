use num_rational::Rational64;
use phigamma_core::padic::PadicScalar;
use phigamma_core::robba::{phi_act, psi_act, psi_zero_basis, GaussWeight, RobbaElement, SubringTag};
use proptest::prelude::*;

const N: i64 = 20;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7])
}

fn poly(p: u32, cs: &[i64]) -> RobbaElement {
    RobbaElement::polynomial(p, cs.iter().map(|&c| PadicScalar::from_i64(c, p, N)).collect()).unwrap()
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..1000, 1..=max_len)
}

fn laurent(p: u32, lo: i64, cs: &[i64]) -> RobbaElement {
    let cs = cs.iter().map(|&c| PadicScalar::from_i64(c, p, 40)).collect();
    RobbaElement::new(p, lo, cs, SubringTag::FullRobba, true, true).unwrap()
}

fn nonzero(cs: &[i64]) -> bool {
    cs.iter().any(|&c| c != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn psi_undoes_phi((p, f) in prime().prop_flat_map(|p| (Just(p), coeffs(8)))) {
        let f = poly(p, &f);
        let back = psi_act(&phi_act(&f).unwrap()).unwrap();
        prop_assert!(back.agrees_with(&f, N), "{f:?} -> {back:?}");
    }

    #[test]
    fn projection_formula((p, f, g) in prime().prop_flat_map(|p| (Just(p), coeffs(4), coeffs(12)))) {
        let (f, g) = (poly(p, &f), poly(p, &g));
        let lhs = psi_act(&phi_act(&f).unwrap().mul(&g).unwrap()).unwrap();
        let rhs = f.mul(&psi_act(&g).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs, N));
    }

    #[test]
    fn psi_kills_the_zero_basis(
        (p, f, ws) in prime().prop_flat_map(|p| (Just(p), coeffs(4), prop::collection::vec(-20i64..20, 30)))
    ) {
        let basis = psi_zero_basis(3 * p as usize, p, N).unwrap();
        let mut e = poly(p, &[0]);
        for (b, &w) in basis.iter().zip(&ws) {
            e = e.add(&b.scale(&PadicScalar::from_i64(w, p, N))).unwrap();
        }
        prop_assert!(psi_act(&e).unwrap().is_negligible(0));
        let fe = e.mul(&phi_act(&poly(p, &f)).unwrap()).unwrap();
        prop_assert!(psi_act(&fe).unwrap().is_negligible(0));
    }

    #[test]
    fn gauss_valuation_is_multiplicative_and_ultrametric(
        (p, lo1, f, lo2, g, s) in prime().prop_flat_map(|p| (
            Just(p), -3i64..3, coeffs(6), -3i64..3, coeffs(6),
            prop::sample::select(vec![Rational64::new(1, 2), Rational64::from_integer(1), Rational64::from_integer(2)]),
        ))
    ) {
        prop_assume!(nonzero(&f) && nonzero(&g));
        let w = GaussWeight::new(s).unwrap();
        let (a, b) = (laurent(p, lo1, &f), laurent(p, lo2, &g));
        let (wa, wb) = (a.gauss_valuation(w).value.unwrap(), b.gauss_valuation(w).value.unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().gauss_valuation(w).value, Some(wa + wb));
        if let Some(ws) = a.add(&b).unwrap().gauss_valuation(w).value {
            prop_assert!(ws >= wa.min(wb));
        }
    }
}
