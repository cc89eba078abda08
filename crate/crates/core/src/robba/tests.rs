use num_rational::Rational64;

use super::*;
use crate::linalg::{rank, Mat};
use crate::padic::PadicScalar;

const N: i64 = 20;

fn s(n: i64, p: u32) -> PadicScalar {
    PadicScalar::from_i64(n, p, N)
}

fn poly(cs: &[i64], p: u32) -> RobbaElement {
    RobbaElement::polynomial(p, cs.iter().map(|&c| s(c, p)).collect()).unwrap()
}

fn one_plus_t_pow(n: u64, p: u32) -> RobbaElement {
    let cs: Vec<i64> = (0..=n).map(|k| actions::binom(n, k).try_into().unwrap()).collect();
    poly(&cs, p)
}

fn w(a: i64, b: i64) -> GaussWeight {
    GaussWeight::new(Rational64::new(a, b)).unwrap()
}

#[test]
fn geometric_series_inverts_one_plus_t() {
    let k = 12;
    let geo = RobbaElement::series(5, (0..k).map(|n| s(if n % 2 == 0 { 1 } else { -1 }, 5)).collect()).unwrap();
    let prod = poly(&[1, 1], 5).mul(&geo).unwrap();
    assert_eq!(prod.window(), (0, k - 1));
    assert!(prod.agrees_with(&RobbaElement::constant(s(1, 5)), N));
}

#[test]
fn monomials_multiply() {
    let c = RobbaElement::monomial(7, -3, N).mul(&RobbaElement::monomial(7, 5, N)).unwrap();
    assert_eq!(c.order(), Some(2));
    assert!(c.agrees_with(&RobbaElement::monomial(7, 2, N), N));
}

#[test]
fn gauss_valuation_examples() {
    let f = RobbaElement::polynomial(5, vec![s(5, 5), s(1, 5)]).unwrap();
    assert_eq!(f.gauss_valuation(w(1, 2)).value, Some(Rational64::new(1, 2)));
    let g = RobbaElement::monomial(5, -1, N);
    let gv = g.gauss_valuation(w(1, 1));
    assert_eq!(gv.value, Some(Rational64::from_integer(-1)));
    assert!(!gv.tail_uncertain);
    // (1+T)^3 - 1 = T^3 + 3T^2 + 3T: min(1+1, 1+2, 0+3) = 2
    let phi_t = phi_act(&RobbaElement::monomial(3, 1, N)).unwrap();
    assert_eq!(phi_t.gauss_valuation(w(1, 1)).value, Some(Rational64::from_integer(2)));
}

#[test]
fn open_tails_are_flagged() {
    let t = log_one_plus_t(5, 10, N).unwrap();
    assert!(t.gauss_valuation(w(1, 1)).tail_uncertain);
    let b = RobbaElement::new(5, 0, vec![s(1, 5), s(1, 5)], SubringTag::EPlus, true, false).unwrap();
    // floor 0 bounds the tail by 0 + 1*2 > 0 = min
    assert!(!b.gauss_valuation(w(1, 1)).tail_uncertain);
}

#[test]
fn phi_examples() {
    let phi_t = phi_act(&RobbaElement::monomial(3, 1, N)).unwrap();
    assert!(phi_t.agrees_with(&poly(&[0, 3, 3, 1], 3), N));
    let c = RobbaElement::constant(s(17, 3));
    assert!(phi_act(&c).unwrap().agrees_with(&c, N));

    let inv = phi_act(&RobbaElement::monomial(3, -1, N)).unwrap();
    assert_eq!(inv.coeff(-3), Some(s(1, 3)));
    for i in -2..=0 {
        assert!(inv.coeff(i).unwrap().is_zero());
    }
    assert!(!inv.coeff(-4).unwrap().is_zero());
    // phi(1/T) phi(T) = 1
    let one = inv.mul(&phi_t).unwrap();
    assert!(one.agrees_with(&RobbaElement::constant(s(1, 3)), N));
}

#[test]
fn gamma_examples() {
    let t = RobbaElement::monomial(5, 1, N).restrict(0, 6).unwrap();
    let t = RobbaElement::series(5, (0..=6).map(|i| t.coeff(i).unwrap()).collect()).unwrap();
    let g1 = gamma_act(&t, &PadicScalar::from_i64(1, 5, N + 10)).unwrap();
    assert!(g1.agrees_with(&t, N));
    let g2 = gamma_act(&t, &PadicScalar::from_i64(2, 5, N + 10)).unwrap();
    assert!(g2.agrees_with(&RobbaElement::series(5, vec![s(0, 5), s(2, 5), s(1, 5), s(0, 5)]).unwrap(), N));
    let g6 = gamma_act(&t, &PadicScalar::from_i64(6, 5, N + 10)).unwrap();
    assert_eq!(g6.coeff(1), Some(s(6, 5)));
}

#[test]
fn gamma_rejects_laurent_input() {
    let f = RobbaElement::monomial(5, -1, N);
    assert!(matches!(gamma_act(&f, &s(2, 5)), Err(RobbaError::UnsupportedTag(_))));
}

/// phi(psi(f)) = (1/3) sum over cube roots of unity of f((1+T)z - 1),
/// computed in Z[w] with w^2 = -1 - w.
fn averaged(f: &[i64]) -> Vec<i64> {
    type Zw = (i64, i64);
    fn mul(a: Zw, b: Zw) -> Zw {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0 - a.1 * b.1)
    }
    let d = f.len();
    let mut total = vec![(0i64, 0i64); d];
    for z in [(1, 0), (0, 1), (-1, -1)] {
        // x = (1+T)z - 1 = (z - 1) + z T
        let x = [(z.0 - 1, z.1), z];
        let mut pw = vec![(1i64, 0i64)];
        for &c in f {
            for (k, v) in pw.iter().enumerate() {
                let t = mul((c, 0), *v);
                total[k] = (total[k].0 + t.0, total[k].1 + t.1);
            }
            let mut next = vec![(0, 0); (pw.len() + 1).min(d)];
            for (k, v) in pw.iter().enumerate() {
                for (j, y) in x.iter().enumerate() {
                    if k + j < next.len() {
                        let t = mul(*v, *y);
                        next[k + j] = (next[k + j].0 + t.0, next[k + j].1 + t.1);
                    }
                }
            }
            pw = next;
        }
    }
    total
        .into_iter()
        .map(|(a, b)| {
            assert_eq!(b, 0);
            assert_eq!(a % 3, 0);
            a / 3
        })
        .collect()
}

#[test]
fn psi_examples_against_averaging() {
    let p = 3;
    let f6 = one_plus_t_pow(6, p);
    let expect = one_plus_t_pow(2, p);
    assert!(psi_act(&f6).unwrap().agrees_with(&expect, N));
    let f2 = one_plus_t_pow(2, p);
    assert!(psi_act(&f2).unwrap().is_negligible(0));

    for f in [vec![0, 0, 0, 0, 0, 0, 1], vec![3, -1, 4, 1, -5, 9, 2, 6], vec![1, 1, 1]] {
        let got = phi_act(&psi_act(&poly(&f, p)).unwrap()).unwrap();
        let want = poly(&averaged(&f), p);
        assert!(got.agrees_with(&want, N), "{f:?}");
    }
}

#[test]
fn psi_zero_basis_examples() {
    let p = 3;
    let b3 = psi_zero_basis(3, p, N).unwrap();
    assert!(b3.iter().any(|e| e.agrees_with(&one_plus_t_pow(1, p), N)));
    assert!(b3.iter().any(|e| e.agrees_with(&one_plus_t_pow(2, p), N)));
    for e in psi_zero_basis(9, p, N).unwrap() {
        assert!(psi_act(&e).unwrap().is_negligible(0));
    }
    // brute force: kernel of psi on polynomials of degree <= 6
    let d = 6;
    let cols: Vec<RobbaElement> = (0..=d)
        .map(|j| {
            let mut cs = vec![0; j + 1];
            cs[j] = 1;
            psi_act(&poly(&cs, p)).unwrap()
        })
        .collect();
    let m = Mat::from_fn(d / p as usize + 1, d + 1, |i, j| cols[j].coeff(i as i64).unwrap());
    let ker = d + 1 - rank(&m, 5);
    assert_eq!(psi_zero_basis(d, p, N).unwrap().len(), ker);
}

#[test]
fn log_one_plus_t_examples() {
    let p = 5;
    let t = log_one_plus_t(p, 30, N).unwrap();
    assert_eq!(t.coeff(1), Some(s(1, p)));
    let lhs = phi_act(&t).unwrap();
    assert!(lhs.sub(&t.scale(&s(5, p))).unwrap().is_negligible(5));
    let a = PadicScalar::from_i64(6, p, N + 10);
    let g = gamma_act(&t, &a).unwrap();
    assert!(g.sub(&t.scale(&s(6, p))).unwrap().is_negligible(5));
}

#[test]
fn text_record_round_trip() {
    let f = RobbaElement::new(5, -2, vec![s(3, 5), s(0, 5), s(50, 5), PadicScalar::from_ratio(1, 5, 5, N)], SubringTag::FullRobba, false, true).unwrap();
    let text = f.to_string();
    let back: RobbaElement = text.parse().unwrap();
    assert_eq!(back, f);
    assert!("p=5;tag=RPlus".parse::<RobbaElement>().is_err());
}

#[test]
fn tags_meet() {
    use SubringTag::*;
    assert_eq!(EPlus.meet(RPlus), RPlus);
    assert_eq!(EPlus.meet(EDagger), EDagger);
    assert_eq!(RPlus.meet(EDagger), FullRobba);
}
