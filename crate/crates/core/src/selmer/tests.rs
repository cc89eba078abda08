use num_bigint::BigInt;
use num_integer::Integer;

use super::*;

fn z(n: i64) -> BigInt {
    BigInt::from(n)
}

fn zm(rows: usize, cols: usize, e: &[i64]) -> Matrix<BigInt> {
    Matrix::from_fn(rows, cols, |i, j| z(e[i * cols + j]))
}

fn two_term(d0: Matrix<BigInt>) -> FreeComplex<BigInt> {
    let (n1, n0) = (d0.rows(), d0.cols());
    FreeComplex::new([n0, n1, 0, 0], [d0, Matrix::zero(0, n1), Matrix::zero(0, 0)]).unwrap()
}

#[test]
fn cohomology_examples() {
    let c = two_term(zm(1, 1, &[2]));
    let h1 = cohomology(&c, 1).unwrap();
    assert_eq!((h1.free_rank, h1.torsion.clone()), (0, vec![z(2)]));
    assert_eq!(cohomology(&c, 0).unwrap().free_rank, 0);
    let free = two_term(Matrix::zero(3, 0));
    assert_eq!(cohomology(&free, 1).unwrap(), CohomologySummary { free_rank: 3, torsion: vec![] });
    assert!(cohomology(&free, 4).is_err());
}

/// gcd of the k x k minors, for tiny matrices
fn minor_gcd(a: &Matrix<BigInt>, k: usize) -> BigInt {
    fn det(m: &[Vec<BigInt>]) -> BigInt {
        if m.is_empty() {
            return z(1);
        }
        let mut acc = z(0);
        for j in 0..m.len() {
            let sub: Vec<Vec<BigInt>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
            let t = &m[0][j] * det(&sub);
            acc = if j % 2 == 0 { acc + t } else { acc - t };
        }
        acc
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
    }
    let mut g = z(0);
    for rs in subsets(a.rows(), k) {
        for cs in subsets(a.cols(), k) {
            let m: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| a.get(i, j).clone()).collect()).collect();
            g = g.gcd(&det(&m));
        }
    }
    g
}

#[test]
fn random_complexes_match_elimination_and_minors() {
    for seed in 0..40 {
        let inst = random_instance(seed);
        let c = &inst.source;
        for i in 0..4 {
            let h = cohomology(c, i).unwrap();
            let q = |m: &Matrix<BigInt>| field_rank(&m.map(|x| NumberFieldElt { a: x.clone().into(), b: num_rational::BigRational::from_integer(z(0)), modulus: None }));
            let rk_out = q(&c.differential(i as i64));
            let inc = c.differential(i as i64 - 1);
            let rk_in = q(&inc);
            assert_eq!(h.free_rank, c.ranks[i] - rk_out - rk_in, "seed {seed} degree {i}");
            let prod = h.torsion.iter().fold(z(1), |a, b| a * b);
            assert_eq!(prod, minor_gcd(&inc, rk_in), "seed {seed} degree {i}");
            for w in h.torsion.windows(2) {
                assert!(Euclidean::divides(&w[0], &w[1]));
            }
        }
    }
}

#[test]
fn selmer_kernel_examples() {
    assert_eq!(selmer_kernel(&diagonal_instance(&[z(1), z(1)])).unwrap().free_rank, 0);
    let zero = selmer_kernel(&diagonal_instance(&[z(0), z(0), z(0)])).unwrap();
    assert_eq!(zero.free_rank, 3);
    assert_eq!(selmer_kernel(&diagonal_instance(&[z(2), z(3), z(0)])).unwrap().free_rank, 1);
}

#[test]
fn two_torsion_jump() {
    let inst = two_torsion_instance();
    assert_eq!(selmer_kernel(&inst).unwrap().free_rank, 0);
    assert_eq!(specialize(&inst, &z(2)).unwrap().dim_selmer, 1);
    assert_eq!(specialize(&inst, &z(3)).unwrap().dim_selmer, 0);
    let r = semicontinuity_experiment(&inst, &primes_below(50)).unwrap();
    assert_eq!(r.observed_exceptional, vec!["2"]);
    assert!(r.ok());
    match form1_check(&inst, &z(2)).unwrap() {
        Form1Report::Checked { cokernel_dim, coker_u_f_torsion, injective, .. } => {
            assert_eq!((cokernel_dim, coker_u_f_torsion), (1, 1));
            assert!(injective);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn diagonal_one_six() {
    let inst = diagonal_instance(&[z(1), z(6)]);
    let r = semicontinuity_experiment(&inst, &primes_below(100)).unwrap();
    assert_eq!(r.generic_rank, 0);
    assert_eq!(r.observed_exceptional, vec!["2", "3"]);
    assert!(r.ok());
    let none = semicontinuity_experiment(&diagonal_instance(&[z(0), z(0)]), &primes_below(100)).unwrap();
    assert!(none.observed_exceptional.is_empty() && none.rows.iter().all(|row| row.dim_selmer_f == 2));
}

#[test]
fn precondition_failure_is_reported() {
    // V'^0 = Z with d0' = 0, so H^0(V'/fV') = R/f
    let v = two_term(Matrix::zero(1, 0));
    let t = two_term(Matrix::zero(1, 1));
    let inst = SelmerInstance::new(v, t, [Matrix::zero(1, 0), zm(1, 1, &[1]), Matrix::zero(0, 0), Matrix::zero(0, 0)]).unwrap();
    assert!(matches!(form1_check(&inst, &z(5)).unwrap(), Form1Report::PreconditionFailed { h0_target: 1, .. }));
}

#[test]
fn bad_inputs_are_rejected() {
    let d1 = zm(1, 1, &[1]);
    let d0 = zm(1, 1, &[1]);
    assert!(matches!(FreeComplex::new([1, 1, 1, 0], [d0, d1, Matrix::zero(0, 1)]), Err(SelmerError::NotAComplex(0))));
    let c = two_term(Matrix::zero(1, 0));
    let bad = SelmerInstance::new(two_term(zm(1, 1, &[1])), c, [Matrix::zero(0, 1), zm(1, 1, &[1]), Matrix::zero(0, 0), Matrix::zero(0, 0)]);
    assert!(matches!(bad, Err(SelmerError::NotAChainMap(0))));
    assert!(specialize(&two_torsion_instance(), &z(4)).is_err());
}

#[test]
fn polynomial_instance() {
    let f = parse_poly("x^2 + 1").unwrap();
    let inst = diagonal_instance(&[f.clone(), parse_poly("x - 1").unwrap().mul(&parse_poly("x").unwrap())]);
    let primes: Vec<QPoly> = ["x", "x - 1", "x + 1", "x^2 + 1", "x^2 + 2", "x^2 - 2"].iter().map(|s| parse_poly(s).unwrap()).collect();
    let r = semicontinuity_experiment(&inst, &primes).unwrap();
    assert_eq!(r.generic_rank, 0);
    assert_eq!(r.observed_exceptional, vec!["x", "x - 1", "x^2 + 1"]);
    assert!(r.ok());
}

#[test]
fn instance_files_round_trip() {
    for seed in [1, 7, 19] {
        let inst = random_instance(seed);
        let text = instance_to_toml(&inst);
        assert_eq!(parse_instance(&text).unwrap(), AnyInstance::Integers(inst));
    }
    let poly = diagonal_instance(&[parse_poly("x^2 + 1").unwrap()]);
    assert_eq!(parse_instance(&instance_to_toml(&poly)).unwrap(), AnyInstance::Polynomials(poly));
    assert!(parse_instance("ring = \"integers\"").is_err());
}

#[test]
fn smith_is_canonical() {
    let a = zm(3, 3, &[4, 6, 2, 8, 10, 14, 6, 0, 2]);
    let perm = zm(3, 3, &[0, 1, 0, 0, 0, 1, 1, 0, 0]);
    let d1 = smith(&a).diag;
    assert_eq!(smith(&perm.mul(&a)).diag, d1);
    assert_eq!(smith(&a.mul(&perm)).diag, d1);
    assert_eq!(smith(&a.transpose()).diag, d1);
}
