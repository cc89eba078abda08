//! Instance files (TOML) and random integer instances.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::complex::{FreeComplex, SelmerInstance};
use super::ring::{Euclidean, Pid, QPoly, RingKind};
use super::snf::{smith, Matrix};
use super::SelmerError;

type Rows = Vec<Vec<toml::Value>>;

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    ranks: [usize; 4],
    d0: Rows,
    d1: Rows,
    d2: Rows,
}

#[derive(Serialize, Deserialize)]
struct ChainFile {
    phi0: Rows,
    phi1: Rows,
    phi2: Rows,
    phi3: Rows,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    ring: RingKind,
    source: ComplexFile,
    target: ComplexFile,
    chain: ChainFile,
}

/// An instance over either coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyInstance {
    Integers(SelmerInstance<BigInt>),
    Polynomials(SelmerInstance<QPoly>),
}

fn matrix<R: Pid>(rows: usize, cols: usize, v: &Rows, what: &str) -> Result<Matrix<R>, SelmerError> {
    let entries = v
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| match x {
                    toml::Value::Integer(n) => R::parse_element(&n.to_string()),
                    toml::Value::String(s) => R::parse_element(s),
                    other => Err(SelmerError::Parse(format!("{what}: unexpected entry {other}"))),
                })
                .collect::<Result<Vec<R>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    // an n x 0 matrix may be written as []
    if cols == 0 && entries.is_empty() {
        return Ok(Matrix::zero(rows, 0));
    }
    Matrix::from_rows(rows, cols, entries).ok_or_else(|| SelmerError::Shape(format!("{what} should be {rows}x{cols}")))
}

fn complex<R: Pid>(c: &ComplexFile, name: &str) -> Result<FreeComplex<R>, SelmerError> {
    let n = c.ranks;
    let d = [
        matrix(n[1], n[0], &c.d0, &format!("{name}.d0"))?,
        matrix(n[2], n[1], &c.d1, &format!("{name}.d1"))?,
        matrix(n[3], n[2], &c.d2, &format!("{name}.d2"))?,
    ];
    FreeComplex::new(n, d)
}

fn instance<R: Pid>(f: &InstanceFile) -> Result<SelmerInstance<R>, SelmerError> {
    let v: FreeComplex<R> = complex(&f.source, "source")?;
    let t: FreeComplex<R> = complex(&f.target, "target")?;
    let (a, b) = (v.ranks, t.ranks);
    let ch = &f.chain;
    let chain = [
        matrix(b[0], a[0], &ch.phi0, "chain.phi0")?,
        matrix(b[1], a[1], &ch.phi1, "chain.phi1")?,
        matrix(b[2], a[2], &ch.phi2, "chain.phi2")?,
        matrix(b[3], a[3], &ch.phi3, "chain.phi3")?,
    ];
    SelmerInstance::new(v, t, chain)
}

pub fn parse_instance(text: &str) -> Result<AnyInstance, SelmerError> {
    let f: InstanceFile = toml::from_str(text).map_err(|e| SelmerError::Parse(e.to_string()))?;
    Ok(match f.ring {
        RingKind::Integers => AnyInstance::Integers(instance(&f)?),
        RingKind::Polynomials => AnyInstance::Polynomials(instance(&f)?),
    })
}

fn rows_of<R: Pid>(m: &Matrix<R>) -> Rows {
    m.row_vecs()
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|x| match (R::KIND, x.to_string().parse::<BigInt>().ok().and_then(|n| n.to_i64())) {
                    (RingKind::Integers, Some(n)) => toml::Value::Integer(n),
                    _ => toml::Value::String(x.to_string()),
                })
                .collect()
        })
        .collect()
}

pub fn instance_to_toml<R: Pid>(inst: &SelmerInstance<R>) -> String {
    let cf = |c: &FreeComplex<R>| ComplexFile { ranks: c.ranks, d0: rows_of(&c.d[0]), d1: rows_of(&c.d[1]), d2: rows_of(&c.d[2]) };
    let f = InstanceFile {
        ring: R::KIND,
        source: cf(&inst.source),
        target: cf(&inst.target),
        chain: ChainFile {
            phi0: rows_of(&inst.chain[0]),
            phi1: rows_of(&inst.chain[1]),
            phi2: rows_of(&inst.chain[2]),
            phi3: rows_of(&inst.chain[3]),
        },
    };
    toml::to_string(&f).expect("instance serializes")
}

fn z(n: i64) -> BigInt {
    BigInt::from(n)
}

/// H^1 = Z on both sides, u = multiplication by 2: S(V) = 0 but S(V/2V) has dimension 1.
pub fn two_torsion_instance() -> SelmerInstance<BigInt> {
    let c = FreeComplex::new([0, 1, 0, 0], [Matrix::zero(1, 0), Matrix::zero(0, 1), Matrix::zero(0, 0)]).unwrap();
    let chain = [Matrix::zero(0, 0), Matrix::from_fn(1, 1, |_, _| z(2)), Matrix::zero(0, 0), Matrix::zero(0, 0)];
    SelmerInstance::new(c.clone(), c, chain).unwrap()
}

/// Free H^1 of rank n on both sides with u = diag(entries).
pub fn diagonal_instance<R: Euclidean>(entries: &[R]) -> SelmerInstance<R> {
    let n = entries.len();
    let c = FreeComplex::new([0, n, 0, 0], [Matrix::zero(n, 0), Matrix::zero(0, n), Matrix::zero(0, 0)]).unwrap();
    let u = Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { R::zero() });
    SelmerInstance::new(c.clone(), c, [Matrix::zero(0, 0), u, Matrix::zero(0, 0), Matrix::zero(0, 0)]).unwrap()
}

const DIVISORS: [i64; 10] = [1, 1, 1, 2, 3, 4, 5, 6, 7, 12];

/// Random unimodular n x n matrix and its inverse.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Matrix<BigInt>, Matrix<BigInt>) {
    let mut g = Matrix::identity(n);
    let mut g_inv = Matrix::identity(n);
    if n < 2 {
        return (g, g_inv);
    }
    for _ in 0..2 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = z(rng.gen_range(-2..=2));
        // E = I + c e_ij
        let e = Matrix::from_fn(n, n, |a, b| if a == b { z(1) } else if (a, b) == (i, j) { c.clone() } else { z(0) });
        let e_inv = Matrix::from_fn(n, n, |a, b| if a == b { z(1) } else if (a, b) == (i, j) { -c.clone() } else { z(0) });
        g = e.mul(&g);
        g_inv = g_inv.mul(&e_inv);
    }
    (g, g_inv)
}

/// Standard-form complex with random invariant factors, in a random basis.
fn random_complex(rng: &mut ChaCha8Rng) -> FreeComplex<BigInt> {
    let n = [rng.gen_range(0..=2), rng.gen_range(1..=3), rng.gen_range(0..=3), rng.gen_range(0..=2)];
    let r0 = rng.gen_range(0..=n[0].min(n[1]));
    let r1 = rng.gen_range(0..=(n[1] - r0).min(n[2]));
    let r2 = rng.gen_range(0..=(n[2] - r1).min(n[3]));
    let mut pick = || z(DIVISORS[rng.gen_range(0..DIVISORS.len())]);
    let mut d0 = Matrix::zero(n[1], n[0]);
    for j in 0..r0 {
        d0.set(j, j, pick());
    }
    let mut d1 = Matrix::zero(n[2], n[1]);
    for j in 0..r1 {
        d1.set(j, r0 + j, pick());
    }
    let mut d2 = Matrix::zero(n[3], n[2]);
    for j in 0..r2 {
        d2.set(j, r1 + j, pick());
    }
    let g: Vec<_> = n.iter().map(|&k| unimodular(rng, k)).collect();
    let d = [
        g[1].0.mul(&d0).mul(&g[0].1),
        g[2].0.mul(&d1).mul(&g[1].1),
        g[3].0.mul(&d2).mul(&g[2].1),
    ];
    FreeComplex::new(n, d).expect("conjugated standard complex")
}

/// Random element of the lattice of chain maps source -> target.
fn random_chain_map(rng: &mut ChaCha8Rng, v: &FreeComplex<BigInt>, t: &FreeComplex<BigInt>) -> [Matrix<BigInt>; 4] {
    let (a, b) = (v.ranks, t.ranks);
    let mut offset = [0; 5];
    for i in 0..4 {
        offset[i + 1] = offset[i] + b[i] * a[i];
    }
    let var = |i: usize, r: usize, c: usize| offset[i] + r * a[i] + c;
    let mut eqs: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..3 {
        for r in 0..b[i + 1] {
            for c in 0..a[i] {
                let mut row = vec![z(0); offset[4]];
                for k in 0..a[i + 1] {
                    row[var(i + 1, r, k)] += v.d[i].get(k, c);
                }
                for k in 0..b[i] {
                    row[var(i, k, c)] -= t.d[i].get(r, k);
                }
                eqs.push(row);
            }
        }
    }
    let sys = Matrix::from_rows(eqs.len(), offset[4], eqs).unwrap();
    let ker = smith(&sys).kernel();
    let mut x = vec![z(0); offset[4]];
    for j in 0..ker.cols() {
        let c = z(rng.gen_range(-2..=2));
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += &c * ker.get(i, j);
        }
    }
    std::array::from_fn(|i| Matrix::from_fn(b[i], a[i], |r, c| x[var(i, r, c)].clone()))
}

/// Deterministic random integer instance.
pub fn random_instance(seed: u64) -> SelmerInstance<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_complex(&mut rng);
    let t = random_complex(&mut rng);
    let chain = random_chain_map(&mut rng, &v, &t);
    SelmerInstance::new(v, t, chain).expect("solutions of the chain-map equations commute")
}
