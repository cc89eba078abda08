use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{RobbaElement, RobbaError, SubringTag, MAX_WINDOW};
use crate::padic::PadicScalar;

fn floor_log(p: u32, n: i64) -> i64 {
    let mut k = 0;
    let mut m = p as i64;
    while m <= n {
        m *= p as i64;
        k += 1;
    }
    k
}

/// Truncated product of integer polynomials modulo `m`.
fn poly_mul_mod(a: &[BigUint], b: &[BigUint], m: &BigUint, deg: usize) -> Vec<BigUint> {
    let n = (a.len() + b.len() - 1).min(deg + 1);
    let mut out = vec![BigUint::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    for c in out.iter_mut() {
        *c %= m;
    }
    out
}

type PolyTable = Arc<Vec<Vec<PadicScalar>>>;

fn table_cache() -> &'static Mutex<HashMap<(u32, usize, usize, i64), PolyTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize, usize, i64), PolyTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// phi(T)^i = ((1+T)^p - 1)^i truncated at degree `deg`, for 0 <= i <= n, exact to `prec` digits.
pub fn phi_power_table(p: u32, n: usize, deg: usize, prec: i64) -> PolyTable {
    let key = (p, n, deg, prec);
    if let Some(t) = table_cache().lock().unwrap().get(&key) {
        return t.clone();
    }
    assert!(prec > 0, "phi table at precision {prec}");
    let m = BigUint::from(p).pow(prec as u32);
    let phi_t: Vec<BigUint> = (0..=p as usize)
        .map(|k| if k == 0 { BigUint::zero() } else { binom(p as u64, k as u64) })
        .collect();
    let mut cur = vec![BigUint::one()];
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            cur = poly_mul_mod(&cur, &phi_t, &m, deg);
        }
        rows.push(
            cur.iter()
                .map(|c| PadicScalar::from_bigint(&BigInt::from(c.clone()), p, prec))
                .collect::<Vec<_>>(),
        );
    }
    let t = Arc::new(rows);
    table_cache().lock().unwrap().insert(key, t.clone());
    t
}

pub(crate) fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn binom_big(n: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        if *n < BigUint::from(i + 1) {
            return BigUint::zero();
        }
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Precision the stored constants need so they never limit a product with `f`.
fn working_precision(f: &RobbaElement) -> i64 {
    let need = f
        .coeffs()
        .iter()
        .map(|c| c.abs_precision() - c.valuation().unwrap_or(0).min(0))
        .max()
        .unwrap();
    (need + 8 + 7) / 8 * 8
}

pub fn phi_act(f: &RobbaElement) -> Result<RobbaElement, RobbaError> {
    let p = f.prime();
    let pi = p as i64;
    let (lo, hi) = f.window();
    if !f.closed_above() && hi < 0 {
        return Err(RobbaError::EmptyWindow);
    }
    let prec = f.precision();
    if prec <= 0 {
        return Err(RobbaError::Invalid(format!("no p-adic digits left (precision {prec})")));
    }
    let work = working_precision(f);
    let out_hi = if f.closed_above() { (pi * hi).max(hi) } else { hi };

    let neg_vmin = f
        .coeffs()
        .iter()
        .take(((-lo).max(0) as usize).min(f.coeffs().len()))
        .filter_map(|c| c.valuation())
        .min()
        .unwrap_or(0)
        .min(0);
    let tail = (pi - 1) * (prec - neg_vmin).max(1);
    let out_lo = if lo >= 0 {
        lo
    } else if f.closed_below() {
        pi * lo - tail
    } else {
        pi * lo
    };
    let len = (out_hi - out_lo + 1).max(1) as usize;
    if len > MAX_WINDOW {
        return Err(RobbaError::WindowOverflow(len));
    }
    let zero = PadicScalar::zero(p, prec + 64);
    let mut out = vec![zero.clone(); len];

    // non-negative indices: sum a_i phi(T)^i
    if hi >= 0 {
        let i0 = lo.max(0);
        let table = phi_power_table(p, hi as usize, out_hi.max(0) as usize, work);
        for i in i0..=hi {
            let a = &f.coeffs()[(i - lo) as usize];
            for (d, c) in table[i as usize].iter().enumerate() {
                if d as i64 > out_hi {
                    break;
                }
                if (d as i64) < out_lo {
                    continue;
                }
                let idx = (d as i64 - out_lo) as usize;
                out[idx] = out[idx].add_ref(&a.mul_ref(c));
            }
        }
    }

    // negative indices, in u = 1/T: phi(u^j) = (u^p G(u))^j with G = 1/(1 + w(u))
    if lo < 0 {
        let m = (-lo) as usize;
        let top_j = if hi < 0 { (-hi) as usize } else { 1 };
        let deg = (pi * m as i64 + tail) as usize;
        let modulus = BigUint::from(p).pow(work as u32);
        // 1 + w(u) = sum_{k=0}^{p} C(p,k) u^(p-k) (without the T^p factor)
        let mut one_plus_w = vec![BigUint::zero(); p as usize];
        for k in 1..=p as u64 {
            one_plus_w[(p as u64 - k) as usize] = binom(p as u64, k);
        }
        let g = series_inverse_mod(&one_plus_w, &modulus, deg);
        let mut h = vec![BigUint::zero(); p as usize];
        h.extend(g);
        h.truncate(deg + 1);
        let h: Vec<PadicScalar> = h.iter().map(|c| PadicScalar::from_bigint(&BigInt::from(c.clone()), p, work)).collect();
        let coeff_at = |j: usize| -> PadicScalar {
            let idx = -(j as i64);
            if idx < lo {
                PadicScalar::zero(p, prec + 64)
            } else if idx > hi {
                PadicScalar::zero(p, prec + 64)
            } else {
                f.coeffs()[(idx - lo) as usize].clone()
            }
        };
        // Horner in H = u^p G
        let mut acc: Vec<PadicScalar> = vec![coeff_at(m)];
        for j in (top_j..m).rev() {
            acc = series_mul(&acc, &h, deg, &zero);
            acc[0] = acc[0].add_ref(&coeff_at(j));
        }
        acc = series_mul(&acc, &h, deg, &zero);
        for _ in 1..top_j {
            acc = series_mul(&acc, &h, deg, &zero);
        }
        for (e, c) in acc.iter().enumerate() {
            let idx = -(e as i64);
            if idx < out_lo || idx > out_hi {
                continue;
            }
            let k = (idx - out_lo) as usize;
            out[k] = out[k].add_ref(c);
        }
    }

    let out: Vec<PadicScalar> = out.into_iter().map(|c| c.truncate(prec)).collect();
    let mut r = RobbaElement::new(p, out_lo, out, f.tag(), f.closed_below(), f.closed_above())?;
    r.floor = f.floor();
    Ok(r)
}

fn series_mul(a: &[PadicScalar], b: &[PadicScalar], deg: usize, zero: &PadicScalar) -> Vec<PadicScalar> {
    let n = (a.len() + b.len() - 1).min(deg + 1);
    let mut out = vec![zero.clone(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
        }
    }
    out
}

/// 1/s modulo (modulus, u^(deg+1)); s[0] must be 1.
fn series_inverse_mod(s: &[BigUint], m: &BigUint, deg: usize) -> Vec<BigUint> {
    assert!(s[0].is_one());
    let mut inv = vec![BigUint::zero(); deg + 1];
    inv[0] = BigUint::one();
    for n in 1..=deg {
        let mut acc = BigUint::zero();
        for k in 1..s.len().min(n + 1) {
            acc += &s[k] * &inv[n - k];
        }
        acc %= m;
        inv[n] = if acc.is_zero() { acc } else { m - acc };
    }
    inv
}

/// Coefficients of (1+T)^A, A a non-negative integer, with powers of (1+T)^A - 1.
pub struct BinomialSeries {
    p: u32,
    prec: i64,
    coeffs: Vec<PadicScalar>,
    powers: OnceLock<Vec<Vec<PadicScalar>>>,
}

impl BinomialSeries {
    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// ((1+T)^A - 1)^i for i <= degree, truncated at the same degree.
    pub fn power_table(&self) -> &[Vec<PadicScalar>] {
        self.powers.get_or_init(|| {
            let k = self.degree();
            let zero = PadicScalar::zero(self.p, self.prec + 64);
            let mut y = self.coeffs.clone();
            y[0] = PadicScalar::zero(self.p, self.prec);
            let mut rows = Vec::with_capacity(k + 1);
            let mut cur = vec![PadicScalar::one(self.p, self.prec)];
            for i in 0..=k {
                if i > 0 {
                    cur = series_mul(&cur, &y, k, &zero)
                        .into_iter()
                        .map(|c| c.truncate(self.prec))
                        .collect();
                }
                rows.push(cur.clone());
            }
            rows
        })
    }
}

type SeriesCache = Mutex<HashMap<(u32, BigUint, usize, i64), Arc<BinomialSeries>>>;

fn binomial_cache() -> &'static SeriesCache {
    static CACHE: OnceLock<SeriesCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// (1+T)^a for a in Z_p, through degree k, to `prec` digits, via a mod p^m.
pub fn binomial_series(a: &PadicScalar, k: usize, prec: i64) -> Result<Arc<BinomialSeries>, RobbaError> {
    let p = a.prime();
    if a.valuation().is_some_and(|v| v < 0) {
        return Err(RobbaError::Invalid(format!("exponent {a} is not in Z_p")));
    }
    let lg = floor_log(p, k.max(1) as i64);
    // the discarded factor (1+T)^(p^m u) - 1 has coefficients of valuation >= m - log_p k
    let m = prec + lg + 1;
    if a.abs_precision() < m {
        return Err(RobbaError::ApproximationNotConverged(format!(
            "exponent known to {} digits, need {m} for {prec} digits through degree {k}",
            a.abs_precision()
        )));
    }
    let big_a = a.to_biguint().unwrap() % BigUint::from(p).pow(m as u32);
    let key = (p, big_a.clone(), k, prec);
    if let Some(s) = binomial_cache().lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let modulus = BigUint::from(p).pow(prec as u32);
    let coeffs = (0..=k as u64)
        .map(|n| {
            let c = binom_big(&big_a, n) % &modulus;
            PadicScalar::from_bigint(&BigInt::from(c), p, prec)
        })
        .collect();
    let s = Arc::new(BinomialSeries { p, prec, coeffs, powers: OnceLock::new() });
    binomial_cache().lock().unwrap().insert(key, s.clone());
    Ok(s)
}

/// T -> (1+T)^a - 1 on R+ / E+ data.
pub fn gamma_act(f: &RobbaElement, a: &PadicScalar) -> Result<RobbaElement, RobbaError> {
    if !f.tag().nonnegative() {
        return Err(RobbaError::UnsupportedTag(f.tag()));
    }
    if !a.is_unit() {
        return Err(RobbaError::Invalid(format!("gamma needs a unit exponent, got {a}")));
    }
    let p = f.prime();
    let (lo, hi) = f.window();
    let k = hi.max(0) as usize;
    let lg = floor_log(p, k.max(1) as i64);
    let prec = f.precision().min(a.abs_precision() - lg - 1);
    if prec < 1 {
        return Err(RobbaError::ApproximationNotConverged(format!(
            "exponent precision {} too small for degree {k}",
            a.abs_precision()
        )));
    }
    let work = working_precision(f).max(prec);
    let a_work = a.truncate(work + lg + 1);
    let series = match binomial_series(&a_work, k, work) {
        Ok(s) => s,
        Err(_) => binomial_series(a, k, prec)?,
    };
    let table = series.power_table();
    let zero = PadicScalar::zero(p, work + 64);
    let mut out = vec![zero; k + 1];
    for i in lo..=hi {
        let c = &f.coeffs()[(i - lo) as usize];
        for (d, y) in table[i as usize].iter().enumerate() {
            out[d] = out[d].add_ref(&c.mul_ref(y));
        }
    }
    let out: Vec<PadicScalar> = out.into_iter().map(|c| c.truncate(prec)).collect();
    let mut r = RobbaElement::new(p, 0, out, f.tag(), true, false)?;
    r.floor = f.floor();
    Ok(r)
}

/// Left inverse of phi on polynomials, through the (1+T)-basis.
pub fn psi_act(f: &RobbaElement) -> Result<RobbaElement, RobbaError> {
    if !f.tag().nonnegative() {
        return Err(RobbaError::UnsupportedTag(f.tag()));
    }
    if !f.closed_above() {
        return Err(RobbaError::NotPolynomial);
    }
    let p = f.prime();
    let (lo, hi) = f.window();
    let d = hi as usize;
    let prec = f.precision();
    let work = working_precision(f);
    let coeff = |j: usize| -> PadicScalar {
        if (j as i64) < lo { PadicScalar::zero(p, prec + 64) } else { f.coeffs()[j - lo as usize].clone() }
    };
    let b = |n: usize, k: usize| PadicScalar::from_bigint(&BigInt::from(binom(n as u64, k as u64)), p, work);
    // f = sum_n c_n (1+T)^n
    let c: Vec<PadicScalar> = (0..=d)
        .map(|n| {
            let mut acc = PadicScalar::zero(p, prec + 64);
            for j in n..=d {
                let term = coeff(j).mul_ref(&b(j, n));
                acc = if (j - n) % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
            }
            acc
        })
        .collect();
    let top = d / p as usize;
    let dm: Vec<&PadicScalar> = (0..=top).map(|m| &c[m * p as usize]).collect();
    let out: Vec<PadicScalar> = (0..=top)
        .map(|k| {
            let mut acc = PadicScalar::zero(p, prec + 64);
            for (m, x) in dm.iter().enumerate().skip(k) {
                acc = acc.add_ref(&x.mul_ref(&b(m, k)));
            }
            acc.truncate(prec)
        })
        .collect();
    let mut r = RobbaElement::new(p, 0, out, f.tag(), true, true)?;
    r.floor = f.floor();
    Ok(r)
}

/// (1+T)^i phi((1+T)^m), 1 <= i <= p-1, of degree at most `degree_bound`.
pub fn psi_zero_basis(degree_bound: usize, p: u32, prec: i64) -> Result<Vec<RobbaElement>, RobbaError> {
    if degree_bound < p as usize {
        return Err(RobbaError::Invalid(format!("degree bound {degree_bound} below p = {p}")));
    }
    let one_plus_t = |e: usize| -> Result<RobbaElement, RobbaError> {
        let cs = (0..=e)
            .map(|k| PadicScalar::from_bigint(&BigInt::from(binom(e as u64, k as u64)), p, prec))
            .collect();
        RobbaElement::polynomial(p, cs)
    };
    let mut out = Vec::new();
    for m in 0..=degree_bound / p as usize {
        let phi_part = phi_act(&one_plus_t(m)?)?;
        for i in 1..p as usize {
            if i + p as usize * m > degree_bound {
                break;
            }
            out.push(one_plus_t(i)?.mul(&phi_part)?);
        }
    }
    Ok(out)
}

/// t = log(1+T) through degree k.
pub fn log_one_plus_t(p: u32, k: usize, prec: i64) -> Result<RobbaElement, RobbaError> {
    if k < 1 {
        return Err(RobbaError::Invalid("log(1+T) needs a window of at least one term".into()));
    }
    let cs = (0..=k as i64)
        .map(|n| {
            if n == 0 {
                PadicScalar::zero(p, prec)
            } else {
                let sign = if n % 2 == 1 { 1 } else { -1 };
                PadicScalar::from_ratio(sign, n, p, prec)
            }
        })
        .collect();
    RobbaElement::new(p, 0, cs, SubringTag::RPlus, true, false)
}
