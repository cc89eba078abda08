//! Q_p at fixed absolute precision, plus quadratic extensions.

mod field;
mod newton;
mod quadratic;
mod series;

use std::cell::RefCell;
use std::cmp::min;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::PadicField;
pub use newton::{hensel_root, newton_slopes};
pub use quadratic::QuadraticScalar;
pub use series::{padic_exp, padic_log, padic_pow, teichmuller};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("division by an element that is zero at precision {0}")]
    DivisionByZeroAtPrecision(i64),
    #[error("mixed primes {0} and {1}")]
    PrimeMismatch(u32, u32),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("no Hensel lift: {0}")]
    NoLift(String),
    #[error("outside domain: {0}")]
    DomainError(String),
    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),
}

/// Absolute precision, guard digits and integer-recognition window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub abs_precision: i64,
    pub guard_digits: i64,
    pub integer_window: i64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { abs_precision: 30, guard_digits: 5, integer_window: 100 }
    }
}

impl PrecisionPolicy {
    pub fn new(abs_precision: i64, guard_digits: i64, integer_window: i64) -> Result<Self, PadicError> {
        if !(0 < guard_digits && guard_digits < abs_precision) {
            return Err(PadicError::InvalidPolicy(format!(
                "need 0 < g < N, got g={guard_digits}, N={abs_precision}"
            )));
        }
        if integer_window < 1 {
            return Err(PadicError::InvalidPolicy(format!("need w >= 1, got {integer_window}")));
        }
        Ok(PrecisionPolicy { abs_precision, guard_digits, integer_window })
    }

    /// Digits that must vanish before a quantity counts as zero.
    pub fn zero_threshold(&self) -> i64 {
        self.abs_precision - self.guard_digits
    }

    /// Same policy with N raised by `extra` digits.
    pub fn refined(&self, extra: i64) -> Self {
        PrecisionPolicy { abs_precision: self.abs_precision + extra, ..*self }
    }
}

thread_local! {
    static POWERS: RefCell<HashMap<(u32, u32), Rc<BigUint>>> = RefCell::new(HashMap::new());
}

/// p^e, memoized per thread.
pub(crate) fn ppow(p: u32, e: i64) -> Rc<BigUint> {
    assert!(e >= 0, "negative exponent {e}");
    let e = e as u32;
    POWERS.with(|cell| {
        let mut map = cell.borrow_mut();
        map.entry((p, e)).or_insert_with(|| Rc::new(BigUint::from(p).pow(e))).clone()
    })
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits n = p^v * u with p not dividing u. n must be non-zero.
fn split_p(n: &BigUint, p: u32) -> (i64, BigUint) {
    let pb = BigUint::from(p);
    let mut v = 0;
    let mut u = n.clone();
    loop {
        let (q, r) = u.div_rem(&pb);
        if !r.is_zero() {
            return (v, u);
        }
        u = q;
        v += 1;
    }
}

/// An element of Q_p known modulo p^N.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u32,
    prec: i64,
    /// `None` means zero at precision.
    val: Option<i64>,
    /// unit part modulo p^(prec - val)
    unit: BigUint,
}

impl PadicScalar {
    pub fn zero(p: u32, prec: i64) -> Self {
        PadicScalar { p, prec, val: None, unit: BigUint::zero() }
    }

    pub fn one(p: u32, prec: i64) -> Self {
        Self::from_i64(1, p, prec)
    }

    pub fn from_i64(n: i64, p: u32, prec: i64) -> Self {
        Self::from_bigint(&BigInt::from(n), p, prec)
    }

    pub fn from_bigint(n: &BigInt, p: u32, prec: i64) -> Self {
        if n.is_zero() {
            return Self::zero(p, prec);
        }
        let (v, u) = split_p(n.magnitude(), p);
        if v >= prec {
            return Self::zero(p, prec);
        }
        let m = ppow(p, prec - v);
        let mut unit = u % &*m;
        if n.sign() == Sign::Minus {
            unit = &*m - unit;
        }
        PadicScalar { p, prec, val: Some(v), unit }
    }

    pub fn from_rational(q: &BigRational, p: u32, prec: i64) -> Self {
        if q.numer().is_zero() {
            return Self::zero(p, prec);
        }
        let (vn, un) = split_p(q.numer().magnitude(), p);
        let (vd, ud) = split_p(q.denom().magnitude(), p);
        let v = vn - vd;
        if v >= prec {
            return Self::zero(p, prec);
        }
        let m = ppow(p, prec - v);
        let inv = (ud % &*m).modinv(&m).expect("p-free denominator is invertible");
        let mut unit = (un * inv) % &*m;
        if q.is_negative() {
            unit = (&*m - unit) % &*m;
        }
        PadicScalar { p, prec, val: Some(v), unit }
    }

    pub fn from_ratio(num: i64, den: i64, p: u32, prec: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), p, prec)
    }

    /// Builds p^val * unit from raw parts; `unit` is reduced and p-stripped.
    pub fn from_parts(p: u32, val: i64, unit: BigUint, prec: i64) -> Self {
        Self::normalized(p, prec, val, unit)
    }

    fn normalized(p: u32, prec: i64, base_val: i64, digits: BigUint) -> Self {
        if base_val >= prec {
            return Self::zero(p, prec);
        }
        let digits = digits % &*ppow(p, prec - base_val);
        if digits.is_zero() {
            return Self::zero(p, prec);
        }
        let (dv, u) = split_p(&digits, p);
        let v = base_val + dv;
        if v >= prec {
            return Self::zero(p, prec);
        }
        PadicScalar { p, prec, val: Some(v), unit: u }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    pub fn abs_precision(&self) -> i64 {
        self.prec
    }

    pub fn unit_digits(&self) -> &BigUint {
        &self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    /// Valuation, with zero-at-precision read as its precision.
    fn val_or_prec(&self) -> i64 {
        self.val.unwrap_or(self.prec)
    }

    /// Zero for rank decisions: valuation at least prec - guard.
    pub fn is_negligible(&self, guard: i64) -> bool {
        match self.val {
            None => true,
            Some(v) => v >= self.prec - guard,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.val == Some(0)
    }

    /// Truncates to lower precision, or pads with zero digits when raising.
    /// Padding asserts knowledge we may not have; only for exact inputs.
    pub fn with_precision(&self, prec: i64) -> Self {
        match self.val {
            None => Self::zero(self.p, prec),
            Some(v) if v >= prec => Self::zero(self.p, prec),
            Some(v) => {
                let unit = if prec <= self.prec {
                    &self.unit % &*ppow(self.p, prec - v)
                } else {
                    self.unit.clone()
                };
                PadicScalar { p: self.p, prec, val: Some(v), unit }
            }
        }
    }

    /// Truncation only: never raises precision.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            self.clone()
        } else {
            self.with_precision(prec)
        }
    }

    fn check_prime(&self, o: &Self) {
        assert_eq!(self.p, o.p, "{}", PadicError::PrimeMismatch(self.p, o.p));
    }

    fn scaled_digits(&self, base: i64) -> BigUint {
        match self.val {
            None => BigUint::zero(),
            Some(v) => &self.unit * &*ppow(self.p, v - base),
        }
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        self.check_prime(o);
        let prec = min(self.prec, o.prec);
        let (vx, vy) = (self.val_or_prec(), o.val_or_prec());
        let base = min(vx, vy);
        if base >= prec {
            return Self::zero(self.p, prec);
        }
        let s = self.scaled_digits(base) + o.scaled_digits(base);
        Self::normalized(self.p, prec, base, s)
    }

    pub fn neg_ref(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => {
                let m = ppow(self.p, self.prec - v);
                PadicScalar { p: self.p, prec: self.prec, val: Some(v), unit: &*m - &self.unit }
            }
        }
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        self.check_prime(o);
        let prec = min(self.prec + o.val_or_prec(), o.prec + self.val_or_prec());
        match (self.val, o.val) {
            (Some(vx), Some(vy)) => {
                let v = vx + vy;
                if v >= prec {
                    return Self::zero(self.p, prec);
                }
                let unit = (&self.unit * &o.unit) % &*ppow(self.p, prec - v);
                PadicScalar { p: self.p, prec, val: Some(v), unit }
            }
            _ => Self::zero(self.p, prec),
        }
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        let v = self.val.ok_or(PadicError::DivisionByZeroAtPrecision(self.prec))?;
        let rel = self.prec - v;
        let m = ppow(self.p, rel);
        let unit = self.unit.modinv(&m).expect("unit is invertible");
        Ok(PadicScalar { p: self.p, prec: rel - v, val: Some(-v), unit })
    }

    pub fn div_ref(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul_ref(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, PadicError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(self.p, self.prec);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(acc)
    }

    /// Integer representative in [0, p^prec), for valuation >= 0.
    pub fn to_biguint(&self) -> Option<BigUint> {
        match self.val {
            None => Some(BigUint::zero()),
            Some(v) if v < 0 => None,
            Some(v) => Some(&self.unit * &*ppow(self.p, v)),
        }
    }

    /// Representative of least absolute value modulo p^k (requires k <= prec, val >= 0).
    pub fn symmetric_residue(&self, k: i64) -> Option<BigInt> {
        if k > self.prec {
            return None;
        }
        let r = self.to_biguint()? % &*ppow(self.p, k);
        let m = ppow(self.p, k);
        let r = BigInt::from(r);
        let half = BigInt::from((*m).clone() >> 1);
        Some(if r > half { r - BigInt::from((*m).clone()) } else { r })
    }

    /// Residue modulo p, for integral values.
    pub fn residue(&self) -> Option<u64> {
        let r = self.to_biguint()? % BigUint::from(self.p);
        r.to_u64()
    }

    /// The integer n with |n| <= window agreeing with self modulo p^digits.
    pub fn as_small_integer(&self, digits: i64, window: i64) -> Option<i64> {
        let r = self.symmetric_residue(digits)?;
        let n = r.to_i64()?;
        (n.abs() <= window).then_some(n)
    }

    /// Valuation of self - other, None when equal at precision.
    pub fn distance_val(&self, o: &Self) -> Option<i64> {
        self.sub_ref(o).val
    }

    pub fn same_at(&self, o: &Self, digits: i64) -> bool {
        match self.distance_val(o) {
            None => true,
            Some(v) => v >= digits,
        }
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "O({}^{})", self.p, self.prec),
            Some(0) => write!(f, "{} + O({}^{})", self.unit, self.p, self.prec),
            Some(v) => write!(f, "{}^{}*{} + O({}^{})", self.p, v, self.unit, self.p, self.prec),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $m(self, o: &PadicScalar) -> PadicScalar {
                self.$inner(o)
            }
        }
        impl $tr<PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, o: PadicScalar) -> PadicScalar {
                self.$inner(&o)
            }
        }
    };
}
forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        self.neg_ref()
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        self.neg_ref()
    }
}

/// Legendre symbol style test: is the unit `u` a square modulo p?
pub(crate) fn is_qr_mod_p(u: &BigUint, p: u32) -> bool {
    let pb = BigUint::from(p);
    let r = u % &pb;
    if r.is_zero() {
        return true;
    }
    r.modpow(&BigUint::from((p - 1) / 2), &pb).is_one()
}

/// Is the integer d a square in Q_p (p odd)?
pub fn is_square_in_qp(d: &BigInt, p: u32) -> bool {
    if d.is_zero() {
        return true;
    }
    let (v, u) = split_p(d.magnitude(), p);
    if v % 2 != 0 {
        return false;
    }
    let pb = BigInt::from(p);
    let u = BigInt::from(u);
    let u = if d.is_negative() { (-u).mod_floor(&pb) } else { u.mod_floor(&pb) };
    is_qr_mod_p(&u.to_biguint().unwrap(), p)
}

/// Lifts the p-adic valuation of a rational number.
pub fn rational_valuation(q: &BigRational, p: u32) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let (vn, _) = split_p(q.numer().magnitude(), p);
    let (vd, _) = split_p(q.denom().magnitude(), p);
    Some(vn - vd)
}
