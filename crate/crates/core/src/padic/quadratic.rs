use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;

use super::{is_square_in_qp, PadicError, PadicField, PadicScalar};

/// a + b*sqrt(d) in Q_p(sqrt d), d a non-square integer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticScalar {
    a: PadicScalar,
    b: PadicScalar,
    d: i64,
    /// v_p(d), cached
    vd: i64,
}

impl QuadraticScalar {
    pub fn new(a: PadicScalar, b: PadicScalar, d: i64) -> Result<Self, PadicError> {
        let p = a.prime();
        if b.prime() != p {
            return Err(PadicError::PrimeMismatch(p, b.prime()));
        }
        if is_square_in_qp(&BigInt::from(d), p) {
            return Err(PadicError::DomainError(format!("{d} is a square in Q_{p}")));
        }
        let vd = PadicScalar::from_i64(d, p, 64).valuation().unwrap_or(0);
        Ok(QuadraticScalar { a, b, d, vd })
    }

    pub fn from_base(a: PadicScalar, d: i64) -> Result<Self, PadicError> {
        let b = PadicScalar::zero(a.prime(), a.abs_precision());
        Self::new(a, b, d)
    }

    pub fn re(&self) -> &PadicScalar {
        &self.a
    }

    pub fn im(&self) -> &PadicScalar {
        &self.b
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    fn same_field(&self, o: &Self) {
        assert_eq!(self.d, o.d, "elements of different quadratic fields");
    }

    fn dd(&self) -> PadicScalar {
        PadicScalar::from_i64(self.d, self.a.prime(), self.a.abs_precision().max(self.b.abs_precision()) + self.vd)
    }

    pub fn conjugate(&self) -> Self {
        QuadraticScalar { a: self.a.clone(), b: self.b.neg_ref(), d: self.d, vd: self.vd }
    }

    /// a^2 - d b^2
    pub fn norm(&self) -> PadicScalar {
        let bb = self.b.mul_ref(&self.b).mul_ref(&self.dd());
        self.a.mul_ref(&self.a).sub_ref(&bb)
    }

    pub fn trace(&self) -> PadicScalar {
        self.a.add_ref(&self.a)
    }

    /// Returns the base-field value when the sqrt(d) part vanishes at precision.
    pub fn as_base(&self) -> Option<PadicScalar> {
        self.b.is_zero().then(|| self.a.clone())
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        QuadraticScalar { a: self.a.mul_ref(c), b: self.b.mul_ref(c), d: self.d, vd: self.vd }
    }
}

impl fmt::Debug for QuadraticScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadraticScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*sqrt({})", self.a, self.b, self.d)
    }
}

impl PadicField for QuadraticScalar {
    fn prime(&self) -> u32 {
        self.a.prime()
    }
    fn zero_at(&self, prec: i64) -> Self {
        let z = PadicScalar::zero(self.prime(), prec);
        QuadraticScalar { a: z.clone(), b: z, d: self.d, vd: self.vd }
    }
    fn embed(&self, x: &PadicScalar) -> Self {
        let z = PadicScalar::zero(self.prime(), x.abs_precision());
        QuadraticScalar { a: x.clone(), b: z, d: self.d, vd: self.vd }
    }
    fn add(&self, o: &Self) -> Self {
        self.same_field(o);
        QuadraticScalar { a: self.a.add_ref(&o.a), b: self.b.add_ref(&o.b), d: self.d, vd: self.vd }
    }
    fn sub(&self, o: &Self) -> Self {
        self.same_field(o);
        QuadraticScalar { a: self.a.sub_ref(&o.a), b: self.b.sub_ref(&o.b), d: self.d, vd: self.vd }
    }
    fn mul(&self, o: &Self) -> Self {
        self.same_field(o);
        let dd = self.dd();
        let a = self.a.mul_ref(&o.a).add_ref(&self.b.mul_ref(&o.b).mul_ref(&dd));
        let b = self.a.mul_ref(&o.b).add_ref(&self.b.mul_ref(&o.a));
        QuadraticScalar { a, b, d: self.d, vd: self.vd }
    }
    fn neg(&self) -> Self {
        QuadraticScalar { a: self.a.neg_ref(), b: self.b.neg_ref(), d: self.d, vd: self.vd }
    }
    fn inv(&self) -> Result<Self, PadicError> {
        if self.val().is_none() {
            return Err(PadicError::DivisionByZeroAtPrecision(self.a.abs_precision()));
        }
        let n = self.norm();
        let ni = n.inv()?;
        Ok(QuadraticScalar { a: self.a.mul_ref(&ni), b: self.b.neg_ref().mul_ref(&ni), d: self.d, vd: self.vd })
    }
    fn val(&self) -> Option<Rational64> {
        // 1 and sqrt(d) have valuations of different parity or are orthonormal
        let va = self.a.valuation().map(Rational64::from_integer);
        let vb = self.b.valuation().map(|v| Rational64::new(2 * v + self.vd, 2));
        match (va, vb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }
    fn precision(&self) -> Rational64 {
        let pa = Rational64::from_integer(self.a.abs_precision());
        let pb = Rational64::new(2 * self.b.abs_precision() + self.vd, 2);
        pa.min(pb)
    }
}
