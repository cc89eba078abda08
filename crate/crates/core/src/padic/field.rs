use std::fmt::Debug;

use num_rational::Rational64;

use super::{PadicError, PadicScalar};

/// Common interface of Q_p and its quadratic extensions, for linear algebra.
pub trait PadicField: Clone + Debug + Send + Sync + 'static {
    fn prime(&self) -> u32;
    /// Zero in the same field, at the given absolute precision.
    fn zero_at(&self, prec: i64) -> Self;
    fn embed(&self, x: &PadicScalar) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, PadicError>;
    /// None when zero at precision; half-integers in ramified extensions.
    fn val(&self) -> Option<Rational64>;
    fn precision(&self) -> Rational64;

    fn div(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&o.inv()?))
    }

    fn one_at(&self, prec: i64) -> Self {
        self.embed(&PadicScalar::one(self.prime(), prec))
    }

    fn is_negligible(&self, guard: i64) -> bool {
        match self.val() {
            None => true,
            Some(v) => v >= self.precision() - Rational64::from_integer(guard),
        }
    }
}

impl PadicField for PadicScalar {
    fn prime(&self) -> u32 {
        self.p
    }
    fn zero_at(&self, prec: i64) -> Self {
        PadicScalar::zero(self.p, prec)
    }
    fn embed(&self, x: &PadicScalar) -> Self {
        x.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg(&self) -> Self {
        self.neg_ref()
    }
    fn inv(&self) -> Result<Self, PadicError> {
        PadicScalar::inv(self)
    }
    fn val(&self) -> Option<Rational64> {
        self.val.map(Rational64::from_integer)
    }
    fn precision(&self) -> Rational64 {
        Rational64::from_integer(self.prec)
    }
    fn is_negligible(&self, guard: i64) -> bool {
        PadicScalar::is_negligible(self, guard)
    }
}
