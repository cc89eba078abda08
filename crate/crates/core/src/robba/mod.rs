//! Windowed Laurent series model of the Robba ring and its subrings.

mod actions;
mod text;

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{PadicError, PadicScalar};

pub use actions::{
    binomial_series, gamma_act, log_one_plus_t, phi_act, phi_power_table, psi_act, psi_zero_basis,
    BinomialSeries,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobbaError {
    #[error("mixed primes {0} and {1}")]
    PrimeMismatch(u32, u32),
    #[error("no output coefficient is fully determined")]
    EmptyWindow,
    #[error("window of {0} coefficients exceeds the limit")]
    WindowOverflow(usize),
    #[error("(1+T)^a approximation did not converge: {0}")]
    ApproximationNotConverged(String),
    #[error("operation needs a polynomial (closed window) input")]
    NotPolynomial,
    #[error("operation not available for {0:?} elements")]
    UnsupportedTag(SubringTag),
    #[error("invalid element: {0}")]
    Invalid(String),
    #[error("cannot parse element record: {0}")]
    Parse(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Largest number of stored coefficients any operation will produce.
pub const MAX_WINDOW: usize = 1 << 16;

/// Membership claim asserted at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubringTag {
    FullRobba,
    RPlus,
    EDagger,
    EPlus,
}

impl SubringTag {
    /// Weakest claim satisfied by both (E+ is contained in R+ and in E-dagger).
    pub fn meet(self, o: SubringTag) -> SubringTag {
        use SubringTag::*;
        match (self, o) {
            (a, b) if a == b => a,
            (EPlus, x) | (x, EPlus) => x,
            _ => FullRobba,
        }
    }

    pub fn nonnegative(self) -> bool {
        matches!(self, SubringTag::RPlus | SubringTag::EPlus)
    }

    pub fn bounded(self) -> bool {
        matches!(self, SubringTag::EPlus | SubringTag::EDagger)
    }
}

/// Additive radius parameter s > 0, |T| = p^-s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussWeight(Rational64);

impl GaussWeight {
    pub fn new(s: Rational64) -> Result<Self, RobbaError> {
        if s <= Rational64::from_integer(0) {
            return Err(RobbaError::Invalid(format!("Gauss weight needs s > 0, got {s}")));
        }
        Ok(GaussWeight(s))
    }

    pub fn s(&self) -> Rational64 {
        self.0
    }
}

/// w_s(f) over determined coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussValue {
    /// None when every determined coefficient is zero at precision.
    pub value: Option<Rational64>,
    /// Unknown or imprecise coefficients could lower the true value.
    pub tail_uncertain: bool,
}

/// sum_{i=lo}^{hi} a_i T^i, with explicit knowledge of what lies outside.
#[derive(Clone, PartialEq, Eq)]
pub struct RobbaElement {
    p: u32,
    lo: i64,
    coeffs: Vec<PadicScalar>,
    tag: SubringTag,
    floor: Option<i64>,
    /// coefficients below `lo` are known to vanish
    closed_below: bool,
    /// coefficients above `hi` are known to vanish
    closed_above: bool,
}

impl RobbaElement {
    pub fn new(
        p: u32,
        lo: i64,
        coeffs: Vec<PadicScalar>,
        tag: SubringTag,
        closed_below: bool,
        closed_above: bool,
    ) -> Result<Self, RobbaError> {
        if coeffs.is_empty() {
            return Err(RobbaError::EmptyWindow);
        }
        if coeffs.len() > MAX_WINDOW {
            return Err(RobbaError::WindowOverflow(coeffs.len()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.prime() != p) {
            return Err(RobbaError::PrimeMismatch(p, c.prime()));
        }
        if tag.nonnegative() && (lo < 0 || !closed_below) {
            return Err(RobbaError::Invalid(format!("{tag:?} element must start at a non-negative index and vanish below")));
        }
        let floor = if tag.bounded() {
            Some(coeffs.iter().filter_map(|c| c.valuation()).min().unwrap_or(0).min(0))
        } else {
            None
        };
        Ok(RobbaElement { p, lo, coeffs, tag, floor, closed_below, closed_above })
    }

    /// Declares a valuation floor for bounded tags; checked against stored data.
    pub fn with_floor(mut self, floor: i64) -> Result<Self, RobbaError> {
        if !self.tag.bounded() {
            return Err(RobbaError::Invalid("floor only applies to bounded subrings".into()));
        }
        if self.coeffs.iter().any(|c| c.valuation().is_some_and(|v| v < floor)) {
            return Err(RobbaError::Invalid(format!("a stored coefficient lies below floor {floor}")));
        }
        self.floor = Some(floor);
        Ok(self)
    }

    /// Exact polynomial sum_{i>=0} c_i T^i.
    pub fn polynomial(p: u32, coeffs: Vec<PadicScalar>) -> Result<Self, RobbaError> {
        Self::new(p, 0, coeffs, SubringTag::RPlus, true, true)
    }

    /// Power series in R+ known through degree coeffs.len() - 1.
    pub fn series(p: u32, coeffs: Vec<PadicScalar>) -> Result<Self, RobbaError> {
        Self::new(p, 0, coeffs, SubringTag::RPlus, true, false)
    }

    /// Exact Laurent polynomial starting at index lo.
    pub fn laurent(p: u32, lo: i64, coeffs: Vec<PadicScalar>) -> Result<Self, RobbaError> {
        Self::new(p, lo, coeffs, SubringTag::FullRobba, true, true)
    }

    pub fn monomial(p: u32, i: i64, prec: i64) -> Self {
        let tag = if i >= 0 { SubringTag::EPlus } else { SubringTag::EDagger };
        Self::new(p, i, vec![PadicScalar::one(p, prec)], tag, true, true).expect("valid monomial")
    }

    pub fn constant(c: PadicScalar) -> Self {
        let p = c.prime();
        Self::new(p, 0, vec![c], SubringTag::RPlus, true, true).expect("valid constant")
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn tag(&self) -> SubringTag {
        self.tag
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    /// Stored index range (lo, hi), inclusive.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn closed_below(&self) -> bool {
        self.closed_below
    }

    pub fn closed_above(&self) -> bool {
        self.closed_above
    }

    pub fn is_polynomial(&self) -> bool {
        self.closed_below && self.closed_above
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    /// Largest absolute precision among stored coefficients.
    pub fn precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs_precision()).max().unwrap()
    }

    fn zero_coeff(&self) -> PadicScalar {
        PadicScalar::zero(self.p, self.precision())
    }

    /// a_i if determined: stored, or known to vanish outside the window.
    pub fn coeff(&self, i: i64) -> Option<PadicScalar> {
        if i < self.lo {
            self.closed_below.then(|| self.zero_coeff())
        } else if i > self.hi() {
            self.closed_above.then(|| self.zero_coeff())
        } else {
            Some(self.coeffs[(i - self.lo) as usize].clone())
        }
    }

    /// Range of determined indices; None marks an infinite side.
    fn known_range(&self) -> (Option<i64>, Option<i64>) {
        (
            (!self.closed_below).then_some(self.lo),
            (!self.closed_above).then_some(self.hi()),
        )
    }

    fn check_prime(&self, o: &Self) -> Result<(), RobbaError> {
        if self.p != o.p {
            return Err(RobbaError::PrimeMismatch(self.p, o.p));
        }
        Ok(())
    }

    fn combine(&self, o: &Self, neg: bool) -> Result<Self, RobbaError> {
        self.check_prime(o)?;
        let (kl1, kh1) = self.known_range();
        let (kl2, kh2) = o.known_range();
        let known_lo = match (kl1, kl2) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let known_hi = match (kh1, kh2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let lo = known_lo.unwrap_or(self.lo.min(o.lo));
        let hi = known_hi.unwrap_or(self.hi().max(o.hi()));
        if hi < lo {
            return Err(RobbaError::EmptyWindow);
        }
        let coeffs = (lo..=hi)
            .map(|i| {
                let a = self.coeff(i).expect("inside known range");
                let b = o.coeff(i).expect("inside known range");
                if neg { a.sub_ref(&b) } else { a.add_ref(&b) }
            })
            .collect();
        let tag = self.tag.meet(o.tag);
        let mut out = Self::new(self.p, lo, coeffs, tag, known_lo.is_none(), known_hi.is_none())?;
        if let (Some(a), Some(b)) = (self.floor, o.floor) {
            out.floor = Some(a.min(b));
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self, RobbaError> {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, RobbaError> {
        self.combine(o, true)
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|a| a.mul_ref(c)).collect();
        if let (Some(f), Some(v)) = (self.floor, c.valuation()) {
            out.floor = Some(f + v.min(0));
        }
        out
    }

    /// Caps every coefficient at absolute precision n.
    pub fn truncate(&self, n: i64) -> Self {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|a| a.truncate(n)).collect();
        out
    }

    /// Cauchy product on the sub-window where every term is known.
    pub fn mul(&self, o: &Self) -> Result<Self, RobbaError> {
        self.check_prime(o)?;
        let (f, g) = (self, o);
        if (!f.closed_above && !g.closed_below) || (!g.closed_above && !f.closed_below) {
            return Err(RobbaError::EmptyWindow);
        }
        let mut upper = f.hi() + g.hi();
        let mut lower = f.lo + g.lo;
        if !f.closed_above {
            upper = upper.min(f.hi() + g.lo);
        }
        if !g.closed_above {
            upper = upper.min(g.hi() + f.lo);
        }
        if !f.closed_below {
            lower = lower.max(f.lo + g.hi());
        }
        if !g.closed_below {
            lower = lower.max(g.lo + f.hi());
        }
        if upper < lower {
            return Err(RobbaError::EmptyWindow);
        }
        if (upper - lower + 1) as usize > MAX_WINDOW {
            return Err(RobbaError::WindowOverflow((upper - lower + 1) as usize));
        }
        let prec = f.precision().min(g.precision());
        let coeffs = (lower..=upper)
            .map(|i| {
                let mut acc = PadicScalar::zero(f.p, prec + 64);
                let j0 = f.lo.max(i - g.hi());
                let j1 = f.hi().min(i - g.lo);
                for j in j0..=j1 {
                    let a = &f.coeffs[(j - f.lo) as usize];
                    let b = &g.coeffs[(i - j - g.lo) as usize];
                    acc = acc.add_ref(&a.mul_ref(b));
                }
                acc
            })
            .collect();
        let tag = f.tag.meet(g.tag);
        let closed_below = f.closed_below && g.closed_below;
        let closed_above = f.closed_above && g.closed_above;
        let mut out = Self::new(f.p, lower, coeffs, tag, closed_below, closed_above)?;
        if let (Some(a), Some(b)) = (f.floor, g.floor) {
            out.floor = Some(a + b);
        }
        Ok(out)
    }

    /// w_s(f) = min_i v(a_i) + s i over determined coefficients.
    pub fn gauss_valuation(&self, w: GaussWeight) -> GaussValue {
        let s = w.s();
        let mut best: Option<Rational64> = None;
        let mut lower_bounds: Vec<Rational64> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let i = Rational64::from_integer(self.lo + k as i64);
            match c.valuation() {
                Some(v) => {
                    let x = Rational64::from_integer(v) + s * i;
                    best = Some(best.map_or(x, |b| b.min(x)));
                }
                None => lower_bounds.push(Rational64::from_integer(c.abs_precision()) + s * i),
            }
        }
        let mut uncertain = !self.closed_below;
        if !self.closed_above {
            match self.floor {
                Some(fl) => {
                    let bound = Rational64::from_integer(fl) + s * Rational64::from_integer(self.hi() + 1);
                    lower_bounds.push(bound);
                }
                None => uncertain = true,
            }
        }
        if let Some(b) = best {
            if lower_bounds.iter().any(|&lb| lb < b) {
                uncertain = true;
            }
        } else if !lower_bounds.is_empty() {
            uncertain = true;
        }
        GaussValue { value: best, tail_uncertain: uncertain }
    }

    /// Coefficientwise agreement to `digits` on the common determined window.
    pub fn agrees_with(&self, o: &Self, digits: i64) -> bool {
        match self.sub(o) {
            Ok(d) => d.coeffs.iter().all(|c| c.valuation().is_none_or(|v| v >= digits)),
            Err(_) => false,
        }
    }

    /// Every determined coefficient negligible with the given guard.
    pub fn is_negligible(&self, guard: i64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(guard))
    }

    /// Restricts the stored window to [lo, hi], marking cut sides as unknown.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self, RobbaError> {
        // R+ style elements keep their lower end: cutting it would forget known zeros
        let lo2 = if self.tag.nonnegative() { self.lo } else { lo.max(self.lo) };
        let hi2 = hi.min(self.hi());
        if hi2 < lo2 {
            return Err(RobbaError::EmptyWindow);
        }
        let coeffs = self.coeffs[(lo2 - self.lo) as usize..=(hi2 - self.lo) as usize].to_vec();
        let closed_below = self.closed_below && lo2 == self.lo;
        let closed_above = self.closed_above && hi2 == self.hi();
        let mut out = Self::new(self.p, lo2, coeffs, self.tag, closed_below, closed_above)?;
        out.floor = self.floor;
        Ok(out)
    }

    /// Smallest index with a non-negligible coefficient (T-adic order).
    pub fn order(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|k| self.lo + k as i64)
    }
}

impl fmt::Debug for RobbaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests;
