//! Finite samples of refined families: ordering of weights, distinct Frobenius
//! eigenvalues and the Z_C census.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{parse_rational, RefinedError};

/// F_i(z): a rational "a/b", or re + im*sqrt(d).
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum FrobValue {
    Rational(String),
    Quadratic { re: String, im: String, d: i64 },
}

/// re + im*sqrt(d), exact.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Exact {
    re: BigRational,
    im: BigRational,
    d: i64,
}

impl Exact {
    fn parse(v: &FrobValue) -> Result<Self, RefinedError> {
        let rat = |s: &str| {
            parse_rational(s).ok_or_else(|| RefinedError::Invalid(format!("bad Frobenius value {s:?}")))
        };
        Ok(match v {
            FrobValue::Rational(s) => Exact { re: rat(s)?, im: BigRational::from_integer(0.into()), d: 1 },
            FrobValue::Quadratic { re, im, d } => Exact { re: rat(re)?, im: rat(im)?, d: *d },
        })
    }

    fn scale(&self, c: &BigRational) -> Self {
        Exact { re: &self.re * c, im: &self.im * c, d: self.d }
    }

    /// a + b sqrt(d) = a' + b' sqrt(d') iff a = a', b^2 d = b'^2 d' and b, b' have the same sign
    fn same(&self, o: &Self) -> bool {
        self.re == o.re
            && &self.im * &self.im * BigInt::from(self.d) == &o.im * &o.im * BigInt::from(o.d)
            && self.im.signum() == o.im.signum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct SamplePoint {
    pub label: String,
    pub kappa: Vec<i64>,
    pub frobenius: Vec<FrobValue>,
    /// member of the designated classical set Z
    #[serde(default)]
    pub classical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct FamilySample {
    pub p: u32,
    pub d: usize,
    pub points: Vec<SamplePoint>,
}

impl FamilySample {
    pub fn validate(&self) -> Result<(), RefinedError> {
        if self.points.is_empty() {
            return Err(RefinedError::Invalid("empty sample".into()));
        }
        for pt in &self.points {
            if pt.kappa.len() != self.d || pt.frobenius.len() != self.d {
                return Err(RefinedError::Invalid(format!("{}: tuples must have length d = {}", pt.label, self.d)));
            }
        }
        if !self.points.iter().any(|pt| pt.classical) {
            return Err(RefinedError::Invalid("the classical set Z is empty".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointReport {
    pub label: String,
    pub classical: bool,
    /// kappa strictly increasing; only checked on Z
    pub increasing: Option<bool>,
    /// p^kappa_i F_i pairwise distinct; only checked on Z
    pub distinct_frobenius: Option<bool>,
    /// kappa_(n+1) - kappa_n > C (kappa_n - kappa_(n-1)) for n = 2..d-1
    pub gap_growth: bool,
    /// kappa_2 - kappa_1 > C
    pub first_gap: bool,
    pub in_z_c: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub d: usize,
    pub c: u64,
    pub points: Vec<PointReport>,
    pub classical_count: usize,
    pub z_c_count: usize,
    pub increasing_ok: bool,
    pub distinct_ok: bool,
    pub accumulation: &'static str,
}

fn check_point(pt: &SamplePoint, p: u32, c: u64) -> Result<PointReport, RefinedError> {
    let k = &pt.kappa;
    let c = BigInt::from(c);
    let gap = |n: usize| BigInt::from(k[n]) - BigInt::from(k[n - 1]);
    let gap_growth = (2..k.len()).all(|n| gap(n) > &c * gap(n - 1));
    let first_gap = k.len() < 2 || gap(1) > c;
    let (increasing, distinct_frobenius) = if pt.classical {
        let inc = k.windows(2).all(|w| w[0] < w[1]);
        let vals = pt
            .frobenius
            .iter()
            .zip(k)
            .map(|(f, &kk)| {
                let pk = BigRational::from_integer(BigInt::from(p)).pow(kk as i32);
                Ok(Exact::parse(f)?.scale(&pk))
            })
            .collect::<Result<Vec<_>, RefinedError>>()?;
        let distinct = (0..vals.len()).all(|i| (i + 1..vals.len()).all(|j| !vals[i].same(&vals[j])));
        (Some(inc), Some(distinct))
    } else {
        (None, None)
    };
    let in_z_c = pt.classical && gap_growth && first_gap;
    Ok(PointReport { label: pt.label.clone(), classical: pt.classical, increasing, distinct_frobenius, gap_growth, first_gap, in_z_c })
}

/// Pointwise weight ordering, distinct Frobenius eigenvalues and Z_C membership. Accumulation of Z_C cannot be decided from finitely many points.
pub fn family_axiom_check(sample: &FamilySample, c: u64) -> Result<FamilyReport, RefinedError> {
    sample.validate()?;
    let points = sample.points.iter().map(|pt| check_point(pt, sample.p, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(FamilyReport {
        d: sample.d,
        c,
        classical_count: points.iter().filter(|r| r.classical).count(),
        z_c_count: points.iter().filter(|r| r.in_z_c).count(),
        increasing_ok: points.iter().all(|r| r.increasing != Some(false)),
        distinct_ok: points.iter().all(|r| r.distinct_frobenius != Some(false)),
        accumulation: "not checkable at desk scale",
        points,
    })
}

