//! Cohomology of rank-one modules R(delta) and devissage along triangulations.

mod devissage;
mod iwasawa;
mod rank_one;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::characters::{CharValue, CharacterError, CyclotomicGenerator, PadicCharacter};
use crate::linalg::Mat;
use crate::padic::{PadicError, PadicField, PadicScalar, QuadraticScalar};
use crate::robba::{binomial_series, gamma_act, phi_act, phi_power_table, RobbaElement, RobbaError, SubringTag};

pub use devissage::{devissage_dims, is_noncritical, is_nonexceptional, DevissageDims, TriangulineParameter};
pub use iwasawa::{lambda_newton, lambda_smith, iwasawa_series};
pub use rank_one::{h0_rank_one, h1_rank_one, H1Detail, LevelValues};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Robba(#[from] RobbaError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("Neumann series not converging: {0}")]
    NotConverging(String),
    #[error("exceptional parameter: {0}")]
    ExceptionalParameter(String),
    #[error("{0}")]
    Invalid(String),
}

/// Window K (coefficients T^0..T^(K-1)) and absolute precision N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Truncation {
    pub k: usize,
    pub n: i64,
}

impl Truncation {
    /// The second, finer level used for stabilization.
    pub fn refined(self) -> Truncation {
        Truncation { k: 2 * self.k, n: self.n + 5 }
    }
}

/// R(delta) = R e with phi(e) = delta(p) e, gamma(e) = delta(gamma) e.
#[derive(Clone, Debug)]
pub struct RankOneModule {
    pub delta: PadicCharacter,
    pub truncation: Truncation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    Value(usize),
    Unstable,
}

impl Dim {
    pub fn value(self) -> Option<usize> {
        match self {
            Dim::Value(v) => Some(v),
            Dim::Unstable => None,
        }
    }

    /// Agreement across levels.
    pub fn stabilize(vals: &[Option<usize>]) -> Dim {
        match vals.first() {
            Some(Some(v)) if vals.iter().all(|x| *x == Some(*v)) => Dim::Value(*v),
            _ => Dim::Unstable,
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Dim::Value(v) => s.serialize_u64(*v as u64),
            Dim::Unstable => s.serialize_str("unstable"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ProofPipeline,
    DirectTruncation,
    BothAgree,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub character: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0_dim: Option<Dim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_dim: Option<Dim>,
    pub levels: Vec<Truncation>,
    pub stabilized: bool,
    pub method: Method,
    pub exceptional: bool,
    /// exceptional characters: no closed formula to compare with
    pub exploratory: bool,
    /// h2 = 0 for non-exceptional characters is assumed, not computed
    pub h2_assumed_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0_injection_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_detail: Option<H1Detail>,
}

/// The character at one truncation level, with alpha and beta in a common field.
#[derive(Clone, Debug)]
pub(crate) struct LevelData {
    pub delta: PadicCharacter,
    pub beta: PadicScalar,
    pub gen: CyclotomicGenerator,
}

pub(crate) fn level_data(delta: &PadicCharacter, n: i64) -> Result<LevelData, CohomologyError> {
    let p = delta.prime();
    let d = truncate_character(delta, n)?;
    let gen = CyclotomicGenerator::new(p, n + 6)?;
    let beta = d.gamma_value(&gen)?.truncate(n);
    Ok(LevelData { delta: d, beta, gen })
}

pub(crate) fn truncate_character(delta: &PadicCharacter, n: i64) -> Result<PadicCharacter, CohomologyError> {
    let v = match delta.value_at_p() {
        CharValue::Base(x) => CharValue::Base(x.truncate(n)),
        CharValue::Quadratic(q) => CharValue::Quadratic(QuadraticScalar::new(q.re().truncate(n), q.im().truncate(n), q.discriminant())?),
    };
    Ok(PadicCharacter::new(v, delta.torsion_exponent(), delta.principal_value().truncate(n))?)
}

/// Matrix of phi on R+/T^K, column j = phi(T)^j.
pub(crate) fn phi_matrix(p: u32, k: usize, n: i64) -> Mat<PadicScalar> {
    let t = phi_power_table(p, k - 1, k - 1, n + 10);
    let zero = PadicScalar::zero(p, n + 10);
    Mat::from_fn(k, k, |i, j| t[j].get(i).cloned().unwrap_or_else(|| zero.clone()))
}

/// Matrix of gamma_g on R+/T^K, column j = ((1+T)^g - 1)^j.
pub(crate) fn gamma_matrix(p: u32, g: i64, k: usize, n: i64) -> Result<Mat<PadicScalar>, CohomologyError> {
    let work = n + 10;
    let a = PadicScalar::from_i64(g, p, work + 40);
    let s = binomial_series(&a, k - 1, work)?;
    let t = s.power_table();
    let zero = PadicScalar::zero(p, work);
    Ok(Mat::from_fn(k, k, |i, j| t[j].get(i).cloned().unwrap_or_else(|| zero.clone())))
}

/// c * M - I
pub(crate) fn twisted_minus_one<S: PadicField>(c: &S, m: &Mat<PadicScalar>, n: i64) -> Mat<S> {
    let one = c.one_at(n);
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        let x = c.mul(&c.embed(m.get(i, j)));
        if i == j { x.sub(&one) } else { x }
    })
}

fn base_alpha(delta: &PadicCharacter) -> Result<PadicScalar, CohomologyError> {
    delta
        .value_at_p()
        .as_base()
        .cloned()
        .ok_or_else(|| CohomologyError::Invalid("element-level maps need delta(p) in Q_p".into()))
}

fn as_series(f: &RobbaElement) -> Result<RobbaElement, CohomologyError> {
    if !f.tag().nonnegative() || f.lo() < 0 {
        return Err(RobbaError::UnsupportedTag(f.tag()).into());
    }
    let hi = f.hi();
    let cs = (0..=hi).map(|i| f.coeff(i).unwrap_or_else(|| PadicScalar::zero(f.prime(), f.precision()))).collect();
    Ok(RobbaElement::new(f.prime(), 0, cs, SubringTag::RPlus, true, false)?)
}

fn twisted_phi(alpha: &PadicScalar, f: &RobbaElement) -> Result<RobbaElement, CohomologyError> {
    let y = phi_act(f)?;
    let (_, hi) = f.window();
    Ok(y.restrict(0, hi)?.scale(alpha))
}

fn twisted_gamma(beta: &PadicScalar, gen: &CyclotomicGenerator, f: &RobbaElement) -> Result<RobbaElement, CohomologyError> {
    let a = PadicScalar::from_i64(gen.g, f.prime(), f.precision() + 20);
    Ok(gamma_act(f, &a)?.scale(beta))
}

/// Cochain pair (a, b) in D^2.
#[derive(Clone, Debug)]
pub struct CocyclePair {
    pub a: RobbaElement,
    pub b: RobbaElement,
}

/// d1(c) = ((beta gamma - 1) c, (alpha phi - 1) c), on R+ windows.
pub fn d1(c: &RobbaElement, delta: &PadicCharacter) -> Result<CocyclePair, CohomologyError> {
    let c = as_series(c)?;
    let lv = level_data(delta, c.precision())?;
    let alpha = base_alpha(&lv.delta)?;
    let a = twisted_gamma(&lv.beta, &lv.gen, &c)?.sub(&c)?;
    let b = twisted_phi(&alpha, &c)?.sub(&c)?;
    Ok(CocyclePair { a, b })
}

/// d2(a, b) = (alpha phi - 1) a - (beta gamma - 1) b.
pub fn d2(pair: &CocyclePair, delta: &PadicCharacter) -> Result<RobbaElement, CohomologyError> {
    let a = as_series(&pair.a)?;
    let b = as_series(&pair.b)?;
    let lv = level_data(delta, a.precision().max(b.precision()))?;
    let alpha = base_alpha(&lv.delta)?;
    let x = twisted_phi(&alpha, &a)?.sub(&a)?;
    let y = twisted_gamma(&lv.beta, &lv.gen, &b)?.sub(&b)?;
    Ok(x.sub(&y)?)
}

/// c = -sum (alpha phi)^n b, inverting alpha phi - 1 on T^k R+, until the terms
/// reach valuation `target`. Each step costs max(0, -v(alpha)) digits of b's precision.
pub fn solve_neumann(alpha: &PadicScalar, k: usize, b: &RobbaElement, target: i64) -> Result<RobbaElement, CohomologyError> {
    let b = as_series(b)?;
    for i in 0..k.min(b.hi().max(0) as usize + 1) {
        if !b.coeff(i as i64).is_some_and(|c| c.is_zero()) {
            return Err(CohomologyError::Invalid(format!("b has a T^{i} term; expected b in T^{k} R+")));
        }
    }
    let work = b.precision();
    let (_, hi) = b.window();
    let stall_limit = hi as usize + 8;
    // zero-at-precision coefficients count at their precision
    let size = |f: &RobbaElement| f.coeffs().iter().map(|c| c.valuation().unwrap_or(c.abs_precision())).min().unwrap();
    let mut c = RobbaElement::new(b.prime(), 0, vec![PadicScalar::zero(b.prime(), work); hi as usize + 1], SubringTag::RPlus, true, false)?;
    let mut term = b.clone();
    let mut best = size(&term);
    let mut stalled = 0;
    for _ in 0..(20 * target.max(1) as usize + 4 * hi as usize) {
        c = c.sub(&term)?;
        term = twisted_phi(alpha, &term)?.truncate(work);
        let v = size(&term);
        if v >= target {
            return Ok(c);
        }
        if term.coeffs().iter().any(|x| x.abs_precision() < target) {
            return Err(CohomologyError::NotConverging(format!("precision exhausted before valuation {target}")));
        }
        if v > best {
            best = v;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > stall_limit {
                return Err(CohomologyError::NotConverging(format!(
                    "term valuation stuck at {v} for {stalled} steps (alpha = {alpha}, k = {k})"
                )));
            }
        }
    }
    Err(CohomologyError::NotConverging("iteration budget exhausted".into()))
}

/// Display form for report fields.
pub(crate) fn character_text(delta: &PadicCharacter) -> String {
    delta.to_string()
}
