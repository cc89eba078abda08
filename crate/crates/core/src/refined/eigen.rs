//! Frobenius eigenvalues, refinement classification, trianguline parameter and gates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{NewformRecord, RefinedError};
use crate::characters::{fmt_value, CharValue, PadicCharacter};
use crate::cohomology::{devissage_dims, is_noncritical, is_nonexceptional, TriangulineParameter};
use crate::padic::{hensel_root, rational_valuation, PadicScalar, PrecisionPolicy, QuadraticScalar};
use crate::par::Execution;

/// Roots of X^2 - a_p X + p^(k-1) and their twists by p^(-k/2).
/// phi[0] has the smaller slope; with equal slopes it is the root with +sqrt.
#[derive(Clone, Debug)]
pub struct Eigenvalues {
    pub phi: [CharValue; 2],
    pub slopes: [Rational64; 2],
    pub normalized: [CharValue; 2],
    pub normalized_slopes: [Rational64; 2],
}

fn p_pow(p: u32, e: i64, prec: i64) -> PadicScalar {
    PadicScalar::from_parts(p, e, 1u32.into(), prec)
}

/// n = c^2 * d with the square part of n taken over primes below 1000.
pub(super) fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut c = BigInt::one();
    let mut d = n.clone();
    for q in 2u32..1000 {
        let q2 = BigInt::from(q * q);
        while !d.is_zero() && d.is_multiple_of(&q2) {
            d /= &q2;
            c *= q;
        }
    }
    (c, d)
}

pub fn crystalline_eigenvalues(rec: &NewformRecord, policy: &PrecisionPolicy) -> Result<Eigenvalues, RefinedError> {
    let p = rec.p;
    let k = rec.weight as i64;
    let prec = policy.abs_precision + k + policy.guard_digits;
    let a = PadicScalar::from_rational(&rec.ap, p, prec);
    let s = rational_valuation(&rec.ap, p);
    let (phi, slopes) = match s {
        // Newton polygon has two segments: Hensel on Y^2 - (a/p^s) Y + p^(k-1-2s)
        Some(s) if 2 * s < k - 1 => {
            let u = a.mul_ref(&p_pow(p, -s, prec + s));
            let poly = [p_pow(p, k - 1 - 2 * s, prec), u.neg_ref(), PadicScalar::one(p, prec)];
            let seed = u.residue().ok_or_else(|| RefinedError::Invalid("a_p / p^s is not integral".into()))?;
            let y = hensel_root(&poly, seed as i64)?;
            let phi1 = y.mul_ref(&p_pow(p, s, prec));
            let phi2 = p_pow(p, k - 1, prec + k).div_ref(&phi1)?;
            ([CharValue::Base(phi1), CharValue::Base(phi2)], [Rational64::from_integer(s), Rational64::from_integer(k - 1 - s)])
        }
        // one segment of slope (k-1)/2, odd, so the roots generate a ramified quadratic field
        _ => {
            let (n, m) = (rec.ap.numer().clone(), rec.ap.denom().clone());
            let disc = &n * &n - BigInt::from(4) * &m * &m * BigInt::from(p).pow(rec.weight - 1);
            let (c, d) = split_square(&disc);
            let d = d.to_i64().ok_or_else(|| RefinedError::Invalid(format!("discriminant {disc} too large")))?;
            let re = PadicScalar::from_rational(&(&rec.ap / BigInt::from(2)), p, prec);
            let im = PadicScalar::from_rational(&BigRational::new(c, BigInt::from(2) * m), p, prec);
            let plus = QuadraticScalar::new(re.clone(), im.clone(), d)?;
            let minus = QuadraticScalar::new(re, im.neg_ref(), d)?;
            let half = Rational64::new(k - 1, 2);
            ([CharValue::Quadratic(plus), CharValue::Quadratic(minus)], [half, half])
        }
    };
    let twist = p_pow(p, -k / 2, prec + k);
    let normalized = [phi[0].scale(&twist), phi[1].scale(&twist)];
    let shift = Rational64::from_integer(k / 2);
    Ok(Eigenvalues { phi, slopes, normalized, normalized_slopes: [slopes[0] - shift, slopes[1] - shift] })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// v_p(a_p) > 0
    pub supersingular: bool,
    /// a root of slope 0 exists
    pub ordinary: bool,
    /// normalized slopes strictly inside (-k/2, k/2 - 1); None outside the supersingular case
    pub weak_admissibility_ok: Option<bool>,
    pub scope: Option<String>,
}

pub fn classify_refinement(rec: &NewformRecord, eig: &Eigenvalues) -> Classification {
    let supersingular = rational_valuation(&rec.ap, rec.p).is_none_or(|v| v > 0);
    let ordinary = eig.slopes[0].is_zero();
    let half = Rational64::from_integer(rec.weight as i64 / 2);
    let (lo, hi) = (-half, half - 1);
    let weak_admissibility_ok = supersingular.then(|| eig.normalized_slopes.iter().all(|s| lo < *s && *s < hi));
    let scope = (!supersingular).then(|| "ordinary: outside the supersingular scope".to_string());
    Classification { supersingular, ordinary, weak_admissibility_ok, scope }
}

/// delta_1 = x^(k-1) * unr(phi_1 / p^(k/2)), delta_2 = unr(phi_2 / p^(k/2)).
/// For k = 2: delta_1(p) = p phi_1, delta_1(t) = t, delta_2(p) = phi_2, delta_2(t) = 1.
pub fn build_parameter(rec: &NewformRecord, eig: &Eigenvalues) -> Result<TriangulineParameter, RefinedError> {
    if !rational_valuation(&rec.ap, rec.p).is_none_or(|v| v > 0) {
        return Err(RefinedError::NotSupersingular(rec.label.clone()));
    }
    let prec = eig.normalized[0].precision().to_integer().max(1);
    let x = PadicCharacter::power(rec.weight as i64 - 1, rec.p, prec);
    let d1 = x.mul(&PadicCharacter::unramified(eig.normalized[0].clone())?)?;
    let d2 = PadicCharacter::unramified(eig.normalized[1].clone())?;
    Ok(TriangulineParameter::new(vec![d1, d2])?)
}

/// Is delta_2(p)/delta_1(p) a power of p? Decided at precision with the policy's guard band.
fn ratio_in_pz(param: &TriangulineParameter, policy: &PrecisionPolicy) -> Result<bool, RefinedError> {
    let cs = param.characters();
    let r = cs[1].value_at_p().mul(&cs[0].value_at_p().inv()?);
    let v = r.val().ok_or_else(|| RefinedError::Invalid("ratio vanishes at precision".into()))?;
    if !v.is_integer() {
        return Ok(false);
    }
    let p = r.prime();
    let v = v.to_integer();
    let prec = r.precision().to_integer() + v.abs() + 2;
    let unit = r.scale(&p_pow(p, -v, prec));
    Ok(unit.equals_scalar(&PadicScalar::one(p, prec), policy.guard_digits)?)
}

/// Gate outcomes; None means not evaluated because an earlier gate failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gates {
    pub supersingular: bool,
    #[serde(skip)]
    pub ordinary: bool,
    pub weak_admissibility: Option<bool>,
    /// a_p^2 != 4 p^(k-1)
    pub distinct_roots: bool,
    pub ratio_not_in_pz: Option<bool>,
    pub nonexceptional: Option<bool>,
    pub noncritical: Option<bool>,
    /// local Pottharst dimension equals a = 1
    pub pot_dim_is_a: Option<bool>,
}

impl Gates {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.supersingular {
            out.push(if self.ordinary { "ordinary" } else { "not supersingular" }.to_string());
        }
        if !self.distinct_roots {
            out.push("a_p = 2 sqrt(p^(k-1))".to_string());
        }
        let optional = [
            ("weak admissibility", self.weak_admissibility),
            ("phi_2/(p phi_1) in p^Z", self.ratio_not_in_pz),
            ("exceptional", self.nonexceptional),
            ("critical", self.noncritical),
            ("pot_dim != a", self.pot_dim_is_a),
        ];
        out.extend(optional.iter().filter(|(_, g)| *g == Some(false)).map(|(n, _)| n.to_string()));
        out
    }

    pub fn eligible(&self) -> bool {
        self.supersingular
            && self.distinct_roots
            && [self.weak_admissibility, self.ratio_not_in_pz, self.nonexceptional, self.noncritical, self.pot_dim_is_a]
                .iter()
                .all(|g| *g == Some(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub eligible: bool,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterSummary {
    pub delta1: String,
    pub delta2: String,
    pub weights: Vec<Option<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementReport {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub p: u32,
    pub ap: String,
    pub phi: [String; 2],
    pub slopes: [String; 2],
    pub phi_normalized: [String; 2],
    pub slopes_normalized: [String; 2],
    pub supersingular: bool,
    pub ordinary: bool,
    pub weak_admissibility_ok: Option<bool>,
    pub scope: Option<String>,
    pub parameter: Option<ParameterSummary>,
    pub nonexceptional_ok: Option<bool>,
    pub noncritical_ok: Option<bool>,
    pub ap_eq_2sqrtp: bool,
    pub ratio_in_pz: Option<bool>,
    pub pot_dim: Option<usize>,
    pub gates: Gates,
    /// which eigenvalue pair each gate reads
    pub normalization: [(&'static str, &'static str); 4],
    pub verdict: Verdict,
}

const NORMALIZATION: [(&str, &str); 4] = [
    ("supersingular", "unnormalized"),
    ("distinct_roots", "unnormalized"),
    ("weak_admissibility", "normalized"),
    ("parameter", "normalized"),
];

pub fn theorem_gates(rec: &NewformRecord, policy: &PrecisionPolicy) -> Result<RefinementReport, RefinedError> {
    let eig = crystalline_eigenvalues(rec, policy)?;
    let class = classify_refinement(rec, &eig);
    let distinct_roots = !rec.discriminant().is_zero();
    let mut gates = Gates {
        supersingular: class.supersingular,
        ordinary: class.ordinary,
        weak_admissibility: class.weak_admissibility_ok,
        distinct_roots,
        ratio_not_in_pz: None,
        nonexceptional: None,
        noncritical: None,
        pot_dim_is_a: None,
    };
    let mut parameter = None;
    let mut ratio = None;
    let mut pot_dim = None;
    if class.supersingular {
        let param = build_parameter(rec, &eig)?;
        let r = ratio_in_pz(&param, policy)?;
        ratio = Some(r);
        gates.ratio_not_in_pz = Some(!r);
        let nonexc = is_nonexceptional(&param, policy)?;
        gates.nonexceptional = Some(nonexc);
        gates.noncritical = Some(is_noncritical(&param, policy)?);
        if nonexc {
            let dims = devissage_dims(&param, 1, policy, None)?;
            pot_dim = Some(dims.pot_dim);
            gates.pot_dim_is_a = Some(dims.pot_dim == 1);
        }
        let weights = param.weights(policy)?.iter().map(|w| w.integer).collect();
        let cs = param.characters();
        parameter = Some(ParameterSummary { delta1: cs[0].to_string(), delta2: cs[1].to_string(), weights });
    }
    let verdict = Verdict { eligible: gates.eligible(), reasons: gates.failures() };
    let s = |x: &Rational64| x.to_string();
    Ok(RefinementReport {
        label: rec.label.clone(),
        level: rec.level,
        weight: rec.weight,
        p: rec.p,
        ap: rec.ap.to_string(),
        phi: [fmt_value(&eig.phi[0]), fmt_value(&eig.phi[1])],
        slopes: [s(&eig.slopes[0]), s(&eig.slopes[1])],
        phi_normalized: [fmt_value(&eig.normalized[0]), fmt_value(&eig.normalized[1])],
        slopes_normalized: [s(&eig.normalized_slopes[0]), s(&eig.normalized_slopes[1])],
        supersingular: class.supersingular,
        ordinary: class.ordinary,
        weak_admissibility_ok: class.weak_admissibility_ok,
        scope: class.scope,
        parameter,
        nonexceptional_ok: gates.nonexceptional,
        noncritical_ok: gates.noncritical,
        ap_eq_2sqrtp: !distinct_roots,
        ratio_in_pz: ratio,
        pot_dim,
        gates,
        normalization: NORMALIZATION,
        verdict,
    })
}

/// Runs the gates on every record, then orders the results by label (stable).
pub fn refine_batch(
    records: &[NewformRecord],
    policy: &PrecisionPolicy,
    exec: Execution,
) -> Vec<(String, Result<RefinementReport, RefinedError>)> {
    let mut out: Vec<_> = exec.map(records, |r| (r.label.clone(), theorem_gates(r, policy)));
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

