//! H^0 and H^1 of R(delta) on finite truncations, at two levels.

use num_rational::Rational64;
use serde::Serialize;

use super::iwasawa::{iwasawa_series, lambda_newton, lambda_smith};
use super::{
    character_text, gamma_matrix, level_data, phi_matrix, solve_neumann, twisted_minus_one, CohomologyError,
    CohomologyReport, Dim, LevelData, Method, Truncation,
};
use crate::characters::{CharValue, PadicCharacter};
use crate::linalg::{rank, reduce, Mat};
use crate::padic::{PadicField, PadicScalar, PrecisionPolicy};
use crate::par::Execution;
use crate::robba::RobbaElement;

/// Smallest integer strictly greater than -v.
fn neumann_k(v: Rational64) -> usize {
    ((-v).floor().to_integer() + 1).max(0) as usize
}

fn alpha_val(delta: &PadicCharacter) -> Rational64 {
    delta.value_at_p().val().expect("delta(p) is invertible")
}

/// Runs `f` with alpha and beta embedded in one field.
macro_rules! with_field {
    ($lv:expr, |$a:ident, $b:ident| $body:expr) => {
        match $lv.delta.value_at_p() {
            CharValue::Base(x) => {
                let $a = x;
                let $b = &$lv.beta;
                $body
            }
            CharValue::Quadratic(q) => {
                let $a = q;
                let $b = &q.embed(&$lv.beta);
                $body
            }
        }
    };
}

fn h0_generic<S: PadicField>(alpha: &S, beta: &S, p: u32, g: i64, t: Truncation, guard: i64) -> Result<usize, CohomologyError> {
    let a = twisted_minus_one(alpha, &phi_matrix(p, t.k, t.n), t.n);
    let b = twisted_minus_one(beta, &gamma_matrix(p, g, t.k, t.n)?, t.n);
    Ok(t.k - rank(&a.vstack(&b), guard))
}

fn h0_at(lv: &LevelData, t: Truncation, guard: i64) -> Result<usize, CohomologyError> {
    let p = lv.delta.prime();
    with_field!(lv, |a, b| h0_generic(a, b, p, lv.gen.g, t, guard))
}

/// Dimension of the joint kernel of alpha phi - 1 and beta gamma - 1 on R+/T^K,
/// at (K, N) and (2K, N+5).
pub fn h0_rank_one(
    delta: &PadicCharacter,
    t: Truncation,
    policy: &PrecisionPolicy,
    exec: Execution,
) -> Result<CohomologyReport, CohomologyError> {
    let bound = 1 + (-alpha_val(delta)).ceil().to_integer().max(0) as usize;
    if t.k < bound {
        return Err(CohomologyError::Invalid(format!("window {} is below the injection bound {bound}", t.k)));
    }
    let exceptional = delta.is_exceptional(policy)?;
    let levels = [t, t.refined()];
    let vals = exec.map(&levels, |&lt| -> Result<usize, CohomologyError> {
        let lv = level_data(delta, lt.n)?;
        h0_at(&lv, lt, policy.guard_digits)
    });
    let vals: Vec<Option<usize>> = vals.into_iter().map(|r| r.map(Some)).collect::<Result<_, _>>()?;
    let dim = Dim::stabilize(&vals);
    Ok(CohomologyReport {
        character: character_text(delta),
        h0_dim: Some(dim),
        h1_dim: None,
        levels: levels.to_vec(),
        stabilized: dim != Dim::Unstable,
        method: Method::DirectTruncation,
        exceptional,
        exploratory: false,
        h2_assumed_zero: !exceptional,
        h0_injection_bound: Some(bound),
        h1_detail: None,
    })
}

/// Per-level numbers behind an H^1 report.
#[derive(Clone, Debug, Serialize)]
pub struct LevelValues {
    pub level: Truncation,
    /// (h0, h1, h2) of the Herr complex on R+/T^K
    pub h_plus: [usize; 3],
    /// zeros of the F_m in the open disk (None: no unit coefficient in the window)
    pub lambda_newton: Option<usize>,
    /// h0 of x|x|/delta: the eigenline in the negative part
    pub epsilon_minus: usize,
    /// on the (possibly twisted) character: dim ker(alpha phi - 1) on R+/T^k
    pub ker_a_k: usize,
    pub coker_b_on_ker: usize,
    pub lambda_smith: usize,
    pub proof_pipeline: usize,
    pub direct: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct H1Detail {
    /// Neumann exponent on the character the pipeline ran on
    pub k: usize,
    pub twist_applied: i64,
    pub proof_pipeline: Dim,
    pub direct_truncation: Dim,
    pub methods_agree: bool,
    /// (alpha phi - 1) c = T^k solved on the window, when alpha is in Q_p
    pub neumann_ok: Option<bool>,
    pub levels: Vec<LevelValues>,
}

struct Herr {
    h: [usize; 3],
}

fn herr_generic<S: PadicField>(alpha: &S, beta: &S, p: u32, g: i64, t: Truncation, guard: i64) -> Result<Herr, CohomologyError> {
    let k = t.k;
    let a = twisted_minus_one(alpha, &phi_matrix(p, k, t.n), t.n);
    let b = twisted_minus_one(beta, &gamma_matrix(p, g, k, t.n)?, t.n);
    let d1 = b.vstack(&a);
    let d2 = a.hstack(&b.neg());
    let (r1, r2) = (rank(&d1, guard), rank(&d2, guard));
    Ok(Herr { h: [k - r1, 2 * k - r1 - r2, k - r2] })
}

/// coker of beta gamma - 1 on ker(alpha phi - 1) in R+/T^k.
fn finite_part_generic<S: PadicField>(
    alpha: &S,
    beta: &S,
    p: u32,
    g: i64,
    k: usize,
    n: i64,
    guard: i64,
) -> Result<(usize, usize), CohomologyError> {
    if k == 0 {
        return Ok((0, 0));
    }
    let a = twisted_minus_one(alpha, &phi_matrix(p, k, n), n);
    let b = twisted_minus_one(beta, &gamma_matrix(p, g, k, n)?, n);
    let ker = reduce(&a, guard).kernel(alpha, n);
    if ker.is_empty() {
        return Ok((0, 0));
    }
    let images: Vec<Vec<S>> = ker.iter().map(|v| b.apply(v)).collect();
    let m = Mat::from_fn(k, ker.len(), |i, j| images[j][i].clone());
    Ok((ker.len(), ker.len() - rank(&m, guard)))
}

fn level_h1(
    delta: &PadicCharacter,
    twisted: &PadicCharacter,
    k: usize,
    t: Truncation,
    guard: i64,
) -> Result<LevelValues, CohomologyError> {
    let p = delta.prime();
    let lv = level_data(delta, t.n)?;
    let herr = with_field!(lv, |a, b| herr_generic(a, b, p, lv.gen.g, t, guard))?;
    let mut newton = Some(0);
    for m in 0..p - 1 {
        let f = iwasawa_series(&lv.beta, &lv.gen, m, t.k, t.n)?;
        newton = match (newton, lambda_newton(&f, guard)) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
    }
    let dual = level_data(&delta.dual()?, t.n)?;
    let eps = h0_at(&dual, t, guard)?;

    let tw = level_data(twisted, t.n)?;
    let (ker_a_k, coker) = with_field!(tw, |a, b| finite_part_generic(a, b, p, tw.gen.g, k, t.n, guard))?;
    let mut smith = 0;
    for m in 0..p - 1 {
        smith += lambda_smith(&iwasawa_series(&tw.beta, &tw.gen, m, t.k, t.n)?, guard);
    }
    let [_, h1, h2] = herr.h;
    Ok(LevelValues {
        level: t,
        h_plus: herr.h,
        lambda_newton: newton,
        epsilon_minus: eps,
        ker_a_k,
        coker_b_on_ker: coker,
        lambda_smith: smith,
        proof_pipeline: coker + smith,
        direct: newton.map(|l| h1 - h2 + l + eps),
    })
}

fn neumann_check(twisted: &PadicCharacter, k: usize, t: Truncation, guard: i64) -> Result<Option<bool>, CohomologyError> {
    let Some(alpha) = twisted.value_at_p().as_base() else { return Ok(None) };
    let p = twisted.prime();
    // b = T^k is exact, so it can start well above n
    let work = 4 * t.n + 40;
    let mut cs = vec![PadicScalar::zero(p, work); t.k];
    if k >= t.k {
        return Ok(Some(false));
    }
    cs[k] = PadicScalar::one(p, work);
    let b = RobbaElement::series(p, cs)?;
    let c = match solve_neumann(alpha, k, &b, t.n) {
        Ok(c) => c,
        Err(CohomologyError::NotConverging(_)) => return Ok(Some(false)),
        Err(e) => return Err(e),
    };
    let phi_c = crate::robba::phi_act(&c)?.restrict(0, c.hi())?.scale(alpha);
    let r = phi_c.sub(&c)?.sub(&b)?;
    Ok(Some(r.coeffs().iter().all(|x| x.valuation().is_none_or(|v| v >= t.n - guard))))
}

/// dim H^1(R(delta)) by the proof pipeline (twisting when v(delta(p)) >= 0) and by direct truncation.
pub fn h1_rank_one(
    delta: &PadicCharacter,
    t: Truncation,
    policy: &PrecisionPolicy,
    exec: Execution,
) -> Result<CohomologyReport, CohomologyError> {
    let exceptional = delta.is_exceptional(policy)?;
    let v = alpha_val(delta);
    let twist = if v < Rational64::from_integer(0) { 0 } else { v.floor().to_integer() + 1 };
    let mut twisted = delta.clone();
    for _ in 0..twist {
        twisted = twisted.twist_by_t_inverse()?;
    }
    let k = neumann_k(alpha_val(&twisted));
    let levels = [t, t.refined()];
    let (per_level, neumann_ok) = exec.join(
        || exec.map(&levels, |&lt| level_h1(delta, &twisted, k, lt, policy.guard_digits)),
        || neumann_check(&twisted, k, t, policy.guard_digits),
    );
    let per_level: Vec<LevelValues> = per_level.into_iter().collect::<Result<_, _>>()?;
    let neumann_ok = neumann_ok?;
    let proof = Dim::stabilize(&per_level.iter().map(|l| Some(l.proof_pipeline)).collect::<Vec<_>>());
    let direct = Dim::stabilize(&per_level.iter().map(|l| l.direct).collect::<Vec<_>>());
    let (h1, method) = match (proof, direct) {
        (Dim::Value(a), Dim::Value(b)) if a == b => (Dim::Value(a), Method::BothAgree),
        (_, Dim::Value(b)) => (Dim::Value(b), Method::DirectTruncation),
        (Dim::Value(a), _) => (Dim::Value(a), Method::ProofPipeline),
        _ => (Dim::Unstable, Method::DirectTruncation),
    };
    Ok(CohomologyReport {
        character: character_text(delta),
        h0_dim: None,
        h1_dim: Some(h1),
        levels: levels.to_vec(),
        stabilized: h1 != Dim::Unstable,
        method,
        exceptional,
        exploratory: exceptional,
        h2_assumed_zero: !exceptional,
        h0_injection_bound: None,
        h1_detail: Some(H1Detail {
            k,
            twist_applied: twist,
            proof_pipeline: proof,
            direct_truncation: direct,
            methods_agree: proof == direct && proof != Dim::Unstable,
            neumann_ok,
            levels: per_level,
        }),
    })
}
