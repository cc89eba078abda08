//! The psi = 0 part in Iwasawa coordinates: on the eta = omega^m component of
//! Z_p[[Z_p^*]], beta [g] - 1 acts as multiplication by
//! F_m(X) = beta omega(g)^m (1+X)^ell - 1.

use num_rational::Rational64;

use super::CohomologyError;
use crate::characters::CyclotomicGenerator;
use crate::linalg::{reduce, Mat};
use crate::padic::PadicScalar;
use crate::robba::binomial_series;

/// Coefficients of F_m through X^(l-1), to n digits.
pub fn iwasawa_series(
    beta: &PadicScalar,
    gen: &CyclotomicGenerator,
    m: u32,
    l: usize,
    n: i64,
) -> Result<Vec<PadicScalar>, CohomologyError> {
    let p = beta.prime();
    let s = binomial_series(&gen.ell, l - 1, n)?;
    let c = beta.mul_ref(&gen.teichmuller.pow(m as i64)?);
    let mut out: Vec<PadicScalar> = s.coeffs().iter().map(|x| c.mul_ref(x).truncate(n)).collect();
    out[0] = out[0].sub_ref(&PadicScalar::one(p, n));
    Ok(out)
}

/// Number of generators of coker(F) on Z_p[[X]]/X^l: zero and non-unit elementary divisors.
pub fn lambda_smith(f: &[PadicScalar], guard: i64) -> usize {
    let l = f.len();
    let zero = PadicScalar::zero(f[0].prime(), f[0].abs_precision());
    let m = Mat::from_fn(l, l, |i, j| if i >= j { f[i - j].clone() } else { zero.clone() });
    let r = reduce(&m, guard);
    let nonunit = r.pivot_vals.iter().filter(|&&v| v > Rational64::from_integer(0)).count();
    (l - r.rank) + nonunit
}

/// Zeros of F in the open unit disk, from the Newton polygon up to the first unit coefficient.
/// None when no unit coefficient appears in the window.
pub fn lambda_newton(f: &[PadicScalar], guard: i64) -> Option<usize> {
    let r = f.iter().take_while(|c| c.is_negligible(guard)).count();
    let d = f.iter().position(|c| c.is_unit())?;
    if d == r {
        return Some(r);
    }
    let slopes = crate::padic::newton_slopes(&f[r..=d]).ok()?;
    Some(r + slopes.iter().filter(|&&s| s > Rational64::from_integer(0)).count())
}
