//! Continuous characters of Q_p^*, stored as (value at p, Teichmuller exponent, value at 1+p).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::padic::{
    padic_exp, padic_log, teichmuller, PadicError, PadicField, PadicScalar, PrecisionPolicy, QuadraticScalar,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("principal value {0} is not a 1-unit")]
    NotOneUnit(String),
    #[error("ambiguous at precision: {0}")]
    AmbiguousAtPrecision(String),
    #[error("cannot parse character: {0}")]
    Parse(String),
    #[error("characters over different primes {0} and {1}")]
    PrimeMismatch(u32, u32),
}

/// delta(p): in Q_p, or in Q_p(sqrt d) for Frobenius eigenvalues.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CharValue {
    Base(PadicScalar),
    Quadratic(QuadraticScalar),
}

impl CharValue {
    pub fn prime(&self) -> u32 {
        match self {
            CharValue::Base(x) => x.prime(),
            CharValue::Quadratic(x) => x.prime(),
        }
    }

    pub fn val(&self) -> Option<Rational64> {
        match self {
            CharValue::Base(x) => PadicField::val(x),
            CharValue::Quadratic(x) => x.val(),
        }
    }

    pub fn precision(&self) -> Rational64 {
        match self {
            CharValue::Base(x) => PadicField::precision(x),
            CharValue::Quadratic(x) => x.precision(),
        }
    }

    pub fn as_base(&self) -> Option<&PadicScalar> {
        match self {
            CharValue::Base(x) => Some(x),
            CharValue::Quadratic(_) => None,
        }
    }

    pub fn discriminant(&self) -> Option<i64> {
        match self {
            CharValue::Base(_) => None,
            CharValue::Quadratic(x) => Some(x.discriminant()),
        }
    }

    pub fn scale(&self, c: &PadicScalar) -> CharValue {
        match self {
            CharValue::Base(x) => CharValue::Base(x.mul_ref(c)),
            CharValue::Quadratic(x) => CharValue::Quadratic(x.scale(c)),
        }
    }

    pub fn mul(&self, o: &CharValue) -> CharValue {
        match (self, o) {
            (CharValue::Base(a), CharValue::Base(b)) => CharValue::Base(a.mul_ref(b)),
            (CharValue::Base(a), CharValue::Quadratic(b)) | (CharValue::Quadratic(b), CharValue::Base(a)) => {
                CharValue::Quadratic(b.scale(a))
            }
            (CharValue::Quadratic(a), CharValue::Quadratic(b)) => CharValue::Quadratic(a.mul(b)),
        }
    }

    pub fn inv(&self) -> Result<CharValue, PadicError> {
        Ok(match self {
            CharValue::Base(x) => CharValue::Base(x.inv()?),
            CharValue::Quadratic(x) => CharValue::Quadratic(x.inv()?),
        })
    }

    /// Three-way comparison with c: equal, different, or an AmbiguousAtPrecision error.
    pub fn equals_scalar(&self, c: &PadicScalar, guard: i64) -> Result<bool, CharacterError> {
        let (dist, prec) = self.distance_to(c);
        decide(dist, prec, guard, "comparison")
    }

    /// Valuation of self - c, None when equal at precision.
    fn distance_to(&self, c: &PadicScalar) -> (Option<Rational64>, Rational64) {
        match self {
            CharValue::Base(x) => {
                let d = x.sub_ref(c);
                (PadicField::val(&d), PadicField::precision(&d))
            }
            CharValue::Quadratic(x) => {
                let d = x.sub(&x.embed(c));
                (d.val(), d.precision())
            }
        }
    }
}

impl fmt::Debug for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_value(self))
    }
}

/// Three-way equality at precision: equal, different, or inside the guard band.
fn decide(dist: Option<Rational64>, prec: Rational64, guard: i64, what: &str) -> Result<bool, CharacterError> {
    let g = Rational64::from_integer(guard);
    match dist {
        None => Ok(true),
        Some(v) if v >= prec - g => Ok(true),
        Some(v) if v < prec - g * 2 => Ok(false),
        Some(v) => Err(CharacterError::AmbiguousAtPrecision(format!(
            "{what}: difference has valuation {v} with precision {prec} and {guard} guard digits"
        ))),
    }
}

/// Smallest primitive root modulo p^2; generates Z_p^* topologically.
pub fn gamma_generator(p: u32) -> i64 {
    let p = p as i64;
    let m = p * p;
    let order = p * (p - 1);
    (2..m)
        .find(|&g| {
            if g % p == 0 {
                return false;
            }
            let mut x = 1i64;
            for k in 1..=order {
                x = x * g % m;
                if x == 1 {
                    return k == order;
                }
            }
            false
        })
        .expect("Z/p^2 has primitive roots")
}

/// g = omega(g) <g>, with <g> = (1+p)^ell.
#[derive(Clone, Debug)]
pub struct CyclotomicGenerator {
    pub g: i64,
    pub teichmuller: PadicScalar,
    pub ell: PadicScalar,
}

impl CyclotomicGenerator {
    pub fn new(p: u32, prec: i64) -> Result<Self, PadicError> {
        let work = prec + 3;
        let g = gamma_generator(p);
        let w = teichmuller(g, p, work)?;
        let principal = PadicScalar::from_i64(g, p, work).div_ref(&w)?;
        let ell = padic_log(&principal)?.div_ref(&padic_log(&PadicScalar::from_i64(1 + p as i64, p, work))?)?;
        Ok(CyclotomicGenerator { g, teichmuller: w.truncate(prec), ell: ell.truncate(prec) })
    }
}

/// (1+p)^r for r in Z_p.
fn principal_power(p: u32, r: &PadicScalar, prec: i64) -> Result<PadicScalar, PadicError> {
    let l = padic_log(&PadicScalar::from_i64(1 + p as i64, p, prec + 2))?;
    Ok(padic_exp(&r.mul_ref(&l).truncate(prec + 1))?.truncate(prec))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    /// canonical text of the weight (a Z_p element)
    pub weight: String,
    pub precision: i64,
    pub integer: Option<i64>,
    /// the weight is close to an integer but outside the guard band
    pub ambiguous: bool,
    #[serde(skip)]
    pub value: PadicScalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum Exceptionality {
    /// t -> t^n
    Power(i64),
    /// t -> t^n |t|
    PowerTimesNorm(i64),
    None,
}

impl Exceptionality {
    pub fn is_exceptional(self) -> bool {
        self != Exceptionality::None
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicCharacter {
    value_at_p: CharValue,
    torsion_exponent: i64,
    principal_value: PadicScalar,
}

impl PadicCharacter {
    pub fn new(value_at_p: CharValue, torsion_exponent: i64, principal_value: PadicScalar) -> Result<Self, CharacterError> {
        let p = value_at_p.prime();
        if principal_value.prime() != p {
            return Err(CharacterError::PrimeMismatch(p, principal_value.prime()));
        }
        if value_at_p.val().is_none() {
            return Err(PadicError::DivisionByZeroAtPrecision(value_at_p.precision().to_integer()).into());
        }
        let one = PadicScalar::one(p, principal_value.abs_precision());
        if principal_value.sub_ref(&one).valuation().is_some_and(|v| v < 1) {
            return Err(CharacterError::NotOneUnit(principal_value.to_string()));
        }
        let torsion_exponent = torsion_exponent.rem_euclid(p as i64 - 1);
        Ok(PadicCharacter { value_at_p, torsion_exponent, principal_value })
    }

    pub fn trivial(p: u32, prec: i64) -> Self {
        Self::power(0, p, prec)
    }

    /// x -> x^n
    pub fn power(n: i64, p: u32, prec: i64) -> Self {
        let at_p = PadicScalar::from_parts(p, n, 1u32.into(), prec);
        let princ = PadicScalar::from_i64(1 + p as i64, p, prec).pow(n).unwrap().truncate(prec);
        PadicCharacter::new(CharValue::Base(at_p), n, princ).unwrap()
    }

    /// x -> x^n |x|
    pub fn power_times_norm(n: i64, p: u32, prec: i64) -> Self {
        let x = Self::power(n, p, prec);
        let at_p = x.value_at_p.scale(&PadicScalar::from_ratio(1, p as i64, p, prec + 2));
        PadicCharacter { value_at_p: at_p, ..x }
    }

    /// delta(p) = a, trivial on Z_p^*.
    pub fn unramified(a: CharValue) -> Result<Self, CharacterError> {
        let p = a.prime();
        let prec = a.precision().to_integer().max(1);
        Self::new(a, 0, PadicScalar::one(p, prec))
    }

    pub fn prime(&self) -> u32 {
        self.value_at_p.prime()
    }

    pub fn value_at_p(&self) -> &CharValue {
        &self.value_at_p
    }

    pub fn torsion_exponent(&self) -> i64 {
        self.torsion_exponent
    }

    pub fn principal_value(&self) -> &PadicScalar {
        &self.principal_value
    }

    pub fn mul(&self, o: &Self) -> Result<Self, CharacterError> {
        if self.prime() != o.prime() {
            return Err(CharacterError::PrimeMismatch(self.prime(), o.prime()));
        }
        Self::new(
            self.value_at_p.mul(&o.value_at_p),
            self.torsion_exponent + o.torsion_exponent,
            self.principal_value.mul_ref(&o.principal_value),
        )
    }

    pub fn inverse(&self) -> Result<Self, CharacterError> {
        Self::new(self.value_at_p.inv()?, -self.torsion_exponent, self.principal_value.inv()?)
    }

    /// t^-1 delta, i.e. delta divided by x -> x.
    pub fn twist_by_t_inverse(&self) -> Result<Self, CharacterError> {
        let p = self.prime();
        let prec = self.principal_value.abs_precision();
        let inv_p = PadicScalar::from_ratio(1, p as i64, p, prec + 2);
        let inv_u = PadicScalar::from_i64(1 + p as i64, p, prec).inv()?;
        Self::new(self.value_at_p.scale(&inv_p), self.torsion_exponent - 1, self.principal_value.mul_ref(&inv_u))
    }

    /// x|x| delta^-1
    pub fn dual(&self) -> Result<Self, CharacterError> {
        let p = self.prime();
        let prec = self.principal_value.abs_precision();
        let xnx = PadicCharacter::power_times_norm(1, p, prec + 2);
        xnx.mul(&self.inverse()?)
    }

    /// delta on Z_p^* evaluated at the generator: omega(g)^j (pi)^ell.
    pub fn gamma_value(&self, gen: &CyclotomicGenerator) -> Result<PadicScalar, CharacterError> {
        let prec = self.principal_value.abs_precision().min(gen.ell.abs_precision());
        let tors = gen.teichmuller.pow(self.torsion_exponent)?;
        let princ = padic_exp(&gen.ell.mul_ref(&padic_log(&self.principal_value)?).truncate(prec))?;
        Ok(tors.mul_ref(&princ).truncate(prec))
    }

    /// delta(x) for x in Q_p^*.
    pub fn eval(&self, x: &PadicScalar) -> Result<CharValue, CharacterError> {
        let p = self.prime();
        let v = x.valuation().ok_or(PadicError::DivisionByZeroAtPrecision(x.abs_precision()))?;
        let unit = x.mul_ref(&PadicScalar::from_i64(p as i64, p, x.abs_precision()).pow(-v)?);
        let prec = unit.abs_precision().min(self.principal_value.abs_precision());
        let w = teichmuller(unit.residue().unwrap() as i64, p, prec + 2)?;
        let principal = unit.div_ref(&w)?;
        let log_u = padic_log(&PadicScalar::from_i64(1 + p as i64, p, prec + 2))?;
        let r = padic_log(&principal)?.div_ref(&log_u)?;
        let princ = padic_exp(&r.mul_ref(&padic_log(&self.principal_value)?).truncate(prec))?;
        let on_units = w.pow(self.torsion_exponent)?.mul_ref(&princ).truncate(prec);
        let mut at_p = CharValue::Base(PadicScalar::one(p, prec));
        let base = if v >= 0 { self.value_at_p.clone() } else { self.value_at_p.inv()? };
        for _ in 0..v.abs() {
            at_p = at_p.mul(&base);
        }
        Ok(at_p.scale(&on_units))
    }

    /// s = -log(delta(1+p)) / log(1+p).
    pub fn weight(&self, policy: &PrecisionPolicy) -> Result<WeightReport, CharacterError> {
        let p = self.prime();
        let prec = self.principal_value.abs_precision();
        let lp = padic_log(&PadicScalar::from_i64(1 + p as i64, p, prec + 1))?;
        let s = padic_log(&self.principal_value)?.neg_ref().div_ref(&lp)?;
        let s = s.truncate(s.abs_precision().min(policy.abs_precision));
        let digits = s.abs_precision() - policy.guard_digits;
        let integer = if digits >= 1 { s.as_small_integer(digits, policy.integer_window) } else { None };
        let wide = s.abs_precision() - 2 * policy.guard_digits;
        let ambiguous = integer.is_none() && wide >= 1 && s.as_small_integer(wide, policy.integer_window).is_some();
        Ok(WeightReport { weight: fmt_scalar(&s), precision: s.abs_precision(), integer, ambiguous, value: s })
    }

    pub fn exceptionality(&self, policy: &PrecisionPolicy) -> Result<Exceptionality, CharacterError> {
        let w = self.weight(policy)?;
        if w.ambiguous {
            return Err(CharacterError::AmbiguousAtPrecision(format!("weight {} is nearly an integer", w.weight)));
        }
        let Some(s) = w.integer else { return Ok(Exceptionality::None) };
        let n = -s;
        let p = self.prime();
        if (self.torsion_exponent - n).rem_euclid(p as i64 - 1) != 0 {
            return Ok(Exceptionality::None);
        }
        let prec = self.principal_value.abs_precision();
        let target = PadicScalar::from_i64(1 + p as i64, p, prec).pow(n)?;
        let d = self.principal_value.sub_ref(&target);
        if !decide(PadicField::val(&d), PadicField::precision(&d), policy.guard_digits, "value at 1+p")? {
            return Ok(Exceptionality::None);
        }
        let vprec = self.value_at_p.precision().to_integer() + n.abs() + 2;
        for (m, kind) in [(n, Exceptionality::Power(n)), (n - 1, Exceptionality::PowerTimesNorm(n))] {
            let (dist, dp) = self.value_at_p.distance_to(&PadicScalar::from_parts(p, m, 1u32.into(), vprec));
            if decide(dist, dp, policy.guard_digits, "value at p")? {
                return Ok(kind);
            }
        }
        Ok(Exceptionality::None)
    }

    pub fn is_exceptional(&self, policy: &PrecisionPolicy) -> Result<bool, CharacterError> {
        Ok(self.exceptionality(policy)?.is_exceptional())
    }

    /// Parses "p^a*u ; tors=j ; princ=v" at absolute precision `prec`.
    pub fn parse(text: &str, p: u32, prec: i64) -> Result<Self, CharacterError> {
        let mut value = None;
        let mut tors = None;
        let mut princ = None;
        for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = part.strip_prefix("tors=") {
                tors = Some(rest.trim().parse::<i64>().map_err(|_| bad(format!("bad torsion exponent {rest}")))?);
            } else if let Some(rest) = part.strip_prefix("princ=") {
                princ = Some(parse_principal(rest.trim(), p, prec)?);
            } else if value.is_none() {
                value = Some(parse_value(part, p, prec)?);
            } else {
                return Err(bad(format!("unexpected field {part}")));
            }
        }
        let value = value.ok_or_else(|| bad("missing value at p"))?;
        Self::new(value, tors.unwrap_or(0), princ.unwrap_or_else(|| PadicScalar::one(p, prec)))
    }
}

impl fmt::Display for PadicCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ; tors={} ; princ={}",
            fmt_value(&self.value_at_p),
            self.torsion_exponent,
            fmt_scalar(&self.principal_value)
        )
    }
}

impl fmt::Debug for PadicCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn bad(msg: impl Into<String>) -> CharacterError {
    CharacterError::Parse(msg.into())
}

/// Shortest rational-looking representative: n or n/p^k, n the symmetric residue.
pub fn fmt_scalar(x: &PadicScalar) -> String {
    let p = x.prime();
    match x.valuation() {
        None => "0".to_string(),
        Some(v) if v >= 0 => x.symmetric_residue(x.abs_precision()).unwrap().to_string(),
        Some(v) => {
            let shifted = x.mul_ref(&PadicScalar::from_i64(p as i64, p, x.abs_precision() - v).pow(-v).unwrap());
            let n = shifted.symmetric_residue(shifted.abs_precision()).unwrap();
            format!("{n}/{}", BigInt::from(p).pow((-v) as u32))
        }
    }
}

/// `p^v*u` with u a unit, quadratic units written (a+b*sqrt(d)).
pub fn fmt_value(x: &CharValue) -> String {
    let p = x.prime();
    let v = x.val().map_or(0, |v| v.floor().to_integer());
    let unit = x.scale(&PadicScalar::from_i64(p as i64, p, x.precision().to_integer() + v.abs() + 2).pow(-v).unwrap());
    let u = match &unit {
        CharValue::Base(y) => fmt_scalar(y),
        CharValue::Quadratic(y) => {
            format!("({}+{}*sqrt({}))", fmt_scalar(y.re()), fmt_scalar(y.im()), y.discriminant())
        }
    };
    if v == 0 { u } else { format!("p^{v}*{u}") }
}

fn parse_rational(s: &str) -> Result<BigRational, CharacterError> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad(format!("bad rational {s}")))?;
    let d: BigInt = d.trim().parse().map_err(|_| bad(format!("bad rational {s}")))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn parse_unit(s: &str, p: u32, prec: i64) -> Result<CharValue, CharacterError> {
    let s = s.trim();
    let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return Ok(CharValue::Base(PadicScalar::from_rational(&parse_rational(s)?, p, prec)));
    };
    // x+y*sqrt(d) or x-y*sqrt(d)
    let inner: String = inner.chars().filter(|c| !c.is_whitespace()).collect();
    let (head, d) = inner.rsplit_once("*sqrt(").ok_or_else(|| bad(format!("expected (x+y*sqrt(d)), got {s}")))?;
    let d: i64 = d.strip_suffix(')').unwrap_or(d).parse().map_err(|_| bad(format!("bad discriminant in {s}")))?;
    let split = head.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').last();
    let (x, y) = match split {
        Some((i, '+')) => (&head[..i], head[i + 1..].to_string()),
        Some((i, _)) => (&head[..i], format!("-{}", &head[i + 1..])),
        None => ("0", head.to_string()),
    };
    let y = y.replace("--", "");
    let x = PadicScalar::from_rational(&parse_rational(x)?, p, prec);
    let y = PadicScalar::from_rational(&parse_rational(&y)?, p, prec);
    Ok(CharValue::Quadratic(QuadraticScalar::new(x, y, d)?))
}

fn parse_value(s: &str, p: u32, prec: i64) -> Result<CharValue, CharacterError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (exp, unit) = match s.strip_prefix("p^") {
        Some(rest) => {
            let (e, u) = rest.split_once('*').unwrap_or((rest, "1"));
            (e.parse::<i64>().map_err(|_| bad(format!("bad exponent {e}")))?, u.to_string())
        }
        None if s == "p" => (1, "1".to_string()),
        None => (0, s),
    };
    let u = parse_unit(&unit, p, prec + exp.abs() + 2)?;
    let pe = PadicScalar::from_parts(p, exp, 1u32.into(), prec + exp.abs() + 2);
    Ok(match u.scale(&pe) {
        CharValue::Base(x) => CharValue::Base(x.truncate(prec)),
        q => q,
    })
}

fn parse_principal(s: &str, p: u32, prec: i64) -> Result<PadicScalar, CharacterError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(r) = compact.strip_prefix("(1+p)^") {
        let r = parse_rational(r)?;
        if r.denom().is_negative() || (r.denom() % BigInt::from(p)).is_zero() {
            return Err(bad(format!("exponent {r} is not in Z_p")));
        }
        return Ok(principal_power(p, &PadicScalar::from_rational(&r, p, prec + 2), prec)?);
    }
    Ok(PadicScalar::from_rational(&parse_rational(&compact)?, p, prec))
}

impl FromStr for CharValue {
    type Err = CharacterError;
    /// "p=<prime>;prec=<N>;<value>"
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut it = s.splitn(3, ';');
        let p = it.next().and_then(|x| x.strip_prefix("p=")).and_then(|x| x.parse().ok()).ok_or_else(|| bad("missing p="))?;
        let prec = it.next().and_then(|x| x.strip_prefix("prec=")).and_then(|x| x.parse().ok()).ok_or_else(|| bad("missing prec="))?;
        parse_value(it.next().unwrap_or(""), p, prec)
    }
}
