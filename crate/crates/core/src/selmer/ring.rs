//! Euclidean rings (Z and Q[x]) and their residue fields at primes.

use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SelmerError;

pub trait Euclidean: Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// (q, r) with self = q o + r and r smaller than o; o nonzero.
    fn div_rem(&self, o: &Self) -> (Self, Self);
    /// Euclidean size comparison.
    fn smaller(&self, o: &Self) -> bool;
    fn is_unit(&self) -> bool;
    /// A unit u with self * u in canonical form, and its inverse.
    fn canonical_unit(&self) -> (Self, Self);

    fn divides(&self, x: &Self) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        x.div_rem(self).1.is_zero()
    }

    fn normalized(&self) -> Self {
        self.mul(&self.canonical_unit().0)
    }
}

/// A PID whose quotients by primes are computable fields.
pub trait Pid: Euclidean {
    type Residue: Field;
    fn reduce(&self, f: &Self) -> Self::Residue;
    fn parse_element(s: &str) -> Result<Self, SelmerError>;
    /// Checks that f generates a maximal ideal this crate can work with.
    fn check_prime(f: &Self) -> Result<(), SelmerError>;
    const KIND: RingKind;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingKind {
    Integers,
    Polynomials,
}

pub trait Field: Clone + Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl Euclidean for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_rem(&self, o: &Self) -> (Self, Self) {
        // remainder of least absolute value keeps entries small
        let (q, r) = self.div_mod_floor(o);
        if (&r + &r).abs() > o.abs() {
            (q + 1, r - o)
        } else {
            (q, r)
        }
    }
    fn smaller(&self, o: &Self) -> bool {
        self.abs() < o.abs()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn canonical_unit(&self) -> (Self, Self) {
        let u = if self.is_negative() { BigInt::from(-1) } else { BigInt::from(1) };
        (u.clone(), u)
    }
}

/// Element of Z/p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Field for Fp {
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp { v: (self.v + o.v) % self.p, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp { v: (self.v + self.p - o.v) % self.p, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Fp { v: ((self.v as u128 * o.v as u128) % self.p as u128) as u64, p: self.p }
    }
    fn inv(&self) -> Self {
        let e = (self.v as i128).extended_gcd(&(self.p as i128));
        Fp { v: e.x.rem_euclid(self.p as i128) as u64, p: self.p }
    }
}

impl Pid for BigInt {
    type Residue = Fp;
    const KIND: RingKind = RingKind::Integers;

    fn reduce(&self, f: &Self) -> Fp {
        let p = f.to_u64().expect("prime fits in u64");
        Fp { v: self.mod_floor(f).to_u64().unwrap(), p }
    }

    fn parse_element(s: &str) -> Result<Self, SelmerError> {
        s.trim().parse().map_err(|_| SelmerError::Parse(format!("not an integer: {s}")))
    }

    fn check_prime(f: &Self) -> Result<(), SelmerError> {
        let n = f.to_u64().filter(|&n| n >= 2).ok_or_else(|| SelmerError::NotPrime(f.to_string()))?;
        if (2..).take_while(|d| d * d <= n).any(|d| n % d == 0) {
            return Err(SelmerError::NotPrime(f.to_string()));
        }
        Ok(())
    }
}

/// Polynomial over Q, coefficients from the constant term up, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly(Vec<BigRational>);

impl QPoly {
    pub fn new(mut cs: Vec<BigRational>) -> Self {
        while cs.last().is_some_and(|c| c.is_zero()) {
            cs.pop();
        }
        QPoly(cs)
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }
}

impl Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Euclidean for QPoly {
    fn zero() -> Self {
        QPoly(Vec::new())
    }
    fn one() -> Self {
        QPoly::from_ints(&[1])
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
    fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
    fn neg(&self) -> Self {
        QPoly(self.0.iter().map(|c| -c).collect())
    }
    fn div_rem(&self, o: &Self) -> (Self, Self) {
        let d = o.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        let mut q = vec![BigRational::zero(); self.0.len().saturating_sub(d).max(1)];
        while let Some(rd) = r.degree().filter(|&rd| rd >= d) {
            let c = r.lead() / o.lead();
            q[rd - d] = c.clone();
            let mut shift = vec![BigRational::zero(); rd - d];
            shift.extend(o.0.iter().map(|a| a * &c));
            r = r.sub(&QPoly::new(shift));
        }
        (Self::new(q), r)
    }
    fn smaller(&self, o: &Self) -> bool {
        match (self.degree(), o.degree()) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }
    fn is_unit(&self) -> bool {
        self.degree() == Some(0)
    }
    fn canonical_unit(&self) -> (Self, Self) {
        if self.is_zero() {
            return (Self::one(), Self::one());
        }
        let l = self.lead().clone();
        (QPoly(vec![l.recip()]), QPoly(vec![l]))
    }
}

/// Q or Q(theta) with theta^2 + c1 theta + c0 = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberFieldElt {
    pub a: BigRational,
    pub b: BigRational,
    /// (c0, c1) for the quadratic case
    pub modulus: Option<(BigRational, BigRational)>,
}

impl Field for NumberFieldElt {
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        NumberFieldElt { a: &self.a + &o.a, b: &self.b + &o.b, modulus: self.modulus.clone() }
    }
    fn sub(&self, o: &Self) -> Self {
        NumberFieldElt { a: &self.a - &o.a, b: &self.b - &o.b, modulus: self.modulus.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        match &self.modulus {
            None => NumberFieldElt { a: &self.a * &o.a, b: BigRational::zero(), modulus: None },
            Some((c0, c1)) => {
                let bd = &self.b * &o.b;
                NumberFieldElt {
                    a: &self.a * &o.a - &bd * c0,
                    b: &self.a * &o.b + &self.b * &o.a - &bd * c1,
                    modulus: self.modulus.clone(),
                }
            }
        }
    }
    fn inv(&self) -> Self {
        match &self.modulus {
            None => NumberFieldElt { a: self.a.recip(), b: BigRational::zero(), modulus: None },
            Some((c0, c1)) => {
                // conjugate theta' = -c1 - theta
                let n = &self.a * &self.a - &self.a * &self.b * c1 + &self.b * &self.b * c0;
                NumberFieldElt { a: (&self.a - &self.b * c1) / &n, b: -&self.b / &n, modulus: self.modulus.clone() }
            }
        }
    }
}

impl Pid for QPoly {
    type Residue = NumberFieldElt;
    const KIND: RingKind = RingKind::Polynomials;

    fn reduce(&self, f: &Self) -> NumberFieldElt {
        let f = f.normalized();
        let r = self.div_rem(&f).1;
        match f.degree() {
            Some(1) => {
                // evaluate at the root -c0
                let root = -f.coeff(0);
                let mut acc = BigRational::zero();
                for c in r.0.iter().rev() {
                    acc = acc * &root + c;
                }
                NumberFieldElt { a: acc, b: BigRational::zero(), modulus: None }
            }
            Some(2) => NumberFieldElt { a: r.coeff(0), b: r.coeff(1), modulus: Some((f.coeff(0), f.coeff(1))) },
            _ => panic!("residue fields are implemented for degree 1 and 2"),
        }
    }

    fn parse_element(s: &str) -> Result<Self, SelmerError> {
        parse_poly(s)
    }

    fn check_prime(f: &Self) -> Result<(), SelmerError> {
        let bad = || SelmerError::NotPrime(f.to_string());
        match f.degree() {
            Some(1) => Ok(()),
            Some(2) => {
                let g = f.normalized();
                let disc = g.coeff(1) * g.coeff(1) - BigRational::from_integer(4.into()) * g.coeff(0);
                if is_rational_square(&disc) { Err(bad()) } else { Ok(()) }
            }
            _ => Err(bad()),
        }
    }
}

fn is_rational_square(q: &BigRational) -> bool {
    if q.is_negative() {
        return false;
    }
    let sq = |n: &BigInt| {
        let r = n.sqrt();
        &r * &r == *n
    };
    sq(q.numer()) && sq(q.denom())
}

fn parse_rational(s: &str) -> Result<BigRational, SelmerError> {
    let bad = || SelmerError::Parse(format!("bad coefficient {s}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if Zero::is_zero(&d) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// Parses sums of terms like "3/2*x^2", "-x", "7".
pub fn parse_poly(s: &str) -> Result<QPoly, SelmerError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(SelmerError::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in t.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push(&t[start..i]);
            start = i;
        }
    }
    terms.push(&t[start..]);
    let mut acc = QPoly::zero();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef, mono) = match body.find('x') {
            None => (body, None),
            Some(i) => {
                let c = body[..i].trim_end_matches('*');
                (c, Some(&body[i + 1..]))
            }
        };
        let c = if coef.is_empty() { BigRational::one() } else { parse_rational(coef)? };
        let e: usize = match mono {
            None => 0,
            Some("") => 1,
            Some(rest) => rest
                .strip_prefix('^')
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| SelmerError::Parse(format!("bad monomial in {s}")))?,
        };
        let mut cs = vec![BigRational::zero(); e + 1];
        cs[e] = c * BigRational::from_integer(sign.into());
        acc = acc.add(&QPoly::new(cs));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip() {
        for s in ["x^2 + 1", "-3/2*x^3 + x - 7", "0", "x"] {
            assert_eq!(parse_poly(s).unwrap().to_string(), s);
        }
        let p = parse_poly("x^3 - 1").unwrap();
        let (q, r) = p.div_rem(&parse_poly("x - 1").unwrap());
        assert_eq!(q.to_string(), "x^2 + x + 1");
        assert!(r.is_zero());
    }

    #[test]
    fn residues() {
        let f = parse_poly("x^2 + 1").unwrap();
        let x = parse_poly("x").unwrap().reduce(&f);
        let minus_one = x.mul(&x);
        assert_eq!(minus_one.a, BigRational::from_integer((-1).into()));
        let y = parse_poly("x + 2").unwrap().reduce(&f);
        assert!(y.mul(&y.inv()).sub(&QPoly::one().reduce(&f)).is_zero());
        assert!(QPoly::check_prime(&parse_poly("x^2 - 4").unwrap()).is_err());
        let a = BigInt::from(10).reduce(&BigInt::from(7));
        assert_eq!(a.mul(&a.inv()).v, 1);
    }
}
