use super::{hensel_root, PadicError, PadicScalar};

fn floor_log(p: u32, n: i64) -> i64 {
    let mut k = 0;
    let mut m = p as i64;
    while m <= n {
        m *= p as i64;
        k += 1;
    }
    k
}

/// log on 1-units: sum (-1)^(n+1) y^n / n with y = x - 1.
pub fn padic_log(x: &PadicScalar) -> Result<PadicScalar, PadicError> {
    let p = x.prime();
    let prec = x.abs_precision();
    let one = PadicScalar::one(p, prec);
    let y = x.sub_ref(&one);
    let vy = match y.valuation() {
        None => return Ok(PadicScalar::zero(p, prec)),
        Some(v) => v,
    };
    if vy < 1 {
        return Err(PadicError::DomainError(format!("log needs a 1-unit, got {x}")));
    }
    // terms with n*vy - log_p(n) >= prec are below precision
    let mut last = 1;
    while last * vy - floor_log(p, last) < prec || (last + 1) * vy - floor_log(p, last + 1) < prec {
        last += 1;
    }
    let work = prec + floor_log(p, last) + 1;
    let y = y.with_precision(work);
    let mut pw = y.clone();
    let mut acc = PadicScalar::zero(p, work);
    for n in 1..=last {
        let term = pw.div_ref(&PadicScalar::from_i64(n, p, work + 8))?;
        acc = if n % 2 == 1 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
        pw = pw.mul_ref(&y).truncate(work);
    }
    Ok(acc.truncate(prec))
}

/// exp on p Z_p (p odd).
pub fn padic_exp(x: &PadicScalar) -> Result<PadicScalar, PadicError> {
    let p = x.prime();
    let prec = x.abs_precision();
    let vx = match x.valuation() {
        None => return Ok(PadicScalar::one(p, prec)),
        Some(v) => v,
    };
    if vx < 1 {
        return Err(PadicError::DomainError(format!("exp needs valuation >= 1, got {x}")));
    }
    // v(x^n/n!) >= n*vx - (n-1)/(p-1)
    let pm1 = (p - 1) as i64;
    let mut last = 1;
    while (last + 1) * vx - last / pm1 < prec {
        last += 1;
    }
    let fact_loss = last / pm1 + 1;
    let work = prec + fact_loss + 1;
    let x = x.with_precision(work);
    let mut term = PadicScalar::one(p, work);
    let mut acc = term.clone();
    for n in 1..=last {
        term = term.mul_ref(&x).div_ref(&PadicScalar::from_i64(n, p, work + 8))?;
        acc = acc.add_ref(&term);
    }
    Ok(acc.truncate(prec))
}

/// x^e = exp(e log x) for a 1-unit x and e in Z_p.
pub fn padic_pow(x: &PadicScalar, e: &PadicScalar) -> Result<PadicScalar, PadicError> {
    let l = padic_log(x)?;
    let prec = x.abs_precision().min(e.abs_precision());
    padic_exp(&e.mul_ref(&l).truncate(prec))
}

/// Teichmuller representative of a unit residue.
pub fn teichmuller(residue: i64, p: u32, prec: i64) -> Result<PadicScalar, PadicError> {
    let r = residue.rem_euclid(p as i64);
    if r == 0 {
        return Err(PadicError::DomainError("Teichmuller lift of 0 requested".into()));
    }
    // root of X^(p-1) - 1 near r
    let mut poly = vec![PadicScalar::zero(p, prec); p as usize];
    poly[0] = PadicScalar::from_i64(-1, p, prec);
    poly[(p - 1) as usize] = PadicScalar::one(p, prec);
    hensel_root(&poly, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_exp_examples() {
        let (p, n) = (5, 25);
        let one = PadicScalar::one(p, n);
        assert!(padic_log(&one).unwrap().is_zero());
        let x = PadicScalar::from_i64(6, p, n);
        let back = padic_exp(&padic_log(&x).unwrap()).unwrap();
        assert!(back.same_at(&x, n - 5));

        // two separate series evaluations
        let l3 = padic_log(&PadicScalar::from_i64(216, p, n)).unwrap();
        let l1 = padic_log(&x).unwrap();
        assert!(l3.same_at(&l1.mul_ref(&PadicScalar::from_i64(3, p, n)), n - 5));
    }

    #[test]
    fn log_domain() {
        assert!(padic_log(&PadicScalar::from_i64(2, 5, 10)).is_err());
        assert!(padic_exp(&PadicScalar::from_i64(2, 5, 10)).is_err());
    }

    #[test]
    fn log_of_p_plus_one_valuation() {
        let l = padic_log(&PadicScalar::from_i64(4, 3, 20)).unwrap();
        assert_eq!(l.valuation(), Some(1));
        assert_eq!(l.abs_precision(), 20);
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        let w = teichmuller(2, 5, 20).unwrap();
        assert_eq!(w.residue(), Some(2));
        assert!(w.pow(4).unwrap().same_at(&PadicScalar::one(5, 20), 20));
    }

    #[test]
    fn small_prime_exp() {
        // p = 3 has the slowest exp convergence
        let x = PadicScalar::from_i64(3, 3, 20);
        let e = padic_exp(&x).unwrap();
        let l = padic_log(&e).unwrap();
        assert!(l.same_at(&x, 15));
    }
}
