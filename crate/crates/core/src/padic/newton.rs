use num_rational::Rational64;

use super::{PadicError, PadicScalar};

/// Root valuations (negated lower-hull slopes) of sum c_i X^i, with multiplicity, ascending.
pub fn newton_slopes(coeffs: &[PadicScalar]) -> Result<Vec<Rational64>, PadicError> {
    if coeffs.len() < 2 {
        return Ok(Vec::new());
    }
    let n = coeffs.len() - 1;
    if coeffs[0].is_zero() || coeffs[n].is_zero() {
        return Err(PadicError::InsufficientPrecision(
            "leading or constant coefficient is zero at precision".into(),
        ));
    }
    let pts: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v)))
        .collect();

    // lower hull, monotone chain
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a -> pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    // an undetermined coefficient must not be able to dip below the hull
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            continue;
        }
        let i = i as i64;
        let seg = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0).expect("interior index");
        let (a, b) = (seg[0], seg[1]);
        let height = Rational64::from_integer(a.1)
            + Rational64::new((b.1 - a.1) * (i - a.0), b.0 - a.0);
        if Rational64::from_integer(c.abs_precision()) < height {
            return Err(PadicError::InsufficientPrecision(format!(
                "coefficient {i} is zero only to {} digits, hull needs {height}",
                c.abs_precision()
            )));
        }
    }

    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let len = w[1].0 - w[0].0;
        let root_val = Rational64::new(w[0].1 - w[1].1, len);
        out.extend(std::iter::repeat(root_val).take(len as usize));
    }
    out.sort();
    Ok(out)
}

fn eval(poly: &[PadicScalar], x: &PadicScalar) -> PadicScalar {
    let mut acc = PadicScalar::zero(x.prime(), x.abs_precision());
    for c in poly.iter().rev() {
        acc = acc.mul_ref(x).add_ref(c);
    }
    acc
}

fn derivative(poly: &[PadicScalar]) -> Vec<PadicScalar> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul_ref(&PadicScalar::from_i64(i as i64, c.prime(), c.abs_precision())))
        .collect()
}

/// Newton iteration from a simple root modulo p.
pub fn hensel_root(poly: &[PadicScalar], seed: i64) -> Result<PadicScalar, PadicError> {
    let first = poly.first().ok_or_else(|| PadicError::NoLift("empty polynomial".into()))?;
    let p = first.prime();
    if poly.iter().any(|c| c.valuation().is_some_and(|v| v < 0)) {
        return Err(PadicError::DomainError("coefficients must be integral".into()));
    }
    let prec = poly.iter().map(|c| c.abs_precision()).min().unwrap();
    let dpoly = derivative(poly);
    let mut r = PadicScalar::from_i64(seed, p, prec);
    if eval(poly, &r).valuation().is_some_and(|v| v < 1) {
        return Err(PadicError::NoLift(format!("{seed} is not a root modulo {p}")));
    }
    if eval(&dpoly, &r).valuation().is_none_or(|v| v > 0) {
        return Err(PadicError::NoLift(format!("derivative vanishes modulo {p} at {seed}")));
    }
    // digits double each step
    let mut steps = 0;
    let max_steps = 2 + (64 - (prec.max(1) as u64).leading_zeros()) as usize;
    loop {
        let f = eval(poly, &r);
        if f.is_zero() {
            break;
        }
        let df = eval(&dpoly, &r);
        r = r.sub_ref(&f.div_ref(&df)?).truncate(prec);
        steps += 1;
        if steps > max_steps {
            return Err(PadicError::InsufficientPrecision("Hensel iteration stalled".into()));
        }
    }
    Ok(r)
}
