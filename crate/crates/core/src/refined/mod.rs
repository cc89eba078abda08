//! Crystalline Frobenius data of newforms at p, the gates a record has to pass
//! before its trianguline parameter is used, refined-family axiom checks on
//! finite samples, and a fixed table of Iwasawa dimensions.

mod eigen;
mod family;

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::characters::CharacterError;
use crate::cohomology::CohomologyError;
use crate::padic::{is_odd_prime, rational_valuation, PadicError};

pub use eigen::{
    build_parameter, classify_refinement, crystalline_eigenvalues, refine_batch, theorem_gates, Classification,
    Eigenvalues, Gates, ParameterSummary, RefinementReport, Verdict,
};
pub use family::{family_axiom_check, FamilyReport, FamilySample, FrobValue, PointReport, SamplePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefinedError {
    #[error("line {line}, field {field}: {msg}")]
    Parse { line: usize, field: String, msg: String },
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("{0} is not supersingular at p")]
    NotSupersingular(String),
    #[error("n = {0} is not in the table (odd n only)")]
    OutOfTable(i64),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("cannot read {0}")]
    Io(String),
}

/// Eigenform of level Gamma_0(N) and weight k with T_p eigenvalue a_p, p odd and prime to N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformRecord {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub p: u32,
    pub ap: BigRational,
}

impl NewformRecord {
    pub fn new(label: &str, level: u64, weight: u32, p: u32, ap: BigRational) -> Result<Self, RefinedError> {
        let bad = |m: String| Err(RefinedError::Invalid(format!("{label}: {m}")));
        if level == 0 {
            return bad("level must be positive".into());
        }
        if weight == 0 || weight % 2 != 0 {
            return bad(format!("weight {weight} is not a positive even integer"));
        }
        if !is_odd_prime(p as u64) {
            return bad(format!("{p} is not an odd prime"));
        }
        if level % p as u64 == 0 {
            return bad(format!("p = {p} divides the level {level}; N must be prime to p"));
        }
        if rational_valuation(&ap, p).is_some_and(|v| v < 0) {
            return bad(format!("a_p = {ap} is not p-integral"));
        }
        // Weil: a_p^2 <= 4 p^(k-1)
        let bound = BigRational::from_integer(BigInt::from(4) * BigInt::from(p).pow(weight - 1));
        if &ap * &ap > bound {
            return bad(format!("|a_p| = {} exceeds the Weil bound 2*{p}^({}/2)", ap.abs(), weight - 1));
        }
        Ok(NewformRecord { label: label.to_string(), level, weight, p, ap })
    }

    /// a_p^2 - 4 p^(k-1)
    pub fn discriminant(&self) -> BigRational {
        &self.ap * &self.ap - BigRational::from_integer(BigInt::from(4) * BigInt::from(self.p).pow(self.weight - 1))
    }
}

/// A record that parsed but failed validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reject {
    pub line: usize,
    pub label: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ingested {
    pub records: Vec<NewformRecord>,
    pub rejects: Vec<Reject>,
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, names: &[&str], line: usize) -> Result<&'a Value, RefinedError> {
    names.iter().find_map(|n| obj.get(*n)).ok_or_else(|| RefinedError::Parse {
        line,
        field: names[0].into(),
        msg: "missing".into(),
    })
}

fn uint(v: &Value, name: &str, line: usize) -> Result<u64, RefinedError> {
    v.as_u64().ok_or_else(|| RefinedError::Parse { line, field: name.into(), msg: format!("expected a non-negative integer, got {v}") })
}

/// Line-delimited JSON records `{label, N, k, p, ap}`; `level`/`weight`/`a_p` are accepted as aliases.
/// Blank lines and lines starting with '#' are skipped.
pub fn ingest_newforms_str(text: &str) -> Result<Ingested, RefinedError> {
    let mut out = Ingested::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let v: Value = serde_json::from_str(raw).map_err(|e| RefinedError::Parse { line, field: String::new(), msg: e.to_string() })?;
        let obj = v.as_object().ok_or_else(|| RefinedError::Parse { line, field: String::new(), msg: "expected an object".into() })?;
        let label = match field(obj, &["label"], line)? {
            Value::String(s) => s.clone(),
            other => return Err(RefinedError::Parse { line, field: "label".into(), msg: format!("expected a string, got {other}") }),
        };
        let level = uint(field(obj, &["N", "level"], line)?, "N", line)?;
        let weight = uint(field(obj, &["k", "weight"], line)?, "k", line)?;
        let p = uint(field(obj, &["p"], line)?, "p", line)?;
        let ap = match field(obj, &["ap", "a_p"], line)? {
            Value::Number(n) if n.is_i64() => BigRational::from_integer(n.as_i64().unwrap().into()),
            Value::String(s) => parse_rational(s)
                .ok_or_else(|| RefinedError::Parse { line, field: "ap".into(), msg: format!("bad rational {s:?}") })?,
            other => return Err(RefinedError::Parse { line, field: "ap".into(), msg: format!("expected an integer or \"a/b\", got {other}") }),
        };
        let (Ok(weight), Ok(p)) = (u32::try_from(weight), u32::try_from(p)) else {
            out.rejects.push(Reject { line, label, reason: "k or p out of range".into() });
            continue;
        };
        match NewformRecord::new(&label, level, weight, p, ap) {
            Ok(r) => out.records.push(r),
            Err(e) => out.rejects.push(Reject { line, label, reason: e.to_string() }),
        }
    }
    Ok(out)
}

pub fn ingest_newforms(path: &Path) -> Result<Ingested, RefinedError> {
    let text = std::fs::read_to_string(path).map_err(|e| RefinedError::Io(format!("{}: {e}", path.display())))?;
    ingest_newforms_str(&text)
}

/// dim H^1_f, H^1_g, H^1_e of Q_p(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IwasawaRow {
    pub n: i64,
    pub h1f_dim: usize,
    pub h1g_dim: usize,
    pub h1e_dim: usize,
}

/// Table lookup for odd n; nothing is computed.
pub fn iwasawa_reference(n: i64) -> Result<IwasawaRow, RefinedError> {
    let (f, g, e) = match n {
        _ if n % 2 == 0 => return Err(RefinedError::OutOfTable(n)),
        1 => (0, 1, 0),
        _ if n > 1 => (1, 1, 1),
        _ => (0, 0, 0),
    };
    Ok(IwasawaRow { n, h1f_dim: f, h1g_dim: g, h1e_dim: e })
}
