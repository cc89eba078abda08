//! Trianguline parameters and dimension counts along the filtration.

use serde::Serialize;

use super::{h1_rank_one, CohomologyError, Dim, Truncation};
use crate::characters::{CharacterError, PadicCharacter, WeightReport};
use crate::padic::PrecisionPolicy;
use crate::par::Execution;

#[derive(Clone, Debug)]
pub struct TriangulineParameter {
    characters: Vec<PadicCharacter>,
}

impl TriangulineParameter {
    pub fn new(characters: Vec<PadicCharacter>) -> Result<Self, CohomologyError> {
        let Some(first) = characters.first() else {
            return Err(CohomologyError::Invalid("a parameter needs at least one character".into()));
        };
        let p = first.prime();
        if let Some(c) = characters.iter().find(|c| c.prime() != p) {
            return Err(CharacterError::PrimeMismatch(p, c.prime()).into());
        }
        Ok(TriangulineParameter { characters })
    }

    pub fn characters(&self) -> &[PadicCharacter] {
        &self.characters
    }

    pub fn dim(&self) -> usize {
        self.characters.len()
    }

    /// Recomputed on every call.
    pub fn weights(&self, policy: &PrecisionPolicy) -> Result<Vec<WeightReport>, CohomologyError> {
        self.characters.iter().map(|c| Ok(c.weight(policy)?)).collect()
    }

    pub fn exceptional_flags(&self, policy: &PrecisionPolicy) -> Result<Vec<bool>, CohomologyError> {
        self.characters.iter().map(|c| Ok(c.is_exceptional(policy)?)).collect()
    }
}

/// All weights detected integers, strictly increasing.
pub fn is_noncritical(param: &TriangulineParameter, policy: &PrecisionPolicy) -> Result<bool, CohomologyError> {
    let mut ints = Vec::new();
    for w in param.weights(policy)? {
        if w.ambiguous {
            return Err(CharacterError::AmbiguousAtPrecision(format!("weight {} is nearly an integer", w.weight)).into());
        }
        match w.integer {
            Some(n) => ints.push(n),
            None => return Ok(false),
        }
    }
    Ok(ints.windows(2).all(|w| w[0] < w[1]))
}

pub fn is_nonexceptional(param: &TriangulineParameter, policy: &PrecisionPolicy) -> Result<bool, CohomologyError> {
    Ok(param.exceptional_flags(policy)?.iter().all(|e| !e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DevissageDims {
    pub d: usize,
    pub a: usize,
    pub h1_fil_a: usize,
    pub h1_quotient: usize,
    pub h1_total: usize,
    pub pot_dim: usize,
    /// h1 of each graded piece, in filtration order
    pub contributions: Vec<usize>,
    pub cross_checked: bool,
}

/// Sums graded H^1 contributions: pieces 1..=a make up Fil^a, the rest the quotient.
/// With `cross_check`, each contribution is a computed rank-one report instead of 1.
pub fn devissage_dims(
    param: &TriangulineParameter,
    a: usize,
    policy: &PrecisionPolicy,
    cross_check: Option<(Truncation, Execution)>,
) -> Result<DevissageDims, CohomologyError> {
    let d = param.dim();
    if a > d {
        return Err(CohomologyError::Invalid(format!("a = {a} exceeds d = {d}")));
    }
    for (i, c) in param.characters().iter().enumerate() {
        if c.is_exceptional(policy)? {
            return Err(CohomologyError::ExceptionalParameter(format!("delta_{} = {c}", i + 1)));
        }
    }
    let contributions = match cross_check {
        None => vec![1; d],
        Some((t, exec)) => exec
            .map(param.characters(), |c| -> Result<usize, CohomologyError> {
                let r = h1_rank_one(c, t, policy, Execution::Sequential)?;
                match r.h1_dim {
                    Some(Dim::Value(v)) => Ok(v),
                    _ => Err(CohomologyError::Invalid(format!("h1 of {c} did not stabilize"))),
                }
            })
            .into_iter()
            .collect::<Result<_, _>>()?,
    };
    let h1_fil_a: usize = contributions[..a].iter().sum();
    let h1_quotient: usize = contributions[a..].iter().sum();
    Ok(DevissageDims {
        d,
        a,
        h1_fil_a,
        h1_quotient,
        h1_total: h1_fil_a + h1_quotient,
        pot_dim: h1_fil_a,
        contributions,
        cross_checked: cross_check.is_some(),
    })
}
