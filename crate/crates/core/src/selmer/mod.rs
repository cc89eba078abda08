//! Selmer modules of chain maps between complexes of free modules over Z or Q[x],
//! and their behavior under specialization at primes.

mod complex;
mod instance;
mod ring;
mod snf;

use num_bigint::BigInt;
use thiserror::Error;

pub use complex::{
    cohomology, form1_check, selmer_data, selmer_kernel, semicontinuity_experiment, specialize, CohomologySummary,
    Form1Report, FreeComplex, SelmerData, SelmerInstance, SemicontinuityReport, SemicontinuityRow, SmithPredictor,
    Specialization,
};
pub use instance::{diagonal_instance, instance_to_toml, parse_instance, random_instance, two_torsion_instance, AnyInstance};
pub use ring::{parse_poly, Euclidean, Field, Fp, NumberFieldElt, Pid, QPoly, RingKind};
pub use snf::{field_rank, smith, Matrix, Smith};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelmerError {
    #[error("cannot parse instance: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d{} composed with d{0} is not zero", .0 + 1)]
    NotAComplex(usize),
    #[error("chain map does not commute with d{0}")]
    NotAChainMap(usize),
    #[error("{0} is not a supported prime")]
    NotPrime(String),
    #[error("cohomology degree {0} is outside 0..3")]
    Degree(usize),
    #[error("internal: {0}")]
    Internal(String),
}

/// Rational primes below `bound`.
pub fn primes_below(bound: u64) -> Vec<BigInt> {
    (2..bound).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)).map(BigInt::from).collect()
}

#[cfg(test)]
mod tests;
