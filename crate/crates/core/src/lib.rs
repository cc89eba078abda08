//! p-adic algebra toolkit: capped-precision Q_p arithmetic, a windowed model of
//! the Robba ring, rank-one (phi, Gamma)-module cohomology, Selmer
//! specialization over principal ideal domains, refinement data of newforms.

pub mod characters;
pub mod cohomology;
pub mod linalg;
pub mod padic;
pub mod par;
pub mod refined;
pub mod robba;
pub mod selmer;
