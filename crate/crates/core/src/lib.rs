//! Entanglement measures for small bipartite mixed states.
//!
//! The crate computes closed-form measures (entropy of entanglement,
//! two-qubit concurrence and entanglement of formation, the cost and
//! distillation rates of two-component Bell mixtures), runs a variational
//! search over pure-state decompositions for states without a closed form,
//! and certifies whether the trace-out channel of a subspace is
//! entanglement breaking — the condition under which the formation measure
//! is additive and therefore equals the asymptotic cost.
//!
//! Modules:
//! - [`qmat`]: dense complex matrices, tensor operations, Hermitian Jacobi
//!   eigensolver, PSD square root.
//! - [`states`]: Bell states and mixtures, reference subspace bases, seeded
//!   random states, JSON (de)serialization.
//! - [`measures`]: entropies, concurrence, closed-form formation/cost/
//!   distillation values, constant-entanglement subspace check, strong
//!   subadditivity probe.
//! - [`channels`]: trace-out channels of subspaces, Choi matrices, PPT
//!   tests, the qutrit MUB 2-design, entanglement-breaking certificates.
//! - [`ef`]: variational upper bounds on the entanglement of formation and
//!   finite tensor-power additivity gaps.
//! - [`cli`]: the machine-readable command layer behind the `entcost`
//!   binary.

pub mod channels;
pub mod cli;
pub mod ef;
pub mod error;
pub mod measures;
pub mod qmat;
pub mod states;

mod rng;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use qmat::{CMat, DimSplit, EigH, Subsystem};
