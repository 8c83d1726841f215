//! Capacity bounds for erasure-Pauli channels and their application to
//! polarization-qubit transmission through optical fiber.
//!
//! The toolkit models a flagged mixture of photon loss and Pauli polarization
//! noise: with probability `1 - eta` the receiver sees an orthogonal vacuum
//! flag, otherwise the surviving qubit is hit by a Pauli channel. On top of
//! that core model it provides
//!
//! * two-way assisted capacity bounds (hashing lower bound, piecewise upper
//!   bound) and the exact erasure-dephasing capacity ([`channel`]),
//! * the zero-capacity predicate and its partial-transpose witness ([`pauli`]),
//! * a fiber model mapping loss and polarization mode dispersion to channel
//!   parameters versus distance ([`fiber`]),
//! * the dark-count extension and its exact reparametrization as another
//!   erasure-Pauli channel ([`dark`]),
//! * a seedable Monte-Carlo engine that re-derives Choi states, click
//!   statistics and distillability thresholds from sampled trials ([`mc`]),
//! * rate-versus-distance sweeps and threshold solving ([`sweep`]).
//!
//! All state-level arithmetic is done on small dense complex matrices with an
//! in-repo Hermitian eigensolver ([`linalg`]); no external linear algebra is
//! pulled in. Everything is a pure function of immutable inputs. The
//! Monte-Carlo batches run on rayon when the `parallel` feature (default) is
//! enabled and fall back to plain iterators otherwise; results are
//! bit-identical either way.

// Validation sites use `!(x > 0.0)` so that NaN is rejected along with the
// out-of-range values; the un-negated forms would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dark;
pub mod density;
pub mod fiber;
pub mod linalg;
pub mod mc;
mod par;
pub mod pauli;
pub mod solve;
pub mod sweep;

pub use channel::{
    capacity_edh, capacity_edp_upper, CapacityBounds, EnsembleArm, ErasurePauliChannel,
};
pub use dark::DarkCountParams;
pub use density::DensityMatrix;
pub use fiber::{FiberParams, PmdRegime};
pub use pauli::{binary_entropy, NptWitness, PauliDistribution};

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}x{expected}, got {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("insufficient samples: need at least {min}, got {got}")]
    InsufficientSamples { min: u64, got: u64 },
    #[error("click probability is zero; the conditioned channel is undefined")]
    UndefinedConditioning,
    #[error("scan range does not bracket a threshold: {0}")]
    NonBracketing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
