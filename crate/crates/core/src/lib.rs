//! Tools for completely positive maps on finite-dimensional Hilbert spaces.
//!
//! The crate centers on channels in Kraus form `X -> sum_i A_i X A_i*` and
//! the structure theory that unital, trace-preserving examples admit:
//!
//! - [`channel`]: channels, Choi matrices, superoperator matrices over
//!   declared operator bases, and conversions between the three.
//! - [`mat`]: the dense complex-matrix substrate (projections, spectral
//!   helpers, orthonormalization, seeded randomness) shared by everything
//!   else.
//! - [`fixedpoint`]: fixed-point spaces, commutants, algebra closures, and
//!   the power limit `X -> lim Phi^n(X)` for monotone starting points.
//! - [`structure`]: invariant-versus-reducing subspace verdicts, minimal
//!   reducing decompositions, and anchor projections whose orbits split a
//!   channel into cyclic summands.
//! - [`qubit`]: the classification of unital qubit channels by their
//!   fixed-point algebra.
//! - [`wavelet`]: filter banks, their unitarity on the circle, and the
//!   compression channels they induce on polynomial coefficient spaces.
//! - [`presets`]: named example channels used across tests and the CLI.
//! - [`jsonio`]: the JSON encodings accepted and emitted by the CLI.
//!
//! Numerical comparisons everywhere go through [`Tolerance`], and
//! computations that detect contradictory floating-point evidence return
//! [`Error`] variants instead of guessing.

pub mod channel;
pub mod error;
pub mod fixedpoint;
pub mod jsonio;
pub mod mat;
pub mod presets;
pub mod qubit;
pub mod structure;
pub mod wavelet;

pub use channel::{
    choi_to_kraus, superoperator_to_channel, to_superoperator, BasisKind, Channel, ChannelFlags,
    ChoiMatrix, OperatorBasis, RandomKind, Superoperator,
};
pub use error::{Error, Result};
pub use mat::{C64, CMatrix, CVector, Projection, Tolerance};
