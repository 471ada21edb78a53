//! Spin-selective recombination kinetics of radical pairs.
//!
//! Three reaction models are provided for a radical pair with singlet
//! recombination rate `k_S`:
//!
//! * the quantum-measurement model, under which surviving pairs are
//!   continuously projected toward the triplet and the S-T coherence decays
//!   at the full rate `k_S`;
//! * its trace-renormalized nonlinear form, which evolves the normalized
//!   state of the unrecombined pairs;
//! * the conventional Haberkorn model, which damps the coherence at `k_S / 2`.
//!
//! States live either in the radical-pair basis `{S, T}`, where they lose
//! trace as pairs recombine, or in the expanded basis `{P, S, T}` with an
//! explicit product level. The [`analytic`] module holds closed-form
//! solutions and the weight bookkeeping of the unreacted, triplet-projected
//! and recombined fractions; [`integrate`] propagates any model numerically.

// NaN must fail the range checks, hence the negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod densmat;
pub mod error;
pub mod integrate;
pub mod models;
pub mod spinsys;
pub mod verify;

pub use analytic::{DecompositionWeights, KominisSplit};
pub use densmat::ComplexMatrix;
pub use error::{Error, Result};
pub use integrate::{IntegratorConfig, Record, Trajectory};
pub use models::{Generator, ModelKind, RateParams};
pub use num_complex::Complex64;
pub use spinsys::{DensityMatrix, InitialState, Observables, Projectors, SpinBasis};
pub use verify::{Check, VerifyReport};
