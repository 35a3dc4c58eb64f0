//! Two-flavor neutrino oscillation observables in a Schwarzschild background.
//!
//! The crate computes Leggett-Garg `K3` correlators and the l1-norm of flavor
//! coherence for neutrinos propagating radially outward from or inward toward
//! a spherically symmetric gravitational source, in the weak-field regime.
//! Flat spacetime is the `GM = 0` limit of the same code path, so flat/curved
//! comparisons isolate the gravitational correction as the only difference.
//!
//! Layout:
//! - [`units`]: phase conversion between (eV², km, TeV) inputs and radians.
//! - [`geometry`]: metric potential, proper distance (exact and weak-field),
//!   detector-radius inversion, gravitational energy shift.
//! - [`oscillation`]: mixing, gravitationally corrected phases, the 2x2
//!   flavor evolution matrix, transition probabilities.
//! - [`lgi`]: the three Leggett-Garg correlators and `K3`, both from closed
//!   forms and from an independent anticommutator oracle.
//! - [`coherence`]: l1-norm coherence from the density matrix and from the
//!   probability shortcut.
//! - [`sweep`]: flat-vs-curved parameter sweeps emitted as CSV/JSON tables.

pub mod coherence;
pub mod geometry;
pub mod lgi;
pub mod oscillation;
pub mod sweep;
pub mod units;

use thiserror::Error;

/// Errors for scenario validation and geometric domain violations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy must be positive, got {0} TeV")]
    NonPositiveEnergy(f64),

    #[error("length must be nonnegative, got {0} km")]
    NegativeLength(f64),

    #[error("gravitational mass parameter GM must be nonnegative, got {0} km")]
    NegativeGravitationalMass(f64),

    #[error("radius {r} km lies at or inside the horizon 2GM = {horizon} km")]
    HorizonViolation { r: f64, horizon: f64 },

    #[error("radii must satisfy r_a <= r_b, got r_a = {r_a} km, r_b = {r_b} km")]
    RadiusOrdering { r_a: f64, r_b: f64 },

    #[error(
        "inward baseline exceeds source radius (L_p = {baseline} km, r_source = {r_source} km)"
    )]
    InwardBaselineTooLong { baseline: f64, r_source: f64 },

    #[error("mixing angle must lie in [0, pi/2], got {0}")]
    ThetaOutOfRange(f64),

    #[error("radius inversion failed: {0}")]
    InversionFailure(String),

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
