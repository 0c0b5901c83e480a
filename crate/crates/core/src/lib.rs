//! Stationary continuous-variable entanglement between two mirror oscillation modes coupled
//! through the radiation pressure of a driven cavity mode.
//!
//! The crate evaluates the closed-form frequency-domain solution of the linearized quantum
//! Langevin equations ([`response`], [`spectra`]), cross-checks it against a direct
//! matrix inversion ([`oracle`], [`verify`]) and scans it over frequency/temperature grids
//! ([`sweep`]).
//!
//! All frequencies, rates and detunings are angular (rad/s).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
mod linalg;
pub mod oracle;
pub mod params;
pub mod response;
pub mod spectra;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use params::{
    derive_coupling, input_amplitude, self_consistent_detuning, steady_state, CavityParams,
    MechanicalMode, PhysicalConstants, SteadyState, SystemConfig,
};
pub use response::{assemble_transfer, TransferSet};
pub use spectra::{entanglement_degree, CriterionFlags, SpectralPoint};
pub use sweep::{GridSpec, SweepResult};
