//! One-dimensional phase-space quantum simulation toolkit.
//!
//! The crate computes discrete Wigner-type quasi-probability maps of
//! sampled wavefunctions, applies filtering, detection, and free-space
//! propagation operators on both the wavefunction path and the
//! phase-space path, and packages canned slit-bench experiments
//! (double slit, which-path detector, delayed choice) with their
//! summary metrics.
//!
//! Start with [`grid::make_grid`] to fix the lattice, build states from
//! [`states`], transform with [`wigner::wigner_from_position`], and
//! compose experiments from [`filters`], [`optics`], and [`scenarios`].

pub mod error;
pub mod filters;
pub mod grid;
pub mod optics;
pub mod scenarios;
pub mod states;
pub mod validation;
pub mod wigner;

mod fft;

pub use error::{Error, Result};
pub use grid::{make_grid, Constants, MomentumGrid, MomentumKind, SpatialGrid};
pub use states::{MomentumWavefunction, PositionWavefunction, SlitParams, WaveRole};
pub use wigner::{CrossWignerMap, WignerMap};
