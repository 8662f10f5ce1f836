//! Spectral split-operator simulation of a transversal Stern–Gerlach
//! interferometer.
//!
//! The crate propagates a two-component (spin-1/2) wave function through the
//! magnetic field of a current-sheet aperture, using a fourth-order
//! gradient-corrected operator splitting with FFT-based kinetic steps.  It
//! also provides the classical-trajectory calibration loop that fixes the
//! field scale and aperture half-gap for a requested beam separation, and a
//! harness for the 1D and 3D numerical experiments.
//!
//! Internally all quantities are expressed in Hartree atomic units; the
//! [`units`] module holds the conversion factors used at the configuration
//! boundary.

pub mod bessel;
pub mod calibration;
pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod observables;
pub mod phys;
pub mod propagator;
pub mod quadrature;
pub mod reduce;
pub mod rootfind;
pub mod spinor;
pub mod units;

pub use calibration::{Calibration, Calibrator};
pub use error::{Result, SgiError};
pub use grid::Grid;
pub use observables::ObservableRecord;
pub use phys::PhysParams;
pub use propagator::{evolve, EvolveOptions};
pub use spinor::SpinorField;
