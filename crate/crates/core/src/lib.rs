//! Frustrated total internal reflection (FTIR) between two prisms, solved
//! from Maxwell boundary matching.
//!
//! The crate covers the whole chain from a physical [`Scenario`] to the
//! observables of a double-prism tunneling experiment:
//!
//! * [`scattering`]: exact prism/gap/prism reflection and transmission, plus
//!   the wide-gap attenuation laws.
//! * [`delay`]: transmission/reflection phases, the phase-time and
//!   Goos-Hänchen parts of the group delay, Hartman sweeps.
//! * [`energy`]: in-gap field, time-averaged stored energy and dwell time.
//! * [`wavesynth`]: frequency-domain pulse and beam synthesis, peak delay,
//!   shape preservation, front causality, beam centroid shift.
//!
//! Everything is SI internally. Evaluations over frequency grids, gap sweeps
//! and angular spectra run through [`parallel::Execution`], which uses rayon
//! when the `parallel` feature is enabled and falls back to a plain loop
//! otherwise.

pub mod delay;
pub mod energy;
mod error;
pub mod numerics;
pub mod parallel;
pub mod scattering;
pub mod scenario;
pub mod sweep;
pub mod wavesynth;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use parallel::Execution;
pub use scenario::{
    critical_angle, pulse_spatial_extent, vacuum_wavelength, wavevectors, BeamSpec, Channel,
    LightSpeed, Polarization, PulseShape, PulseSpec, Scenario, Wavevectors,
};
pub use sweep::SweepTable;
