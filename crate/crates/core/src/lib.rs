//! Paraxial Laguerre-Gaussian wave packets of a massive vortex particle and
//! their phase-space (Wigner) representations.
//!
//! Natural units are used throughout (ħ = c = 1). Lengths are measured in
//! units of the Compton wavelength 1/m and momenta in units of m whenever the
//! mass is set to 1, which is what [`PacketSpec::paraxial`] does.
//!
//! The crate is organised bottom-up:
//!
//! * [`kinematics`] packet parameters, phase-space points, longitudinal boosts
//! * [`specfun`] associated Laguerre polynomials and Gaussian quadrature rules
//! * [`wavepacket`] momentum- and position-space amplitudes
//! * [`wigner`] closed-form paraxial Wigner functions and their marginals
//! * [`spinors`] Dirac bispinors and their pairing across momentum offsets
//! * [`oracle`] brute-force quadrature of the defining Wigner integrals
//! * [`observables`] beam moments, including the ⟨ρ⟩⟨p⊥⟩ product
//! * [`io`], [`config`], [`verify`] grid export, run configuration and the
//!   verification suites driven by the command-line tool

pub mod config;
pub mod error;
pub mod io;
pub mod kinematics;
pub mod observables;
pub mod oracle;
pub mod specfun;
pub mod spinors;
pub mod verify;
pub mod wavepacket;
pub mod wigner;

pub use error::{Error, Result};
pub use kinematics::{Boost, PacketSpec, PhasePoint, Vec3};
pub use wigner::{Exponent, WignerForm};

/// Version string written into export metadata and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
