//! Exact quantum dynamics of a free electron coupled to one or two quantized
//! cavity modes, with electron recoil.
//!
//! The electron-photon system lives on a ladder of joint levels: level `m`
//! pairs the electron energy `E_0 + m * E_ph` with the photon occupation
//! `n0 - m`. Recoil enters through per-transition momentum mismatches; their
//! cumulative phases autonomize the coefficient equations so the evolution
//! over the interaction length reduces to one matrix exponential of a
//! tridiagonal anti-Hermitian generator ([`engines::evolve_exact`]). An
//! adaptive integrator of the non-autonomous system and a first-order Magnus
//! (sinc) model provide independent routes to the same states.
//!
//! On top of the engines sit photon statistics (`g2`, mean, cut-off
//! detection), electron spectra, fidelities against Bell/NOON/GHZ/squeezed
//! vacuum/twin-beam references, stimulated (classical-field) spectra with
//! revival detection, and two-mode lattice dynamics for twin-beam and GHZ
//! generation.
//!
//! The crate is `no_std`-compatible (`default-features = false`; requires
//! `alloc`).

#![cfg_attr(not(feature = "std"), no_std)]
// negated comparisons are deliberate: they route NaN inputs onto the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod math;

pub mod engines;
pub mod error;
pub mod expm;
pub mod ladder;
mod linalg;
pub mod multimode;
pub mod observables;
pub mod ode;
pub mod pinem;

pub use engines::{
    adaptive_truncation, evolve, evolve_exact, evolve_numeric, evolve_sinc, simulate, Engine,
    SimScenario, WaveFunction,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use ladder::{
    electron_wavenumber, energy_from_wavenumber, mismatch_phases_physical,
    mismatch_phases_reduced, n_eff, sigma_full, sigma_simple, solve_photon_momentum,
    LadderPhases, PhaseMatching, PhysicalConfig, ReducedConfig, SigmaSimple,
};
pub use observables::{
    cutoff_position, electron_spectrum, fidelity, photon_statistics,
    squeezed_vacuum_g2_reference, sv_reference_from_mean, two_photon_g_eff, ElectronSpectrum,
    PhotonStatistics, ReferenceKind, ReferenceState,
};
