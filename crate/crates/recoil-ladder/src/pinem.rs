//! Stimulated interaction with a strong classical field (PINEM), one- and
//! two-photon, with recoil.
//!
//! The undepleted classical field removes the `sqrt(n)` ladder factors, so
//! the sidebands evolve on a symmetric level range `m in [-M, M]` with a
//! uniform coupling `g = g_qu * A` and the same autonomized propagator as the
//! quantized case.

use crate::engines::ladder_generator;
use crate::error::{Error, Result};
use crate::expm::expm_structured;
use crate::ladder::LadderPhases;
use crate::math;
use crate::observables::ElectronSpectrum;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Boundary population accepted at the sideband cap.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Default peak prominence for revival detection (absolute in P0).
pub const DEFAULT_REVIVAL_PROMINENCE: f64 = 0.05;
/// Default coupling grid resolution for revival scans.
pub const DEFAULT_REVIVAL_GRID_STEP: f64 = 0.01;

/// Phase convention of a recoiled one-photon PINEM ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinemMatching {
    /// Photon momentum matched to the electron group velocity at the initial
    /// energy (`v_ph = v_gr`): symmetric phases `phi_m L = -pi m^2 / sigma`.
    VelocityMatched,
    /// First emission exactly matched: `phi_m L = -pi m (m+1) / sigma`
    /// (asymmetric between emission and absorption).
    EmissionMatched,
}

/// One stimulated-interaction scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PinemConfig {
    /// Classical coupling `g = g_qu * A`.
    pub coupling: f64,
    /// Phases over the symmetric range `[-M, M]`.
    pub phases: LadderPhases,
}

impl PinemConfig {
    pub fn new(coupling: f64, phases: LadderPhases) -> Result<Self> {
        if !(coupling >= 0.0) {
            return Err(Error::Domain {
                what: "classical coupling",
                value: coupling,
            });
        }
        if phases.m_max() != -phases.m_min() {
            return Err(Error::Config(
                "stimulated-interaction phases must span a symmetric level range".into(),
            ));
        }
        Ok(Self { coupling, phases })
    }
}

/// Default sideband cap `M = ceil(8 (sigma + g))`.
pub fn suggested_sideband_cap(sigma: f64, coupling: f64) -> u32 {
    math::ceil(8.0 * (sigma + coupling)) as u32
}

/// Tighter cap for scans: the walk light-cone plus the recoil boundary with a
/// safety margin; always validated against the boundary population afterward.
pub fn scan_sideband_cap(sigma: f64, coupling: f64) -> u32 {
    (math::ceil(sigma + 2.4 * coupling) as u32 + 24).max(8)
}

/// One-photon recoil phases over `[-m_cap, m_cap]`.
pub fn phases_reduced_one_photon(sigma: f64, matching: PinemMatching, m_cap: u32) -> LadderPhases {
    let m_cap = m_cap as i32;
    let phi = (-m_cap..=m_cap)
        .map(|m| {
            let m = m as f64;
            match matching {
                PinemMatching::VelocityMatched => -PI * m * m / sigma,
                PinemMatching::EmissionMatched => -PI * m * (m + 1.0) / sigma,
            }
        })
        .collect();
    LadderPhases::from_phases(-m_cap, m_cap, phi)
}

/// Two-photon recoil phases: emission pair matched (quadratic pair law on
/// even levels), every odd level at the uniform one-photon mismatch.
pub fn phases_reduced_two_photon(
    sigma: f64,
    one_photon_mismatch_phase: f64,
    m_cap: u32,
) -> LadderPhases {
    let m_cap = m_cap as i32;
    let phi = (-m_cap..=m_cap)
        .map(|m| {
            if m.rem_euclid(2) == 0 {
                let p = (m / 2) as f64;
                -PI * p * (p + 1.0) / sigma
            } else {
                one_photon_mismatch_phase
            }
        })
        .collect();
    LadderPhases::from_phases(-m_cap, m_cap, phi)
}

/// Sideband spectrum after the stimulated interaction. Both ends of the
/// ladder are truncation boundaries; either overflowing fails the run.
pub fn pinem_evolve(config: &PinemConfig) -> Result<ElectronSpectrum> {
    let phases = &config.phases;
    let n = phases.len();
    let couplings = vec![config.coupling; n - 1];
    let gen = ladder_generator(phases.phi_slice(), &couplings);
    let u = expm_structured(&gen, 1.0)?;
    let m = (-phases.m_min()) as usize; // index of the zero-loss level
    let probabilities: Vec<f64> = (0..n).map(|j| u.entry(j, m).norm_sqr()).collect();
    let cap = phases.m_max() as u32;
    for &edge in &[probabilities[0], probabilities[n - 1]] {
        if edge > BOUNDARY_TOL {
            return Err(Error::TruncationOverflow {
                boundary_population: edge,
                n_max: cap,
            });
        }
    }
    let levels = (0..n)
        .map(|j| (phases.m_min() + j as i32, probabilities[j]))
        .collect();
    Ok(ElectronSpectrum::from_levels(levels, 0.0))
}

/// Two-photon stimulated spectrum; requires a nonzero odd-level mismatch
/// (the one-photon channel must be off-resonant for the reduction to hold).
pub fn two_photon_pinem_evolve(config: &PinemConfig) -> Result<ElectronSpectrum> {
    if config.phases.phi_l(-1) == config.phases.phi_l(-2) {
        return Err(Error::ZeroMismatch);
    }
    pinem_evolve(config)
}

/// Zero-loss population over a coupling grid for one-photon recoiled PINEM,
/// growing the sideband cap until the boundary stays clean.
pub fn p0_trace(sigma: f64, matching: PinemMatching, couplings: &[f64]) -> Result<Vec<f64>> {
    couplings
        .iter()
        .map(|&g| {
            let mut cap = scan_sideband_cap(sigma, g);
            loop {
                let phases = phases_reduced_one_photon(sigma, matching, cap);
                match pinem_evolve(&PinemConfig::new(g, phases)?) {
                    Ok(spec) => return Ok(spec.probability(0)),
                    Err(Error::TruncationOverflow { .. }) => {
                        cap *= 2;
                        if cap > 1 << 14 {
                            return Err(Error::TruncationNotConverged { n_max_cap: cap });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect()
}

/// Local maxima of `P0(g)` with at least the requested topographic
/// prominence, in increasing `g`. The grid must be uniform.
pub fn detect_revivals(coupling_grid: &[f64], p0: &[f64], prominence: f64) -> Vec<f64> {
    assert_eq!(coupling_grid.len(), p0.len());
    let n = p0.len();
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(p0[i] > p0[i - 1] && p0[i] >= p0[i + 1]) {
            continue;
        }
        // prominence: drop to the highest of the two valley floors that
        // separate this peak from the nearest higher ground
        let mut left_min = p0[i];
        let mut j = i;
        while j > 0 && p0[j - 1] <= p0[i] {
            j -= 1;
            left_min = left_min.min(p0[j]);
        }
        let mut right_min = p0[i];
        let mut j = i;
        while j + 1 < n && p0[j + 1] <= p0[i] {
            j += 1;
            right_min = right_min.min(p0[j]);
        }
        if p0[i] - left_min.max(right_min) >= prominence {
            out.push(coupling_grid[i]);
        }
    }
    out
}

/// Empirical position of the first zero-level revival, `0.84 sigma + 1.66`.
pub fn first_revival_estimate(sigma: f64) -> f64 {
    0.84 * sigma + 1.66
}

/// Empirical position of the second zero-level revival, `3.28 sigma + 1.95`.
pub fn second_revival_estimate(sigma: f64) -> f64 {
    3.28 * sigma + 1.95
}
