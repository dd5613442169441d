//! Two-mode quantized dynamics on the photon-occupation lattice, for twin-beam
//! and GHZ generation.
//!
//! Each lattice node `(n1, n2)` pairs the occupations with the electron level
//! `m = n0_1 + n0_2 - (n1 + n2)`. Autonomization assigns every node the
//! cumulative phase of any emission path from the origin; single-valued
//! dispersion makes that path-independent, which the constructor checks.

use crate::error::{Error, Result};
use crate::expm;
use crate::ladder::{electron_wavenumber, solve_photon_momentum, PhysicalConfig};
use crate::math;
use crate::observables::{PhotonStatistics, ReferenceState};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;

/// Population allowed on the outer lattice shell.
pub const SHELL_TOL: f64 = 1e-8;

/// Reduced parametrization of the joint two-photon (one photon per mode)
/// matched scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeReducedConfig {
    /// Recoil parameter of the pair ladder.
    pub sigma: f64,
    /// Per-mode one-photon couplings.
    pub coupling_g_qu: [f64; 2],
    /// Uniform odd-level (single-photon) mismatch phase.
    pub one_photon_mismatch_phase: f64,
    /// Per-mode occupation cut (square lattice).
    pub truncation_n_max: u32,
}

impl TwoModeReducedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::Config(alloc::format!(
                "sigma = {} must be positive",
                self.sigma
            )));
        }
        if self.coupling_g_qu.iter().any(|&g| !(g >= 0.0)) {
            return Err(Error::Config("couplings must be non-negative".into()));
        }
        if self.truncation_n_max == 0 {
            return Err(Error::Config("truncation_n_max must be positive".into()));
        }
        Ok(())
    }
}

/// Cumulative autonomization phases over the square occupation lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModePhases {
    n_max: u32,
    /// Row-major over `(n1, n2)`, `n2` fastest.
    phi_l: Vec<f64>,
}

impl TwoModePhases {
    /// Per-mode occupation cut.
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn side(&self) -> usize {
        self.n_max as usize + 1
    }

    pub fn phi_l(&self, n1: u32, n2: u32) -> f64 {
        self.phi_l[self.index(n1, n2)]
    }

    pub(crate) fn index(&self, n1: u32, n2: u32) -> usize {
        n1 as usize * self.side() + n2 as usize
    }

    /// Build from per-edge mismatches. `edge(mode, n1, n2)` is the mismatch
    /// phase `Delta k L` of emitting one photon of `mode` from node
    /// `(n1, n2)`. Loops around every plaquette must close; a residue above
    /// 1e-12 is a construction error.
    pub fn from_edge_mismatches<F>(n_max: u32, edge: F) -> Result<Self>
    where
        F: Fn(usize, u32, u32) -> f64,
    {
        let side = n_max as usize + 1;
        let mut phi_l = vec![0.0; side * side];
        // integrate along mode-1 first, then mode-2 (phi relative to origin,
        // emission steps subtract the mismatch)
        for n1 in 0..=n_max {
            let base = if n1 == 0 {
                0.0
            } else {
                phi_l[(n1 as usize - 1) * side] - edge(0, n1 - 1, 0)
            };
            phi_l[n1 as usize * side] = base;
            for n2 in 1..=n_max {
                phi_l[n1 as usize * side + n2 as usize] =
                    phi_l[n1 as usize * side + n2 as usize - 1] - edge(1, n1, n2 - 1);
            }
        }
        // closure: the alternative path over each plaquette must agree
        let mut worst = 0.0_f64;
        for n1 in 0..n_max {
            for n2 in 0..n_max {
                let a = phi_l[(n1 as usize + 1) * side + n2 as usize] - edge(1, n1 + 1, n2);
                let b = phi_l[n1 as usize * side + n2 as usize + 1] - edge(0, n1, n2 + 1);
                worst = worst.max(math::abs(
                    a - phi_l[(n1 as usize + 1) * side + n2 as usize + 1],
                ));
                worst = worst.max(math::abs(
                    b - phi_l[(n1 as usize + 1) * side + n2 as usize + 1],
                ));
            }
        }
        let scale = phi_l.iter().fold(1.0_f64, |m, x| m.max(math::abs(*x)));
        if worst > 1e-12 * scale {
            return Err(Error::Config(alloc::format!(
                "two-mode phase construction does not close: residue {worst:.3e}"
            )));
        }
        Ok(Self { n_max, phi_l })
    }

    /// Reduced lattice phases for the joint-pair-matched non-degenerate
    /// scenario: the balanced diagonal follows the matched pair law in the
    /// total occupation, and every imbalanced node is detuned by the
    /// one-photon mismatch times the squared occupation imbalance. Single
    /// photons (imbalance 1) then sit at the mismatch itself and same-mode
    /// pairs (imbalance 2) are four times further detuned, so only the joint
    /// transition stays phase-matched.
    pub fn reduced(config: &TwoModeReducedConfig) -> Result<Self> {
        config.validate()?;
        let n_max = config.truncation_n_max;
        let side = n_max as usize + 1;
        let mut phi_l = vec![0.0; side * side];
        for n1 in 0..=n_max {
            for n2 in 0..=n_max {
                let q = (n1 + n2) as i32;
                // emission pair index is negative: p = -q/2 on even totals
                let pair = if q.rem_euclid(2) == 0 {
                    let p = -(q / 2) as f64;
                    -PI * p * (p + 1.0) / config.sigma
                } else {
                    let p = -((q - 1) / 2) as f64;
                    -PI * p * (p + 1.0) / config.sigma
                };
                let imbalance = n1 as f64 - n2 as f64;
                phi_l[n1 as usize * side + n2 as usize] =
                    pair + config.one_photon_mismatch_phase * imbalance * imbalance;
            }
        }
        Ok(Self { n_max, phi_l })
    }

    /// Physical lattice phases from the exact dispersion, with one photon
    /// momentum per mode (independent QPM offsets are folded into the
    /// configuration's grating wavenumber).
    pub fn physical(config: &PhysicalConfig) -> Result<Self> {
        config.validate()?;
        if config.mode_count() != 2 {
            return Err(Error::Config(
                "two-mode phases need a two-mode configuration".into(),
            ));
        }
        let kappa = solve_photon_momentum(config)?;
        let e0 = config.total_energy_kev();
        let eph: Vec<f64> = config.photon_energy_ev.iter().map(|e| e * 1e-3).collect();
        let length = config.interaction_length_um;
        let grating = config.grating_wavenumber_rad_per_um;
        let n_max = config.truncation_n_max;
        // energy after emitting (n1, n2) photons must stay above rest energy
        let lowest = e0 - (n_max as f64) * (eph[0] + eph[1]);
        if lowest < crate::ladder::ELECTRON_REST_ENERGY_KEV {
            return Err(Error::Config(
                "two-mode truncation drives the electron below its rest energy; reduce truncation_n_max".into(),
            ));
        }
        let k_at = |n1: u32, n2: u32| -> Result<f64> {
            electron_wavenumber(e0 - n1 as f64 * eph[0] - n2 as f64 * eph[1])
        };
        // precompute; propagate the first error if any
        let side = n_max as usize + 1;
        let mut k_grid = vec![0.0; side * side];
        for n1 in 0..=n_max {
            for n2 in 0..=n_max {
                k_grid[n1 as usize * side + n2 as usize] = k_at(n1, n2)?;
            }
        }
        Self::from_edge_mismatches(n_max, move |mode, n1, n2| {
            let here = k_grid[n1 as usize * side + n2 as usize];
            let there = if mode == 0 {
                k_grid[(n1 as usize + 1) * side + n2 as usize]
            } else {
                k_grid[n1 as usize * side + n2 as usize + 1]
            };
            (here - there - kappa[mode] - grating) * length
        })
    }
}

/// Complex amplitudes over the two-mode occupation lattice; the electron
/// level is `m = -(n1 + n2)` for a vacuum initial cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeWaveFunction {
    n_max: u32,
    amps: Vec<C64>,
    norm_drift: f64,
}

impl TwoModeWaveFunction {
    /// Vacuum cavity, electron on the zero-loss level.
    pub fn vacuum(n_max: u32) -> Self {
        let side = n_max as usize + 1;
        let mut amps = vec![C64::new(0.0, 0.0); side * side];
        amps[0] = C64::new(1.0, 0.0);
        Self {
            n_max,
            amps,
            norm_drift: 0.0,
        }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    fn side(&self) -> usize {
        self.n_max as usize + 1
    }

    pub fn amplitude(&self, n1: u32, n2: u32) -> C64 {
        self.amps[n1 as usize * self.side() + n2 as usize]
    }

    pub fn probability(&self, n1: u32, n2: u32) -> f64 {
        self.amplitude(n1, n2).norm_sqr()
    }

    pub fn norm_drift(&self) -> f64 {
        self.norm_drift
    }

    /// Iterate `(n1, n2, amplitude)`.
    pub fn nodes(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        let side = self.side();
        self.amps.iter().enumerate().map(move |(i, &a)| {
            ((i / side) as u32, (i % side) as u32, a)
        })
    }

    /// Largest probability on the outer shell (`n1 = n_max` or `n2 = n_max`).
    pub fn shell_population(&self) -> f64 {
        let side = self.side();
        let mut worst = 0.0_f64;
        for i in 0..side {
            worst = worst.max(self.amps[(side - 1) * side + i].norm_sqr());
            worst = worst.max(self.amps[i * side + side - 1].norm_sqr());
        }
        worst
    }
}

/// Evolve on the two-mode lattice with the autonomized exact propagator.
///
/// The generator carries `i phi(n1, n2) L` on the diagonal and per-mode
/// couplings `g_j sqrt(n_j + 1)` on the lattice edges; a parity gauge turns
/// `-i S L` real symmetric for the dense eigensolver.
pub fn evolve_two_mode(
    phases: &TwoModePhases,
    g_qu: [f64; 2],
    init: &TwoModeWaveFunction,
) -> Result<TwoModeWaveFunction> {
    evolve_two_mode_with(phases, g_qu, init, SHELL_TOL)
}

/// [`evolve_two_mode`] with an explicit shell tolerance; infinite disables
/// the check (deliberate one-pair lattices populate the shell by design).
pub fn evolve_two_mode_with(
    phases: &TwoModePhases,
    g_qu: [f64; 2],
    init: &TwoModeWaveFunction,
    shell_tol: f64,
) -> Result<TwoModeWaveFunction> {
    if phases.n_max() != init.n_max() {
        return Err(Error::ShapeMismatch {
            expected: phases.side() * phases.side(),
            found: init.amps.len(),
        });
    }
    let side = phases.side();
    let dim = side * side;
    // H = -i S: diagonal phi, edge couplings -i * (-g sqrt(.)) = i g sqrt(.).
    // gauge d_node = i^{n1+n2} makes every edge entry real (the parity of
    // n1+n2 alternates along any edge).
    let mut h = vec![0.0; dim * dim];
    let mut gauge = vec![C64::new(1.0, 0.0); dim];
    let unit_i = C64::new(0.0, 1.0);
    for n1 in 0..side {
        for n2 in 0..side {
            let node = n1 * side + n2;
            h[node * dim + node] = phases.phi_l[node];
            let mut q = (n1 + n2) % 4;
            let mut gph = C64::new(1.0, 0.0);
            while q > 0 {
                gph *= unit_i;
                q -= 1;
            }
            gauge[node] = gph;
        }
    }
    // S[node][node+e_j] = +g_j sqrt(n_j + 1)  (toward more photons),
    // S[node+e_j][node] = -g_j sqrt(n_j + 1); after the gauge the Hermitian
    // H' entry is -g_j sqrt(n_j + 1) on both sides.
    for n1 in 0..side {
        for n2 in 0..side {
            let node = n1 * side + n2;
            if n1 + 1 < side {
                let to = (n1 + 1) * side + n2;
                let c = g_qu[0] * math::sqrt((n1 + 1) as f64);
                h[node * dim + to] = -c;
                h[to * dim + node] = -c;
            }
            if n2 + 1 < side {
                let to = n1 * side + n2 + 1;
                let c = g_qu[1] * math::sqrt((n2 + 1) as f64);
                h[node * dim + to] = -c;
                h[to * dim + node] = -c;
            }
        }
    }
    let u = expm::expm_gauged_dense(&h, &gauge, dim, 1.0)?;
    let f = u.apply(&init.amps)?;
    let amps: Vec<C64> = f
        .iter()
        .zip(phases.phi_l.iter())
        .map(|(fm, &phi)| fm * math::cis(-phi))
        .collect();
    let out = TwoModeWaveFunction {
        n_max: init.n_max,
        amps,
        norm_drift: 0.0,
    };
    let shell = out.shell_population();
    if shell > shell_tol {
        return Err(Error::TruncationOverflow {
            boundary_population: shell,
            n_max: init.n_max,
        });
    }
    let norm: f64 = out.amps.iter().map(|a| a.norm_sqr()).sum();
    Ok(TwoModeWaveFunction {
        norm_drift: math::abs(1.0 - norm),
        ..out
    })
}

/// Per-mode marginals, the diagonal `P(n, n)` and its fitted geometric ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinStatistics {
    pub marginal_mode1: PhotonStatistics,
    pub marginal_mode2: PhotonStatistics,
    pub diagonal: Vec<f64>,
    /// Least-squares geometric ratio of the populated diagonal tail
    /// (`tanh^2 r` for an ideal twin beam); `None` when under two diagonal
    /// entries are populated.
    pub geometric_ratio: Option<f64>,
}

/// Statistics of a two-mode state.
pub fn twin_statistics(state: &TwoModeWaveFunction) -> TwinStatistics {
    let side = state.n_max as usize + 1;
    let mut p1 = vec![0.0; side];
    let mut p2 = vec![0.0; side];
    let mut diagonal = vec![0.0; side];
    for (n1, n2, a) in state.nodes() {
        let p = a.norm_sqr();
        p1[n1 as usize] += p;
        p2[n2 as usize] += p;
        if n1 == n2 {
            diagonal[n1 as usize] = p;
        }
    }
    // ln P(n,n) regressed on n over the populated tail
    let pts: Vec<(f64, f64)> = diagonal
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-14)
        .map(|(n, &p)| (n as f64, math::ln(p)))
        .collect();
    let geometric_ratio = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        math::exp((n * sxy - sx * sy) / (n * sxx - sx * sx))
    });
    TwinStatistics {
        marginal_mode1: PhotonStatistics::from_distribution(p1),
        marginal_mode2: PhotonStatistics::from_distribution(p2),
        diagonal,
        geometric_ratio,
    }
}

/// Squared overlap with a two-mode reference (GHZ or twin beam), maximized
/// over the sum of the per-mode photon phase references (the only combination
/// the diagonal supports carry).
pub fn fidelity_two_mode(state: &TwoModeWaveFunction, reference: &ReferenceState) -> Result<f64> {
    if !reference.is_two_mode() {
        return Err(Error::ShapeMismatch {
            expected: 2,
            found: 1,
        });
    }
    let mut terms = Vec::with_capacity(reference.amps().len());
    for &(n, r) in reference.amps() {
        if n > state.n_max() {
            continue;
        }
        terms.push((n, r.conj() * state.amplitude(n, n)));
    }
    Ok(crate::observables::maximize_over_phase(&terms))
}
