//! Observables extracted from evolved states: photon statistics, electron
//! spectra, and fidelities against the reference states of the protocol
//! (Bell, NOON, GHZ, squeezed vacuum, twin beam, weak coherent).

use crate::engines::WaveFunction;
use crate::error::{Error, Result};
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64 as C64;

/// Mean photon number below which g2 is reported as undefined.
pub const G2_UNDEFINED_MEAN: f64 = 1e-12;
/// Cosmetic Gaussian broadening width, in units of the photon energy.
pub const DEFAULT_BROADENING: f64 = 0.15;

/// Photon-number distribution with its derived moments.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStatistics {
    /// `probabilities[n]` is P(n).
    pub probabilities: Vec<f64>,
    pub mean_photons: f64,
    /// Normalized second-order correlation at zero delay; `None` when the
    /// distribution is effectively empty.
    pub g2: Option<f64>,
}

impl PhotonStatistics {
    /// Build from a bare distribution (assumed non-negative, unit sum).
    pub fn from_distribution(probabilities: Vec<f64>) -> Self {
        let mean: f64 = probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum();
        let pairs: f64 = probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
            .sum();
        let g2 = if mean > G2_UNDEFINED_MEAN {
            Some(pairs / (mean * mean))
        } else {
            None
        };
        Self {
            probabilities,
            mean_photons: mean,
            g2,
        }
    }
}

/// Photon statistics of an evolved state. Perfect electron-photon
/// entanglement makes `P(n) = |C_m|^2` with `n = n0 - m`, so the photon
/// distribution and the electron spectrum carry the same weights.
pub fn photon_statistics(state: &WaveFunction) -> PhotonStatistics {
    let n_levels = state.len();
    let mut probabilities = vec![0.0; n_levels];
    for (m, amp) in state.levels() {
        probabilities[state.photon_number(m) as usize] = amp.norm_sqr();
    }
    PhotonStatistics::from_distribution(probabilities)
}

/// `g2 = 3 + 1/mean`, the squeezed-vacuum value.
pub fn squeezed_vacuum_g2_reference(mean: f64) -> Result<f64> {
    if !(mean > 0.0) {
        return Err(Error::Domain {
            what: "mean photon number",
            value: mean,
        });
    }
    Ok(3.0 + 1.0 / mean)
}

/// Effective two-photon coupling `g_qu^2 / (-phi_{-1} L)`.
pub fn two_photon_g_eff(g_qu: f64, one_photon_mismatch_phase: f64) -> Result<f64> {
    if one_photon_mismatch_phase == 0.0 {
        return Err(Error::ZeroMismatch);
    }
    Ok(g_qu * g_qu / (-one_photon_mismatch_phase))
}

/// Reference states, stored as sparse amplitudes over the photon-number basis
/// (the electron level is implied by the entanglement).
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceKind {
    Bell,
    Noon2,
    Ghz,
    SqueezedVacuum { r: f64, phi: f64 },
    TwinBeam { r: f64, phi: f64 },
    WeakCoherent { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    pub kind: ReferenceKind,
    /// Single-mode references: `(n, amplitude)`. Two-mode references (GHZ,
    /// twin beam): `(n, amplitude)` on the diagonal `(n, n)`.
    amps: Vec<(u32, C64)>,
    two_mode: bool,
}

impl ReferenceState {
    /// `(|00> + |11>)/sqrt(2)` over the relabeled single-mode ladder.
    pub fn bell() -> Self {
        let w = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            kind: ReferenceKind::Bell,
            amps: vec![(0, w), (1, w)],
            two_mode: false,
        }
    }

    /// `(|20> + |02>)/sqrt(2)`: equal weight on zero and two photons.
    pub fn noon2() -> Self {
        let w = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            kind: ReferenceKind::Noon2,
            amps: vec![(0, w), (2, w)],
            two_mode: false,
        }
    }

    /// `(|000> + |111>)/sqrt(2)` over the two-mode lattice diagonal.
    pub fn ghz() -> Self {
        let w = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            kind: ReferenceKind::Ghz,
            amps: vec![(0, w), (1, w)],
            two_mode: true,
        }
    }

    /// Single-mode squeezed vacuum with squeeze parameter `r` and phase `phi`.
    pub fn squeezed_vacuum(r: f64, phi: f64, n_cut: u32) -> Self {
        let mut amps = Vec::new();
        let t = math::tanh(r);
        let norm = 1.0 / math::sqrt(math::cosh(r));
        // amplitude at 2k: norm * (-e^{i phi} tanh r)^k * sqrt((2k)!)/(2^k k!)
        let step = math::cis(phi) * (-t);
        let mut coeff = C64::new(norm, 0.0);
        let mut ratio = 1.0;
        amps.push((0, coeff));
        for k in 1..=(n_cut / 2) {
            let kf = k as f64;
            // sqrt((2k)!)/(2^k k!) grows by sqrt((2k)(2k-1))/(2k) per pair
            ratio *= math::sqrt((2.0 * kf) * (2.0 * kf - 1.0)) / (2.0 * kf);
            coeff *= step;
            amps.push((2 * k, coeff * ratio));
        }
        Self {
            kind: ReferenceKind::SqueezedVacuum { r, phi },
            amps,
            two_mode: false,
        }
    }

    /// Two-mode squeezed vacuum (twin beam) on the `(n, n)` diagonal.
    pub fn twin_beam(r: f64, phi: f64, n_cut: u32) -> Self {
        let mut amps = Vec::new();
        let t = math::tanh(r);
        let norm = 1.0 / math::cosh(r);
        let step = math::cis(phi) * (-t);
        let mut coeff = C64::new(norm, 0.0);
        for n in 0..=n_cut {
            amps.push((n, coeff));
            coeff *= step;
        }
        Self {
            kind: ReferenceKind::TwinBeam { r, phi },
            amps,
            two_mode: true,
        }
    }

    /// Weak coherent state `e^{-|a|^2/2} a^n / sqrt(n!)`.
    pub fn weak_coherent(alpha: f64, n_cut: u32) -> Self {
        let mut amps = Vec::new();
        let pref = math::exp(-alpha * alpha / 2.0);
        let mut coeff = pref;
        amps.push((0, C64::new(coeff, 0.0)));
        for n in 1..=n_cut {
            coeff *= alpha / math::sqrt(n as f64);
            amps.push((n, C64::new(coeff, 0.0)));
        }
        Self {
            kind: ReferenceKind::WeakCoherent { alpha },
            amps,
            two_mode: false,
        }
    }

    pub fn is_two_mode(&self) -> bool {
        self.two_mode
    }

    pub(crate) fn amps(&self) -> &[(u32, C64)] {
        &self.amps
    }

    /// `P(n)` of the reference itself.
    pub fn probability(&self, n: u32) -> f64 {
        self.amps
            .iter()
            .find(|(k, _)| *k == n)
            .map(|(_, a)| a.norm_sqr())
            .unwrap_or(0.0)
    }
}

/// Squeezed-vacuum reference with `r` fixed by `mean = sinh^2 r`. The free
/// phase is left at zero; [`fidelity`] optimizes over it anyway.
pub fn sv_reference_from_mean(mean: f64, n_cut: u32) -> Result<ReferenceState> {
    if !(mean >= 0.0) {
        return Err(Error::Domain {
            what: "mean photon number",
            value: mean,
        });
    }
    Ok(ReferenceState::squeezed_vacuum(
        math::asinh(math::sqrt(mean)),
        0.0,
        n_cut,
    ))
}

/// Squared overlap `|<ref|psi>|^2`, maximized over the photon-mode phase
/// reference (`|n> -> e^{i n theta} |n>`), which no observable fixes. This
/// also absorbs the free phase of the squeezed-vacuum and twin-beam
/// references. Global-phase invariant by construction.
pub fn fidelity(state: &WaveFunction, reference: &ReferenceState) -> Result<f64> {
    if reference.is_two_mode() {
        return Err(Error::ShapeMismatch {
            expected: 1,
            found: 2,
        });
    }
    let mut terms = Vec::with_capacity(reference.amps().len());
    for &(n, r) in reference.amps() {
        let m = state.initial_fock() as i32 - n as i32;
        if m < state.m_min() || m > state.m_max() {
            continue;
        }
        terms.push((n, r.conj() * state.amplitude(m)));
    }
    Ok(maximize_over_phase(&terms))
}

/// Maximize `|sum_k w_k e^{-i n_k theta}|^2` over `theta in [0, 2 pi)` by a
/// coarse scan plus golden-section refinement (tolerance 1e-6 in theta).
pub(crate) fn maximize_over_phase(terms: &[(u32, C64)]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    // distinct photon numbers <= 1: phase drops out entirely
    if terms.len() == 1 {
        return terms[0].1.norm_sqr();
    }
    let overlap_sq = |theta: f64| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(n, w) in terms {
            acc += w * math::cis(-(n as f64) * theta);
        }
        acc.norm_sqr()
    };
    let coarse = 1024;
    let mut best_theta = 0.0;
    let mut best = -1.0;
    for i in 0..coarse {
        let theta = TAU * i as f64 / coarse as f64;
        let v = overlap_sq(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    // golden-section around the best coarse sample
    let golden = 0.618_033_988_749_894_9;
    let mut a = best_theta - TAU / coarse as f64;
    let mut b = best_theta + TAU / coarse as f64;
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (overlap_sq(c), overlap_sq(d));
    while b - a > 1e-6 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = overlap_sq(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = overlap_sq(d);
        }
    }
    best.max(fc).max(fd)
}

/// Stick spectrum over the energy-loss index `m`, with an optional
/// Gaussian-broadened trace for rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronSpectrum {
    /// `(m, probability)` in ascending `m`.
    pub levels: Vec<(i32, f64)>,
    /// Uniform grid in units of the photon energy and the broadened density,
    /// present only when a positive broadening was requested.
    pub trace: Option<(Vec<f64>, Vec<f64>)>,
}

impl ElectronSpectrum {
    pub fn from_levels(levels: Vec<(i32, f64)>, broadening_sigma: f64) -> Self {
        let trace = (broadening_sigma > 0.0).then(|| {
            let m_lo = levels.first().map(|&(m, _)| m).unwrap_or(0) as f64 - 4.0 * broadening_sigma;
            let m_hi = levels.last().map(|&(m, _)| m).unwrap_or(0) as f64 + 4.0 * broadening_sigma;
            let step = broadening_sigma / 8.0;
            let count = ((m_hi - m_lo) / step) as usize + 1;
            let grid: Vec<f64> = (0..count).map(|i| m_lo + i as f64 * step).collect();
            let inv = 1.0 / (broadening_sigma * math::sqrt(TAU));
            let density: Vec<f64> = grid
                .iter()
                .map(|&x| {
                    levels
                        .iter()
                        .map(|&(m, p)| {
                            let z = (x - m as f64) / broadening_sigma;
                            p * inv * math::exp(-0.5 * z * z)
                        })
                        .sum()
                })
                .collect();
            (grid, density)
        });
        Self { levels, trace }
    }

    pub fn probability(&self, m: i32) -> f64 {
        self.levels
            .iter()
            .find(|&&(mm, _)| mm == m)
            .map(|&(_, p)| p)
            .unwrap_or(0.0)
    }
}

/// Electron energy spectrum of an evolved state; `broadening_sigma = 0` gives
/// sticks only.
pub fn electron_spectrum(state: &WaveFunction, broadening_sigma: f64) -> ElectronSpectrum {
    let levels: Vec<(i32, f64)> = state.levels().map(|(m, a)| (m, a.norm_sqr())).collect();
    ElectronSpectrum::from_levels(levels, broadening_sigma)
}

/// Smallest `n` after which the distribution has permanently dropped by at
/// least `drop_factor`: `P(n+1) < P(n)/drop_factor` and every later `P`
/// stays below `P(n)/drop_factor`. `None` when no such cut exists.
///
/// `drop_factor` must exceed 1 (10 is the customary sharp-drop threshold).
pub fn cutoff_position(stats: &PhotonStatistics, drop_factor: f64) -> Option<usize> {
    assert!(drop_factor > 1.0, "drop_factor must exceed 1");
    let p = &stats.probabilities;
    'outer: for n in 0..p.len().saturating_sub(1) {
        let bar = p[n] / drop_factor;
        if !(p[n + 1] < bar) {
            continue;
        }
        for &later in &p[n + 1..] {
            if !(later < bar) {
                continue 'outer;
            }
        }
        return Some(n);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{evolve_exact, WaveFunction};
    use crate::ladder::{mismatch_phases_reduced, ReducedConfig};
    use core::f64::consts::FRAC_PI_4;

    fn single_photon_state() -> WaveFunction {
        // |-1, 1>
        WaveFunction::from_amplitudes(
            -2,
            0,
            vec![
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pure_single_photon_statistics() {
        let stats = photon_statistics(&single_photon_state());
        assert_eq!(stats.probabilities[1], 1.0);
        assert_eq!(stats.g2, Some(0.0));
        assert_eq!(stats.mean_photons, 1.0);
    }

    #[test]
    fn two_level_distribution_has_zero_g2() {
        let stats = PhotonStatistics::from_distribution(vec![0.7, 0.3]);
        assert_eq!(stats.g2, Some(0.0));
    }

    #[test]
    fn g2_undefined_for_empty_distribution() {
        let stats = PhotonStatistics::from_distribution(vec![1.0, 0.0, 0.0]);
        assert_eq!(stats.g2, None);
    }

    #[test]
    fn coherent_limit_g2_is_one() {
        let cfg = ReducedConfig::one_photon(1e9, 0.3, 16);
        let phases = mismatch_phases_reduced(&cfg, -16).unwrap();
        let init = WaveFunction::ground(-16, 0);
        let out = evolve_exact(&phases, 0.3, &init).unwrap();
        let stats = photon_statistics(&out);
        assert!((stats.g2.unwrap() - 1.0).abs() < 1e-3);
        assert!((stats.mean_photons - 0.09).abs() < 1e-6);
    }

    #[test]
    fn antibunching_at_the_published_working_point() {
        use crate::ladder::{PhaseMatching, PhysicalConfig};
        let cfg = PhysicalConfig::single_mode(
            5.0,
            2.33,
            400.0,
            0.1,
            PhaseMatching::OnePhotonEmission,
            12,
        );
        let phases = crate::ladder::mismatch_phases_physical(&cfg).unwrap();
        let init = WaveFunction::ground(phases.m_min(), 0);
        let out = evolve_exact(&phases, 0.1, &init).unwrap();
        let stats = photon_statistics(&out);
        let g2 = stats.g2.unwrap();
        assert!((g2 - 0.05).abs() <= 0.01, "g2 = {g2}");
    }

    #[test]
    fn sv_g2_reference_values() {
        assert_eq!(squeezed_vacuum_g2_reference(1.0).unwrap(), 4.0);
        assert_eq!(squeezed_vacuum_g2_reference(0.5).unwrap(), 5.0);
        assert!((squeezed_vacuum_g2_reference(1e12).unwrap() - 3.0).abs() < 1e-9);
        assert!(squeezed_vacuum_g2_reference(0.0).is_err());
    }

    #[test]
    fn g_eff_arithmetic() {
        assert_eq!(two_photon_g_eff(2.0, -4.0).unwrap(), 1.0);
        let base = two_photon_g_eff(1.3, -7.0).unwrap();
        let doubled = two_photon_g_eff(2.6, -7.0).unwrap();
        assert!((doubled - 4.0 * base).abs() < 1e-15);
        assert!(matches!(two_photon_g_eff(1.0, 0.0), Err(Error::ZeroMismatch)));
    }

    #[test]
    fn fidelity_of_state_with_itself_and_orthogonal() {
        let psi = single_photon_state();
        // the n = 1 Fock component alone, i.e. |-1,1> itself
        let same = ReferenceState {
            kind: ReferenceKind::Bell,
            amps: vec![(1, C64::new(1.0, 0.0))],
            two_mode: false,
        };
        assert!((fidelity(&psi, &same).unwrap() - 1.0).abs() < 1e-12);
        let orthogonal = ReferenceState {
            kind: ReferenceKind::Bell,
            amps: vec![(0, C64::new(1.0, 0.0))],
            two_mode: false,
        };
        assert!(fidelity(&psi, &orthogonal).unwrap() < 1e-12);
    }

    #[test]
    fn fidelity_is_global_phase_invariant() {
        let cfg = ReducedConfig::one_photon(0.05, FRAC_PI_4, 4);
        let phases = mismatch_phases_reduced(&cfg, -4).unwrap();
        let init = WaveFunction::ground(-4, 0);
        let out = evolve_exact(&phases, FRAC_PI_4, &init).unwrap();
        let bell = ReferenceState::bell();
        let f0 = fidelity(&out, &bell).unwrap();
        for k in 1..7 {
            let phase = math::cis(1.7 * k as f64);
            let rotated = WaveFunction::from_amplitudes(
                out.m_min(),
                out.initial_fock(),
                out.amplitudes().iter().map(|a| a * phase).collect(),
            )
            .unwrap();
            let f = fidelity(&rotated, &bell).unwrap();
            assert!((f - f0).abs() < 1e-14);
        }
    }

    #[test]
    fn bell_fidelity_at_pi_over_four() {
        let cfg = ReducedConfig::one_photon(0.05, FRAC_PI_4, 6);
        let phases = mismatch_phases_reduced(&cfg, -6).unwrap();
        let init = WaveFunction::ground(-6, 0);
        let out = evolve_exact(&phases, FRAC_PI_4, &init).unwrap();
        let f = fidelity(&out, &ReferenceState::bell()).unwrap();
        assert!(f > 0.99, "Bell fidelity {f}");
    }

    #[test]
    fn sv_reference_even_ratios() {
        let r = 0.8;
        let reference = ReferenceState::squeezed_vacuum(r, 1.2, 12);
        let t2 = math::tanh(r) * math::tanh(r);
        // P(2n)/P(0) = ((2n)!/(2^n n!)^2) tanh^{2n} r
        let mut factor = 1.0;
        for n in 1..=5u32 {
            let nf = n as f64;
            factor *= (2.0 * nf) * (2.0 * nf - 1.0) / (2.0 * nf * 2.0 * nf);
            let want = factor * math::powf(t2, nf);
            let got = reference.probability(2 * n) / reference.probability(0);
            assert!((got - want).abs() < 1e-12 * want.max(1.0));
        }
        // odd components vanish identically
        assert_eq!(reference.probability(3), 0.0);
        assert_eq!(reference.probability(7), 0.0);
    }

    #[test]
    fn sv_reference_from_mean_limits() {
        let vac = sv_reference_from_mean(0.0, 8).unwrap();
        assert!((vac.probability(0) - 1.0).abs() < 1e-12);
        let reference = sv_reference_from_mean(2.0, 160).unwrap();
        let mean: f64 = reference
            .amps()
            .iter()
            .map(|(n, a)| *n as f64 * a.norm_sqr())
            .sum();
        assert!((mean - 2.0).abs() < 1e-6, "mean {mean}");
    }

    #[test]
    fn spectrum_sticks_and_broadening() {
        let state = WaveFunction::ground(-3, 0);
        let spec = electron_spectrum(&state, 0.0);
        assert!(spec.trace.is_none());
        assert_eq!(spec.probability(0), 1.0);
        assert_eq!(spec.levels.iter().map(|&(_, p)| p).sum::<f64>(), 1.0);

        let spec = electron_spectrum(&state, DEFAULT_BROADENING);
        let (grid, density) = spec.trace.as_ref().unwrap();
        // density integrates to ~1
        let dx = grid[1] - grid[0];
        let integral: f64 = density.iter().sum::<f64>() * dx;
        assert!((integral - 1.0).abs() < 1e-3);
    }

    #[test]
    fn spectrum_of_no_recoil_unit_coupling_is_poisson() {
        let cfg = ReducedConfig::one_photon(1e9, 1.0, 24);
        let phases = mismatch_phases_reduced(&cfg, -24).unwrap();
        let init = WaveFunction::ground(-24, 0);
        let out = evolve_exact(&phases, 1.0, &init).unwrap();
        let spec = electron_spectrum(&out, 0.0);
        let want = [0.367_879_441_171, 0.367_879_441_171, 0.183_939_720_586];
        for (n, w) in want.iter().enumerate() {
            assert!((spec.probability(-(n as i32)) - w).abs() < 1e-9);
        }
    }

    #[test]
    fn cutoff_detection() {
        // geometric decay, ratio 2: no sharp drop
        let geometric =
            PhotonStatistics::from_distribution((0..12).map(|n| 0.5_f64.powi(n) * 0.5).collect());
        assert_eq!(cutoff_position(&geometric, 10.0), None);
        // pure |-1,1>
        let stats = photon_statistics(&single_photon_state());
        assert_eq!(cutoff_position(&stats, 10.0), Some(1));
    }

    #[test]
    fn cutoff_of_shaped_coherent_state_tracks_sigma() {
        // sigma = 3, moderate coupling: cut-off within [sigma - 1, 2 sigma]
        let sigma = 3.0;
        let cfg = ReducedConfig::one_photon(sigma, 3.0, 64);
        let phases = mismatch_phases_reduced(&cfg, -64).unwrap();
        let init = WaveFunction::ground(-64, 0);
        let out = evolve_exact(&phases, 3.0, &init).unwrap();
        let stats = photon_statistics(&out);
        let cut = cutoff_position(&stats, 10.0).expect("recoil cut-off");
        assert!(
            (cut as f64) >= sigma - 1.0 && (cut as f64) <= 2.0 * sigma,
            "cutoff at {cut}"
        );
        // the cut-off moves out with coupling strength: at g = 10 it sits
        // beyond the low-coupling window but still exists
        let strong = evolve_exact(&phases, 10.0, &init).unwrap();
        let cut_strong = cutoff_position(&photon_statistics(&strong), 10.0).expect("cut-off");
        assert!(cut_strong > cut, "strong-coupling cut-off {cut_strong} vs {cut}");
    }
}
