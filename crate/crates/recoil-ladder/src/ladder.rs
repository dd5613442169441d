//! Level structure of the electron-photon ladder: relativistic dispersion,
//! phase-matching width, per-transition momentum mismatches and the cumulative
//! phases that autonomize the coefficient equations.
//!
//! Units follow lab conventions: electron energies in keV, photon energies in
//! eV, lengths in um, wavenumbers in rad/um. Everything downstream of this
//! module is dimensionless.

use crate::error::{Error, Result};
use crate::math;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Electron rest energy in keV.
pub const ELECTRON_REST_ENERGY_KEV: f64 = 510.99895;
/// hbar*c in keV*nm.
pub const HBAR_C_KEV_NM: f64 = 0.19732698;
/// hbar*c in keV*um.
pub const HBAR_C_KEV_UM: f64 = HBAR_C_KEV_NM * 1e-3;
/// Prefactor of the full phase-matching-width formula, kept at its customary
/// rounding (1240 eV*nm for hc, 511 keV for the rest energy).
const SIGMA_FULL_PREFACTOR: f64 = 1240.0 / (511.0 * 511.0);
/// Coefficient of the simplified low-energy formula.
const SIGMA_SIMPLE_PREFACTOR: f64 = 155.0;
/// The simplified formula is quoted for kinetic energies below this.
pub const SIGMA_SIMPLE_VALIDITY_KEV: f64 = 150.0;

/// How the photon momentum of each mode is fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseMatching {
    /// Momentum chosen so the first one-photon emission is exactly matched.
    OnePhotonEmission,
    /// Momentum chosen so the two-photon emission (one photon per mode for a
    /// two-mode cavity) is exactly matched.
    TwoPhotonEmission,
    /// Explicit photon momenta in rad/um, one entry per mode.
    Custom(Vec<f64>),
}

/// Physical parametrization of one interaction scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    pub electron_kinetic_energy_kev: f64,
    /// Photon energy per cavity mode, eV. One or two modes.
    pub photon_energy_ev: Vec<f64>,
    pub interaction_length_um: f64,
    pub coupling_g_qu: f64,
    pub matched_transition: PhaseMatching,
    /// Grating wavenumber |G| in rad/um; 0 for direct phase matching.
    pub grating_wavenumber_rad_per_um: f64,
    /// Initial Fock occupation per mode.
    pub initial_cavity_fock: Vec<u32>,
    pub truncation_n_max: u32,
}

impl PhysicalConfig {
    /// Single-mode scenario with vacuum initial state and direct matching of
    /// the requested transition.
    pub fn single_mode(
        electron_kinetic_energy_kev: f64,
        photon_energy_ev: f64,
        interaction_length_um: f64,
        coupling_g_qu: f64,
        matched_transition: PhaseMatching,
        truncation_n_max: u32,
    ) -> Self {
        Self {
            electron_kinetic_energy_kev,
            photon_energy_ev: alloc::vec![photon_energy_ev],
            interaction_length_um,
            coupling_g_qu,
            matched_transition,
            grating_wavenumber_rad_per_um: 0.0,
            initial_cavity_fock: alloc::vec![0],
            truncation_n_max,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.photon_energy_ev.len()
    }

    pub fn total_energy_kev(&self) -> f64 {
        ELECTRON_REST_ENERGY_KEV + self.electron_kinetic_energy_kev
    }

    pub fn validate(&self) -> Result<()> {
        let modes = self.mode_count();
        if modes == 0 || modes > 2 {
            return Err(Error::Config(format!("mode_count = {modes}, must be 1 or 2")));
        }
        if !(self.electron_kinetic_energy_kev > 0.0) {
            return Err(Error::Config(format!(
                "electron_kinetic_energy_kev = {} must be positive",
                self.electron_kinetic_energy_kev
            )));
        }
        if !(self.interaction_length_um > 0.0) {
            return Err(Error::Config(format!(
                "interaction_length_um = {} must be positive",
                self.interaction_length_um
            )));
        }
        if !(self.coupling_g_qu >= 0.0) {
            return Err(Error::Config(format!(
                "coupling_g_qu = {} must be non-negative",
                self.coupling_g_qu
            )));
        }
        if !(self.grating_wavenumber_rad_per_um >= 0.0) {
            return Err(Error::Config(format!(
                "grating_wavenumber_rad_per_um = {} must be non-negative",
                self.grating_wavenumber_rad_per_um
            )));
        }
        for &eph in &self.photon_energy_ev {
            if !(eph > 0.0) {
                return Err(Error::Config(format!("photon_energy_ev = {eph} must be positive")));
            }
            if eph * 1e-3 >= self.electron_kinetic_energy_kev {
                return Err(Error::Config(format!(
                    "photon energy {eph} eV must lie strictly below the kinetic energy {} keV",
                    self.electron_kinetic_energy_kev
                )));
            }
        }
        if self.initial_cavity_fock.len() != modes {
            return Err(Error::Config(format!(
                "initial_cavity_fock has {} entries for {modes} modes",
                self.initial_cavity_fock.len()
            )));
        }
        if self.truncation_n_max == 0 {
            return Err(Error::Config("truncation_n_max must be positive".into()));
        }
        if let PhaseMatching::Custom(momenta) = &self.matched_transition {
            if momenta.len() != modes {
                return Err(Error::Config(format!(
                    "custom photon momenta have {} entries for {modes} modes",
                    momenta.len()
                )));
            }
        }
        Ok(())
    }
}

/// Reduced (dimensionless) parametrization: the recoil parameter sigma and the
/// coupling are the only knobs, matching how the observable maps are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedConfig {
    pub sigma: f64,
    pub coupling_g_qu: f64,
    /// 1 = one-photon transition matched, 2 = two-photon transition matched.
    pub matched_order: u8,
    /// phi_{-1} L, used only when `matched_order == 2`.
    pub one_photon_mismatch_phase: f64,
    pub initial_cavity_fock: u32,
    pub truncation_n_max: u32,
}

impl ReducedConfig {
    pub fn one_photon(sigma: f64, coupling_g_qu: f64, truncation_n_max: u32) -> Self {
        Self {
            sigma,
            coupling_g_qu,
            matched_order: 1,
            one_photon_mismatch_phase: 0.0,
            initial_cavity_fock: 0,
            truncation_n_max,
        }
    }

    pub fn two_photon(
        sigma: f64,
        coupling_g_qu: f64,
        one_photon_mismatch_phase: f64,
        truncation_n_max: u32,
    ) -> Self {
        Self {
            sigma,
            coupling_g_qu,
            matched_order: 2,
            one_photon_mismatch_phase,
            initial_cavity_fock: 0,
            truncation_n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::Config(format!("sigma = {} must be positive", self.sigma)));
        }
        if !(self.coupling_g_qu >= 0.0) {
            return Err(Error::Config(format!(
                "coupling_g_qu = {} must be non-negative",
                self.coupling_g_qu
            )));
        }
        match self.matched_order {
            1 => {
                if self.one_photon_mismatch_phase != 0.0 {
                    return Err(Error::Config(
                        "one_photon_mismatch_phase must be 0 when matched_order = 1".into(),
                    ));
                }
            }
            2 => {}
            other => {
                return Err(Error::Config(format!("matched_order = {other}, must be 1 or 2")));
            }
        }
        if self.truncation_n_max == 0 {
            return Err(Error::Config("truncation_n_max must be positive".into()));
        }
        Ok(())
    }
}

/// Per-level mismatch data of one ladder: transition mismatches `Delta k_m L`
/// and cumulative autonomization phases `phi_m L` over `m in [m_min, m_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPhases {
    m_min: i32,
    m_max: i32,
    /// `delta_k_l[j]` is `Delta k_m * L` for the transition `m <-> m+1`,
    /// `m = m_min + j`.
    delta_k_l: Vec<f64>,
    /// `phi_l[j]` is `phi_m * L` for the level `m = m_min + j`; `phi_0 = 0`.
    phi_l: Vec<f64>,
    /// Whether the emission side was cut early because the electron energy
    /// would have dropped below its rest energy.
    truncated: bool,
}

impl LadderPhases {
    /// Build from per-transition mismatches; the cumulative phases follow from
    /// `phi_{m+1} - phi_m = Delta k_m` anchored at `phi_0 = 0`.
    pub fn from_mismatches(m_min: i32, m_max: i32, delta_k_l: Vec<f64>) -> Self {
        assert!(m_min <= 0 && m_max >= 0 && m_min < m_max, "ladder must contain level 0");
        assert_eq!(delta_k_l.len(), (m_max - m_min) as usize);
        let n = delta_k_l.len() + 1;
        let zero_at = (-m_min) as usize;
        let mut phi_l = alloc::vec![0.0; n];
        for j in zero_at..n - 1 {
            phi_l[j + 1] = phi_l[j] + delta_k_l[j];
        }
        for j in (0..zero_at).rev() {
            phi_l[j] = phi_l[j + 1] - delta_k_l[j];
        }
        Self {
            m_min,
            m_max,
            delta_k_l,
            phi_l,
            truncated: false,
        }
    }

    /// Build directly from cumulative phases (used by the reduced laws).
    pub fn from_phases(m_min: i32, m_max: i32, phi_l: Vec<f64>) -> Self {
        assert!(m_min <= 0 && m_max >= 0 && m_min < m_max, "ladder must contain level 0");
        assert_eq!(phi_l.len(), (m_max - m_min + 1) as usize);
        let delta_k_l = phi_l.windows(2).map(|w| w[1] - w[0]).collect();
        Self {
            m_min,
            m_max,
            delta_k_l,
            phi_l,
            truncated: false,
        }
    }

    pub fn m_min(&self) -> i32 {
        self.m_min
    }

    pub fn m_max(&self) -> i32 {
        self.m_max
    }

    /// Number of ladder levels.
    pub fn len(&self) -> usize {
        self.phi_l.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi_l.is_empty()
    }

    /// Cumulative phase `phi_m * L` of level `m`.
    pub fn phi_l(&self, m: i32) -> f64 {
        self.phi_l[(m - self.m_min) as usize]
    }

    /// Mismatch `Delta k_m * L` of the transition `m <-> m+1`.
    pub fn delta_k_l(&self, m: i32) -> f64 {
        self.delta_k_l[(m - self.m_min) as usize]
    }

    pub fn phi_slice(&self) -> &[f64] {
        &self.phi_l
    }

    pub fn delta_k_slice(&self) -> &[f64] {
        &self.delta_k_l
    }

    /// True when the emission ladder was cut before reaching the requested
    /// truncation because the electron ran out of kinetic energy.
    pub fn truncated_at_rest_energy(&self) -> bool {
        self.truncated
    }

    /// Ladder with every phase negated (conjugate dispersion convention).
    pub fn negated(&self) -> Self {
        Self {
            m_min: self.m_min,
            m_max: self.m_max,
            delta_k_l: self.delta_k_l.iter().map(|x| -x).collect(),
            phi_l: self.phi_l.iter().map(|x| -x).collect(),
            truncated: self.truncated,
        }
    }
}

/// Relativistic electron wavenumber `k = sqrt(E^2 - E0^2)/(hbar c)` in rad/um
/// for a total energy in keV.
pub fn electron_wavenumber(total_energy_kev: f64) -> Result<f64> {
    if !(total_energy_kev >= ELECTRON_REST_ENERGY_KEV) {
        return Err(Error::Domain {
            what: "total energy below electron rest energy (keV)",
            value: total_energy_kev,
        });
    }
    let e2 = total_energy_kev * total_energy_kev
        - ELECTRON_REST_ENERGY_KEV * ELECTRON_REST_ENERGY_KEV;
    Ok(math::sqrt(e2) / HBAR_C_KEV_UM)
}

/// Total energy in keV for a wavenumber in rad/um; inverse of
/// [`electron_wavenumber`].
pub fn energy_from_wavenumber(k_rad_per_um: f64) -> f64 {
    let pc = k_rad_per_um * HBAR_C_KEV_UM;
    math::sqrt(pc * pc + ELECTRON_REST_ENERGY_KEV * ELECTRON_REST_ENERGY_KEV)
}

/// Phase-matching width from the full relativistic formula,
/// `sigma = (1240/511^2) ((E^2-E0^2)[keV^2])^{3/2} / (E_ph[eV])^2 / L[um]`.
pub fn sigma_full(kinetic_kev: f64, photon_ev: f64, length_um: f64) -> Result<f64> {
    for (what, value) in [
        ("kinetic energy (keV)", kinetic_kev),
        ("photon energy (eV)", photon_ev),
        ("interaction length (um)", length_um),
    ] {
        if !(value > 0.0) {
            return Err(Error::Domain { what, value });
        }
    }
    let e = ELECTRON_REST_ENERGY_KEV + kinetic_kev;
    let e2 = e * e - ELECTRON_REST_ENERGY_KEV * ELECTRON_REST_ENERGY_KEV;
    Ok(SIGMA_FULL_PREFACTOR * math::powf(e2, 1.5) / (photon_ev * photon_ev * length_um))
}

/// Result of the simplified phase-matching-width formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSimple {
    pub value: f64,
    /// Set when the kinetic energy lies outside the quoted validity range
    /// (E_kin >= 150 keV); the value is still returned.
    pub outside_validity: bool,
}

/// Simplified phase-matching width `155 E_kin[keV]^{3/2} / (E_ph[eV])^2 / L[um]`.
pub fn sigma_simple(kinetic_kev: f64, photon_ev: f64, length_um: f64) -> Result<SigmaSimple> {
    for (what, value) in [
        ("kinetic energy (keV)", kinetic_kev),
        ("photon energy (eV)", photon_ev),
        ("interaction length (um)", length_um),
    ] {
        if !(value > 0.0) {
            return Err(Error::Domain { what, value });
        }
    }
    Ok(SigmaSimple {
        value: SIGMA_SIMPLE_PREFACTOR * math::powf(kinetic_kev, 1.5)
            / (photon_ev * photon_ev * length_um),
        outside_validity: kinetic_kev >= SIGMA_SIMPLE_VALIDITY_KEV,
    })
}

/// Effective number of ladder levels: `sigma + 1` for `sigma >= 1`, else 2.
pub fn n_eff(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain {
            what: "sigma",
            value: sigma,
        });
    }
    Ok(if sigma >= 1.0 { sigma + 1.0 } else { 2.0 })
}

/// Photon momentum per mode (rad/um) fixed by the configured matching,
/// including the quasi-phase-matching grating offset.
///
/// One-photon matching solves `k(O_0) - k(O_-1) - kappa - |G| = 0` per mode;
/// two-photon matching solves `k(O_0) - k(O_-2) - 2 kappa - 2|G| = 0`, where
/// for a two-mode cavity the two emitted photons share a phase velocity so the
/// momenta split in proportion to the photon energies.
pub fn solve_photon_momentum(config: &PhysicalConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let e0 = config.total_energy_kev();
    let k0 = electron_wavenumber(e0)?;
    let g = config.grating_wavenumber_rad_per_um;
    let feasible = |kappa: f64| -> Result<f64> {
        if kappa > 0.0 {
            Ok(kappa)
        } else {
            Err(Error::InfeasiblePhaseMatching {
                photon_momentum: kappa,
            })
        }
    };
    match &config.matched_transition {
        PhaseMatching::Custom(momenta) => Ok(momenta.clone()),
        PhaseMatching::OnePhotonEmission => config
            .photon_energy_ev
            .iter()
            .map(|&eph| {
                let k1 = electron_wavenumber(e0 - eph * 1e-3)?;
                feasible(k0 - k1 - g)
            })
            .collect(),
        PhaseMatching::TwoPhotonEmission => {
            let total_ph_kev: f64 = config.photon_energy_ev.iter().sum::<f64>() * 1e-3
                * if config.mode_count() == 1 { 2.0 } else { 1.0 };
            let k2 = electron_wavenumber(e0 - total_ph_kev)?;
            // common phase velocity: total photon momentum split by energy
            let total_momentum = k0 - k2 - 2.0 * g;
            let total_energy_ev: f64 = if config.mode_count() == 1 {
                2.0 * config.photon_energy_ev[0]
            } else {
                config.photon_energy_ev.iter().sum()
            };
            config
                .photon_energy_ev
                .iter()
                .map(|&eph| feasible(total_momentum * eph / total_energy_ev))
                .collect()
        }
    }
}

/// Mismatch phases of the single-mode physical ladder over the full level
/// range `m in [-truncation_n_max, n_0]`, using the exact relativistic
/// dispersion at every level.
///
/// If the electron would drop below its rest energy before the requested
/// truncation depth, the ladder stops at the last physical level and the
/// result carries the `truncated_at_rest_energy` flag.
pub fn mismatch_phases_physical(config: &PhysicalConfig) -> Result<LadderPhases> {
    config.validate()?;
    if config.mode_count() != 1 {
        return Err(Error::Config(
            "mismatch_phases_physical expects a single-mode configuration".into(),
        ));
    }
    let kappa = solve_photon_momentum(config)?[0];
    let eph_kev = config.photon_energy_ev[0] * 1e-3;
    let length = config.interaction_length_um;
    let grating = config.grating_wavenumber_rad_per_um;
    let e_total = config.total_energy_kev();
    let n0 = config.initial_cavity_fock[0] as i32;
    let m_min_requested = -(config.truncation_n_max as i32);

    // deepest emission level that keeps the electron above rest energy
    let mut m_min = m_min_requested;
    let mut truncated = false;
    while m_min < 0 && e_total + (m_min as f64) * eph_kev < ELECTRON_REST_ENERGY_KEV {
        m_min += 1;
        truncated = true;
    }
    if m_min >= n0 {
        return Err(Error::Config(
            "no emission levels remain above the electron rest energy".into(),
        ));
    }

    let levels = (n0 - m_min + 1) as usize;
    let mut k_of_level = Vec::with_capacity(levels);
    for j in 0..levels {
        let m = m_min + j as i32;
        k_of_level.push(electron_wavenumber(e_total + (m as f64) * eph_kev)?);
    }
    let delta_k_l: Vec<f64> = (0..levels - 1)
        .map(|j| (k_of_level[j + 1] - k_of_level[j] - kappa - grating) * length)
        .collect();
    let mut phases = LadderPhases::from_mismatches(m_min, n0, delta_k_l);
    phases.truncated = truncated;
    Ok(phases)
}

/// Reduced-parametrization mismatch phases.
///
/// For a matched one-photon transition the cumulative phases follow the
/// quadratic recoil law `phi_m L = -pi m (m+1) / sigma` (so `phi_0 = phi_{-1}
/// = 0`). For a matched two-photon transition the even levels follow the same
/// law on the pair ladder, `phi_{2p} L = -pi p (p+1) / sigma` (matched first
/// emission pair), and every odd level carries the single configured
/// one-photon mismatch offset.
pub fn mismatch_phases_reduced(config: &ReducedConfig, m_min: i32) -> Result<LadderPhases> {
    config.validate()?;
    let m_max = config.initial_cavity_fock as i32;
    if m_min >= m_max {
        return Err(Error::Config(format!(
            "m_min = {m_min} must lie below m_max = {m_max}"
        )));
    }
    Ok(LadderPhases::from_phases(
        m_min,
        m_max,
        (m_min..=m_max)
            .map(|m| reduced_phi_l(config, m))
            .collect(),
    ))
}

pub(crate) fn reduced_phi_l(config: &ReducedConfig, m: i32) -> f64 {
    match config.matched_order {
        1 => {
            let m = m as f64;
            -PI * m * (m + 1.0) / config.sigma
        }
        _ => {
            if m.rem_euclid(2) == 0 {
                // signed pair index; the first emission pair (p = -1) is matched
                let p = (m / 2) as f64;
                -PI * p * (p + 1.0) / config.sigma
            } else {
                config.one_photon_mismatch_phase
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FROZEN_K_200KEV: f64 = 2_505_323.189_903_461_9; // rad/um, 40-digit evaluation
    const FROZEN_K_5KEV: f64 = 363_147.710_696_276_79; // rad/um

    #[test]
    fn wavenumber_zero_at_rest() {
        assert_eq!(electron_wavenumber(ELECTRON_REST_ENERGY_KEV).unwrap(), 0.0);
    }

    #[test]
    fn wavenumber_round_trip_5kev() {
        let k = electron_wavenumber(ELECTRON_REST_ENERGY_KEV + 5.0).unwrap();
        let kin = energy_from_wavenumber(k) - ELECTRON_REST_ENERGY_KEV;
        assert!((kin - 5.0).abs() / 5.0 < 1e-12);
    }

    #[test]
    fn wavenumber_matches_high_precision_oracle() {
        let k200 = electron_wavenumber(ELECTRON_REST_ENERGY_KEV + 200.0).unwrap();
        assert!((k200 - FROZEN_K_200KEV).abs() / FROZEN_K_200KEV < 1e-14);
        let k5 = electron_wavenumber(ELECTRON_REST_ENERGY_KEV + 5.0).unwrap();
        assert!((k5 - FROZEN_K_5KEV).abs() / FROZEN_K_5KEV < 1e-14);
    }

    #[test]
    fn wavenumber_rejects_sub_rest_energy() {
        assert!(matches!(
            electron_wavenumber(500.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn sigma_full_reference_point() {
        // the full formula at the single-photon-source working point; the
        // published rounding of this number is 0.83
        let s = sigma_full(5.0, 2.33, 400.0).unwrap();
        assert!((s - 0.804_669_224).abs() < 1e-8);
    }

    #[test]
    fn sigma_full_inverse_in_length() {
        let a = sigma_full(17.0, 1.9, 250.0).unwrap();
        let b = sigma_full(17.0, 1.9, 500.0).unwrap();
        assert_eq!(b * 2.0, a);
    }

    #[test]
    fn sigma_full_agrees_with_sinc_zero_bisection() {
        // independent oracle: first zero of sinc(dk(s) L / 2) where dk(s) is
        // the mismatch after a total energy loss of s photons on the exact
        // dispersion, with the initial transition velocity-matched
        let (ekin, eph, length) = (30.0, 2.0, 500.0);
        let e = ELECTRON_REST_ENERGY_KEV + ekin;
        let hw = eph * 1e-3;
        let inv_beta = |etot: f64| {
            etot / math::sqrt(etot * etot - ELECTRON_REST_ENERGY_KEV * ELECTRON_REST_ENERGY_KEV)
        };
        let w_over_c = hw / HBAR_C_KEV_UM;
        let f = |s: f64| w_over_c * (inv_beta(e - s * hw) - inv_beta(e)) * length / 2.0 - PI;
        let (mut lo, mut hi) = (1e-9, ekin / hw * 0.999_999);
        assert!(f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let zero = 0.5 * (lo + hi);
        let s = sigma_full(ekin, eph, length).unwrap();
        assert!(
            (s - zero).abs() / zero < 0.01,
            "sigma_full {s} vs sinc zero {zero}"
        );
    }

    #[test]
    fn sigma_simple_reference_points() {
        let s = sigma_simple(5.0, 2.33, 400.0).unwrap();
        assert!(!s.outside_validity);
        assert!((s.value - 0.798_022_013).abs() < 1e-8);
        // homogeneity E^{3/2}/L
        let a = sigma_simple(3.0, 1.5, 100.0).unwrap().value;
        let b = sigma_simple(12.0, 1.5, 800.0).unwrap().value;
        assert!((a - b).abs() < 1e-15);
        // exact unity point
        assert_eq!(sigma_simple(1.0, 1.0, 155.0).unwrap().value, 1.0);
    }

    #[test]
    fn sigma_simple_validity_flag() {
        assert!(sigma_simple(150.0, 2.0, 500.0).unwrap().outside_validity);
        assert!(!sigma_simple(149.9, 2.0, 500.0).unwrap().outside_validity);
    }

    #[test]
    fn sigma_rejects_non_positive_inputs() {
        assert!(sigma_full(0.0, 2.0, 100.0).is_err());
        assert!(sigma_full(5.0, -1.0, 100.0).is_err());
        assert!(sigma_simple(5.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn n_eff_branches() {
        assert_eq!(n_eff(5.0).unwrap(), 6.0);
        assert_eq!(n_eff(0.5).unwrap(), 2.0);
        assert_eq!(n_eff(1.0).unwrap(), 2.0);
        assert!(n_eff(0.0).is_err());
    }

    fn config_5kev() -> PhysicalConfig {
        PhysicalConfig::single_mode(5.0, 2.33, 400.0, 0.1, PhaseMatching::OnePhotonEmission, 12)
    }

    #[test]
    fn photon_momentum_one_photon_closed_form() {
        let cfg = config_5kev();
        let kappa = solve_photon_momentum(&cfg).unwrap()[0];
        let e = cfg.total_energy_kev();
        let want =
            electron_wavenumber(e).unwrap() - electron_wavenumber(e - 2.33e-3).unwrap();
        assert_eq!(kappa, want);
    }

    #[test]
    fn photon_momentum_two_photon_closed_form() {
        let mut cfg = config_5kev();
        cfg.matched_transition = PhaseMatching::TwoPhotonEmission;
        let kappa = solve_photon_momentum(&cfg).unwrap()[0];
        let e = cfg.total_energy_kev();
        let want = (electron_wavenumber(e).unwrap()
            - electron_wavenumber(e - 2.0 * 2.33e-3).unwrap())
            / 2.0;
        assert!((kappa - want).abs() / want < 1e-15);
    }

    #[test]
    fn photon_momentum_residual_vanishes() {
        let cfg = config_5kev();
        let phases = mismatch_phases_physical(&cfg).unwrap();
        assert!(phases.phi_l(-1).abs() < 1e-10, "matched first emission");
        assert!(phases.delta_k_l(-1).abs() < 1e-10);
    }

    #[test]
    fn infeasible_grating_is_reported() {
        let mut cfg = config_5kev();
        cfg.grating_wavenumber_rad_per_um = 1e9;
        assert!(matches!(
            solve_photon_momentum(&cfg),
            Err(Error::InfeasiblePhaseMatching { .. })
        ));
    }

    #[test]
    fn physical_phases_telescoping() {
        let phases = mismatch_phases_physical(&config_5kev()).unwrap();
        for m in phases.m_min()..phases.m_max() {
            let lhs = phases.phi_l(m + 1) - phases.phi_l(m);
            assert!((lhs - phases.delta_k_l(m)).abs() <= 1e-14 * (1.0 + lhs.abs()));
        }
        assert_eq!(phases.phi_l(0), 0.0);
    }

    #[test]
    fn physical_phases_interpolate_sinc_zero_at_sigma() {
        // |Delta k_{-n} L / 2| crosses pi at n - 1 ~ sigma (linear-recoil law)
        let cfg = PhysicalConfig::single_mode(
            5.0,
            2.33,
            400.0,
            0.1,
            PhaseMatching::OnePhotonEmission,
            8,
        );
        let phases = mismatch_phases_physical(&cfg).unwrap();
        let sigma = sigma_full(5.0, 2.33, 400.0).unwrap();
        // transitions m <-> m+1 for m = -n: |dk| grows ~ (n-1) * 2 pi / sigma
        let mut crossing = None;
        for n in 1..8 {
            let a = phases.delta_k_l(-n).abs() / 2.0;
            let b = phases.delta_k_l(-n - 1).abs() / 2.0;
            if a <= PI && PI < b {
                // linear interpolation in n between transitions n and n+1
                crossing = Some((n as f64 - 1.0) + (PI - a) / (b - a));
                break;
            }
        }
        let x = crossing.expect("sinc zero crossing inside the ladder");
        assert!((x - sigma).abs() / sigma < 0.02, "crossing {x} vs sigma {sigma}");
    }

    #[test]
    fn deep_ladder_truncates_at_rest_energy() {
        let cfg = PhysicalConfig::single_mode(
            1.0,
            900.0, // eV; rest energy reached after the second emission
            100.0,
            0.1,
            PhaseMatching::Custom(alloc::vec![1.0]),
            50,
        );
        let phases = mismatch_phases_physical(&cfg).unwrap();
        assert!(phases.truncated_at_rest_energy());
        assert!(phases.m_min() > -50);
    }

    #[test]
    fn reduced_one_photon_matched_levels() {
        let cfg = ReducedConfig::one_photon(2.0, 0.3, 6);
        let phases = mismatch_phases_reduced(&cfg, -6).unwrap();
        assert_eq!(phases.phi_l(0), 0.0);
        assert_eq!(phases.phi_l(-1), 0.0);
        // sigma = 2, m = 2: phi_{-2} L = -pi * 2 * 1 / 2 = -pi
        assert!((phases.phi_l(-2) + PI).abs() < 1e-12);
    }

    #[test]
    fn reduced_two_photon_forced_values() {
        let cfg = ReducedConfig::two_photon(0.5, 1.0, -30.0, 6);
        let phases = mismatch_phases_reduced(&cfg, -6).unwrap();
        assert_eq!(phases.phi_l(-1), -30.0);
        assert_eq!(phases.phi_l(-2), 0.0);
        assert_eq!(phases.phi_l(0), 0.0);
        // next pair is recoil-blocked: phi_{-4} = -pi*(-2)(-1)/sigma
        assert!((phases.phi_l(-4) + 2.0 * PI / 0.5).abs() < 1e-12);
        // every odd level carries the same one-photon offset
        assert_eq!(phases.phi_l(-3), -30.0);
        assert_eq!(phases.phi_l(-5), -30.0);
    }

    #[test]
    fn reduced_matches_physical_in_linear_recoil_regime() {
        // one-photon matched physical ladder with sigma >> 1 follows the
        // quadratic law within 2% for m <= sigma / 2
        let cfg = PhysicalConfig::single_mode(
            30.0,
            2.0,
            500.0,
            0.1,
            PhaseMatching::OnePhotonEmission,
            8,
        );
        let phases = mismatch_phases_physical(&cfg).unwrap();
        let sigma = sigma_full(30.0, 2.0, 500.0).unwrap(); // ~13.3
        let reduced = ReducedConfig::one_photon(sigma, 0.1, 8);
        for n in 2..=(sigma as i32 / 2) {
            let phys = phases.phi_l(-n);
            let red = reduced_phi_l(&reduced, -n);
            assert!(
                (phys - red).abs() / red.abs() < 0.02,
                "m = -{n}: {phys} vs {red}"
            );
        }
    }

    #[test]
    fn reduced_rejects_mismatch_with_order_one() {
        let cfg = ReducedConfig {
            sigma: 1.0,
            coupling_g_qu: 0.1,
            matched_order: 1,
            one_photon_mismatch_phase: -3.0,
            initial_cavity_fock: 0,
            truncation_n_max: 4,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn physical_config_validation() {
        let mut cfg = config_5kev();
        cfg.photon_energy_ev = alloc::vec![6000.0]; // above kinetic energy
        assert!(cfg.validate().is_err());
        let mut cfg = config_5kev();
        cfg.initial_cavity_fock = alloc::vec![0, 0];
        assert!(cfg.validate().is_err());
    }
}
