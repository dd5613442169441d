//! JSON configuration documents: one schema with a `mode` discriminator,
//! mapped onto the library's configuration types.

use crate::error::{config_err, CliError, CliResult};
use recoil_ladder::engines::{Engine, SimScenario};
use recoil_ladder::ladder::{PhaseMatching, PhysicalConfig, ReducedConfig};
use recoil_ladder::multimode::TwoModeReducedConfig;
use recoil_ladder::pinem::PinemMatching;
use serde::{Deserialize, Serialize};

/// Top-level configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConfigDoc {
    Physical(PhysicalDoc),
    Reduced(ReducedDoc),
    Pinem(PinemDoc),
    TwoMode(TwoModeDoc),
}

impl ConfigDoc {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::usage(format!("config does not match the schema: {e}")))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

fn default_one() -> u8 {
    1
}

fn default_fidelities() -> Vec<String> {
    Vec::new()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalDoc {
    pub electron_kinetic_energy_kev: f64,
    pub photon_energy_ev: Vec<f64>,
    pub interaction_length_um: f64,
    pub coupling_g_qu: f64,
    pub matched_transition: MatchedTransitionDoc,
    #[serde(default)]
    pub grating_wavenumber_rad_per_um: f64,
    pub initial_cavity_fock: Vec<u32>,
    pub truncation_n_max: u32,
    #[serde(default = "default_fidelities")]
    pub fidelities: Vec<String>,
    #[serde(default)]
    pub broadening: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchedTransitionDoc {
    OnePhotonEmission,
    TwoPhotonEmission,
    Custom(Vec<f64>),
}

impl From<&MatchedTransitionDoc> for PhaseMatching {
    fn from(doc: &MatchedTransitionDoc) -> Self {
        match doc {
            MatchedTransitionDoc::OnePhotonEmission => PhaseMatching::OnePhotonEmission,
            MatchedTransitionDoc::TwoPhotonEmission => PhaseMatching::TwoPhotonEmission,
            MatchedTransitionDoc::Custom(k) => PhaseMatching::Custom(k.clone()),
        }
    }
}

impl PhysicalDoc {
    pub fn to_config(&self) -> CliResult<PhysicalConfig> {
        let cfg = PhysicalConfig {
            electron_kinetic_energy_kev: self.electron_kinetic_energy_kev,
            photon_energy_ev: self.photon_energy_ev.clone(),
            interaction_length_um: self.interaction_length_um,
            coupling_g_qu: self.coupling_g_qu,
            matched_transition: (&self.matched_transition).into(),
            grating_wavenumber_rad_per_um: self.grating_wavenumber_rad_per_um,
            initial_cavity_fock: self.initial_cavity_fock.clone(),
            truncation_n_max: self.truncation_n_max,
        };
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedDoc {
    pub sigma: f64,
    pub coupling_g_qu: f64,
    #[serde(default = "default_one")]
    pub matched_order: u8,
    #[serde(default)]
    pub one_photon_mismatch_phase: f64,
    #[serde(default)]
    pub initial_cavity_fock: u32,
    pub truncation_n_max: u32,
    #[serde(default = "default_fidelities")]
    pub fidelities: Vec<String>,
    #[serde(default)]
    pub broadening: f64,
}

impl ReducedDoc {
    pub fn to_config(&self) -> CliResult<ReducedConfig> {
        let cfg = ReducedConfig {
            sigma: self.sigma,
            coupling_g_qu: self.coupling_g_qu,
            matched_order: self.matched_order,
            one_photon_mismatch_phase: self.one_photon_mismatch_phase,
            initial_cavity_fock: self.initial_cavity_fock,
            truncation_n_max: self.truncation_n_max,
        };
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }
}

/// Coupling specification: a single value or a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingDoc {
    Scalar(f64),
    Grid { min: f64, max: f64, points: usize },
}

impl CouplingDoc {
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        match *self {
            CouplingDoc::Scalar(g) => Ok(vec![g]),
            CouplingDoc::Grid { min, max, points } => {
                if points == 0 {
                    return Err(CliError::usage("coupling grid must contain at least one point"));
                }
                if points == 1 {
                    return Ok(vec![min]);
                }
                if !(max > min) {
                    return Err(CliError::usage("coupling grid needs max > min"));
                }
                let step = (max - min) / (points - 1) as f64;
                Ok((0..points).map(|i| min + i as f64 * step).collect())
            }
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, CouplingDoc::Scalar(_))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MatchingDoc {
    Velocity,
    Emission,
}

fn default_matching() -> MatchingDoc {
    MatchingDoc::Velocity
}

fn default_prominence() -> f64 {
    recoil_ladder::pinem::DEFAULT_REVIVAL_PROMINENCE
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinemDoc {
    pub sigma: f64,
    #[serde(default = "default_one")]
    pub matched_order: u8,
    /// Phase convention of the one-photon ladder; velocity matching is the
    /// standard stimulated-interaction condition.
    #[serde(default = "default_matching")]
    pub matching: MatchingDoc,
    #[serde(default)]
    pub one_photon_mismatch_phase: f64,
    pub coupling: CouplingDoc,
    /// Explicit sideband cap; defaults to `ceil(8 (sigma + g))`.
    #[serde(default)]
    pub sideband_cap: Option<u32>,
    #[serde(default = "default_prominence")]
    pub revival_prominence: f64,
}

impl PinemDoc {
    pub fn matching(&self) -> PinemMatching {
        match self.matching {
            MatchingDoc::Velocity => PinemMatching::VelocityMatched,
            MatchingDoc::Emission => PinemMatching::EmissionMatched,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.sigma > 0.0) {
            return Err(CliError::usage(format!("sigma = {} must be positive", self.sigma)));
        }
        match self.matched_order {
            1 => Ok(()),
            2 if self.one_photon_mismatch_phase != 0.0 => Ok(()),
            2 => Err(CliError::usage(
                "two-photon stimulated interaction needs a nonzero one_photon_mismatch_phase",
            )),
            other => Err(CliError::usage(format!("matched_order = {other}, must be 1 or 2"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeDoc {
    pub sigma: f64,
    /// One value for both modes or a per-mode pair.
    pub coupling_g_qu: CouplingPair,
    pub one_photon_mismatch_phase: f64,
    pub truncation_n_max: u32,
    #[serde(default = "default_fidelities")]
    pub fidelities: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingPair {
    Equal(f64),
    PerMode([f64; 2]),
}

impl CouplingPair {
    pub fn pair(&self) -> [f64; 2] {
        match *self {
            CouplingPair::Equal(g) => [g, g],
            CouplingPair::PerMode(p) => p,
        }
    }
}

impl TwoModeDoc {
    pub fn to_config(&self) -> CliResult<TwoModeReducedConfig> {
        let cfg = TwoModeReducedConfig {
            sigma: self.sigma,
            coupling_g_qu: self.coupling_g_qu.pair(),
            one_photon_mismatch_phase: self.one_photon_mismatch_phase,
            truncation_n_max: self.truncation_n_max,
        };
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }
}

/// Engine selector shared by `evolve` and sweep specifications.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EngineDoc {
    Exact,
    Ode,
    Sinc,
}

impl From<EngineDoc> for Engine {
    fn from(e: EngineDoc) -> Self {
        match e {
            EngineDoc::Exact => Engine::Exact,
            EngineDoc::Ode => Engine::Ode,
            EngineDoc::Sinc => Engine::Sinc,
        }
    }
}

/// Scenario for the single-mode quantized commands.
pub fn scenario_from_doc(doc: &ConfigDoc) -> CliResult<SimScenario> {
    match doc {
        ConfigDoc::Physical(p) => {
            let cfg = p.to_config()?;
            if cfg.mode_count() != 1 {
                return Err(CliError::usage(
                    "evolve expects a single-mode physical configuration; use the twomode subcommand",
                ));
            }
            Ok(SimScenario::Physical(cfg))
        }
        ConfigDoc::Reduced(r) => Ok(SimScenario::Reduced(r.to_config()?)),
        _ => Err(CliError::usage(
            "this subcommand expects a physical or reduced configuration",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_round_trip() {
        let text = r#"{"mode":"reduced","sigma":0.05,"coupling_g_qu":0.785,
            "truncation_n_max":8,"fidelities":["bell"]}"#;
        let doc = ConfigDoc::from_json(text).unwrap();
        match &doc {
            ConfigDoc::Reduced(r) => {
                assert_eq!(r.matched_order, 1);
                assert_eq!(r.truncation_n_max, 8);
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"mode":"reduced","sigma":1.0,"coupling_g_qu":0.1,
            "truncation_n_max":4,"bogus_key":3}"#;
        let err = ConfigDoc::from_json(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bogus_key"));
    }

    #[test]
    fn coupling_grid_expansion() {
        let g = CouplingDoc::Grid {
            min: 0.0,
            max: 1.0,
            points: 5,
        };
        assert_eq!(g.grid().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(CouplingDoc::Grid {
            min: 0.0,
            max: 1.0,
            points: 0
        }
        .grid()
        .is_err());
    }

    #[test]
    fn physical_semantic_validation_maps_to_usage() {
        let text = r#"{"mode":"physical","electron_kinetic_energy_kev":5.0,
            "photon_energy_ev":[6000.0],"interaction_length_um":400.0,
            "coupling_g_qu":0.1,"matched_transition":"one_photon_emission",
            "initial_cavity_fock":[0],"truncation_n_max":8}"#;
        let doc = ConfigDoc::from_json(text).unwrap();
        match &doc {
            ConfigDoc::Physical(p) => {
                let err = p.to_config().unwrap_err();
                assert_eq!(err.exit_code(), 2);
            }
            _ => panic!("wrong variant"),
        }
    }
}
