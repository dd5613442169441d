//! 1-D and 2-D parameter sweeps with deterministic parallel execution.
//!
//! The work unit is one grid cell; cells are independent, assigned to workers
//! in contiguous chunks and written into pre-sized slots, so the result is
//! identical for any worker count.

use crate::config::{ConfigDoc, EngineDoc};
use crate::error::{CliError, CliResult};
use recoil_ladder::engines::{simulate, Engine, SimScenario};
use recoil_ladder::observables::{
    fidelity, photon_statistics, sv_reference_from_mean, ReferenceState,
};
use recoil_ladder::pinem;
use serde::{Deserialize, Serialize};

/// Parameter addressed by a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Sigma,
    GQu,
    OnePhotonMismatchPhase,
    EkinKev,
    EphEv,
    LengthUm,
    /// Classical coupling of the stimulated interaction.
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    Linear,
    Log,
}

fn default_scale() -> AxisScale {
    AxisScale::Linear
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: AxisScale,
}

impl AxisSpec {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        if self.points < 2 {
            return Err(CliError::usage("axis needs at least 2 points"));
        }
        if !(self.max > self.min) {
            return Err(CliError::usage("axis needs max > min"));
        }
        let n = self.points;
        Ok(match self.scale {
            AxisScale::Linear => {
                let step = (self.max - self.min) / (n - 1) as f64;
                (0..n).map(|i| self.min + i as f64 * step).collect()
            }
            AxisScale::Log => {
                if !(self.min > 0.0) {
                    return Err(CliError::usage("log axis needs min > 0"));
                }
                let ratio = (self.max / self.min).ln() / (n - 1) as f64;
                (0..n)
                    .map(|i| self.min * (ratio * i as f64).exp())
                    .collect()
            }
        })
    }
}

/// Observable evaluated in every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableDoc {
    G2,
    MeanPhotons,
    /// Zero-loss population (quantized or stimulated).
    P0,
    /// Full stick spectrum per cell.
    Spectrum,
    /// `fidelity:<kind>`; kinds: bell, noon, coherent, squeezed_vacuum.
    Fidelity(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<AxisSpec>,
    pub base: ConfigDoc,
    pub engine: EngineDoc,
    pub observable: ObservableDoc,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: SweepSpec = serde_json::from_str(text)
            .map_err(|e| CliError::usage(format!("sweep spec does not match the schema: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(CliError::usage("a sweep takes 1 or 2 axes"));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(CliError::usage("sweep axes must reference distinct parameters"));
        }
        for axis in &self.axes {
            axis.values()?;
        }
        // parameter/base compatibility
        for axis in &self.axes {
            let ok = matches!(
                (&self.base, axis.param),
                (ConfigDoc::Reduced(_), AxisParam::Sigma)
                    | (ConfigDoc::Reduced(_), AxisParam::GQu)
                    | (ConfigDoc::Reduced(_), AxisParam::OnePhotonMismatchPhase)
                    | (ConfigDoc::Physical(_), AxisParam::GQu)
                    | (ConfigDoc::Physical(_), AxisParam::EkinKev)
                    | (ConfigDoc::Physical(_), AxisParam::EphEv)
                    | (ConfigDoc::Physical(_), AxisParam::LengthUm)
                    | (ConfigDoc::Pinem(_), AxisParam::Coupling)
                    | (ConfigDoc::Pinem(_), AxisParam::Sigma)
            );
            if !ok {
                return Err(CliError::usage(format!(
                    "axis parameter {:?} does not apply to this base configuration",
                    axis.param
                )));
            }
        }
        if matches!(self.base, ConfigDoc::TwoMode(_)) {
            return Err(CliError::usage("sweeps over two-mode scenarios are not supported"));
        }
        Ok(())
    }
}

/// One evaluated cell: a scalar, a stick spectrum, or a typed failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellValue {
    Scalar(f64),
    Spectrum(Vec<(i32, f64)>),
    /// Sentinel for per-cell failures; never a fake number.
    Failed(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    /// Axis values in the order of the spec.
    pub axes: Vec<Vec<f64>>,
    /// Row-major over the grid (first axis outermost).
    pub cells: Vec<CellValue>,
}

impl SweepResult {
    pub fn shape(&self) -> (usize, usize) {
        match self.axes.len() {
            1 => (self.axes[0].len(), 1),
            _ => (self.axes[0].len(), self.axes[1].len()),
        }
    }
}

fn apply_param(base: &ConfigDoc, param: AxisParam, value: f64) -> ConfigDoc {
    let mut doc = base.clone();
    match (&mut doc, param) {
        (ConfigDoc::Reduced(r), AxisParam::Sigma) => r.sigma = value,
        (ConfigDoc::Reduced(r), AxisParam::GQu) => r.coupling_g_qu = value,
        (ConfigDoc::Reduced(r), AxisParam::OnePhotonMismatchPhase) => {
            r.one_photon_mismatch_phase = value
        }
        (ConfigDoc::Physical(p), AxisParam::GQu) => p.coupling_g_qu = value,
        (ConfigDoc::Physical(p), AxisParam::EkinKev) => p.electron_kinetic_energy_kev = value,
        (ConfigDoc::Physical(p), AxisParam::EphEv) => {
            for e in &mut p.photon_energy_ev {
                *e = value;
            }
        }
        (ConfigDoc::Physical(p), AxisParam::LengthUm) => p.interaction_length_um = value,
        (ConfigDoc::Pinem(p), AxisParam::Coupling) => {
            p.coupling = crate::config::CouplingDoc::Scalar(value)
        }
        (ConfigDoc::Pinem(p), AxisParam::Sigma) => p.sigma = value,
        _ => unreachable!("validated spec"),
    }
    doc
}

fn reference_for(kind: &str, scenario: &SimScenario, mean: f64) -> CliResult<ReferenceState> {
    match kind {
        "bell" => Ok(ReferenceState::bell()),
        "noon" => Ok(ReferenceState::noon2()),
        "coherent" => Ok(ReferenceState::weak_coherent(
            scenario.coupling(),
            scenario.truncation() + scenario.initial_fock(),
        )),
        "squeezed_vacuum" => sv_reference_from_mean(
            mean,
            scenario.truncation() + scenario.initial_fock(),
        )
        .map_err(|e| CliError::usage(e.to_string())),
        other => Err(CliError::usage(format!("unknown fidelity kind {other:?}"))),
    }
}

/// Evaluate one cell; library failures become typed sentinels.
fn eval_cell(doc: &ConfigDoc, engine: Engine, observable: &ObservableDoc) -> CliResult<CellValue> {
    match doc {
        ConfigDoc::Pinem(p) => {
            p.validate()?;
            let g = match p.coupling.grid()?.as_slice() {
                [g] => *g,
                _ => {
                    return Err(CliError::usage(
                        "a swept stimulated-interaction cell needs a scalar coupling",
                    ))
                }
            };
            let cap = p.sideband_cap.unwrap_or_else(|| {
                pinem::suggested_sideband_cap(p.sigma, g).min(4096)
            });
            if cap == 0 {
                return Err(CliError::usage("sideband_cap must be positive"));
            }
            let phases = match p.matched_order {
                1 => pinem::phases_reduced_one_photon(p.sigma, p.matching(), cap),
                _ => pinem::phases_reduced_two_photon(p.sigma, p.one_photon_mismatch_phase, cap),
            };
            let cfg = pinem::PinemConfig::new(g, phases).map_err(|e| CliError::usage(e.to_string()))?;
            let spec = match pinem::pinem_evolve(&cfg) {
                Ok(s) => s,
                Err(e) => return Ok(CellValue::Failed(e.to_string())),
            };
            Ok(match observable {
                ObservableDoc::P0 => CellValue::Scalar(spec.probability(0)),
                ObservableDoc::Spectrum => CellValue::Spectrum(spec.levels),
                _ => {
                    return Err(CliError::usage(
                        "stimulated sweeps support the p0 and spectrum observables",
                    ))
                }
            })
        }
        _ => {
            let scenario = crate::config::scenario_from_doc(doc)?;
            let state = match simulate(&scenario, engine) {
                Ok(s) => s,
                Err(e) => return Ok(CellValue::Failed(e.to_string())),
            };
            Ok(match observable {
                ObservableDoc::G2 => {
                    let stats = photon_statistics(&state);
                    match stats.g2 {
                        Some(v) => CellValue::Scalar(v),
                        None => CellValue::Failed("g2 undefined: empty distribution".into()),
                    }
                }
                ObservableDoc::MeanPhotons => {
                    CellValue::Scalar(photon_statistics(&state).mean_photons)
                }
                ObservableDoc::P0 => CellValue::Scalar(state.probability(0)),
                ObservableDoc::Spectrum => CellValue::Spectrum(
                    state.levels().map(|(m, a)| (m, a.norm_sqr())).collect(),
                ),
                ObservableDoc::Fidelity(kind) => {
                    let mean = photon_statistics(&state).mean_photons;
                    let reference = reference_for(kind, &scenario, mean)?;
                    match fidelity(&state, &reference) {
                        Ok(v) => CellValue::Scalar(v),
                        Err(e) => CellValue::Failed(e.to_string()),
                    }
                }
            })
        }
    }
}

/// Run the sweep on `workers` threads. Every cell is evaluated exactly once;
/// the grid is bitwise independent of the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> CliResult<SweepResult> {
    spec.validate()?;
    let workers = workers.max(1);
    let axes: Vec<Vec<f64>> = spec
        .axes
        .iter()
        .map(|a| a.values())
        .collect::<CliResult<_>>()?;
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();

    // resolved parameter combinations, row-major
    let combos: Vec<Vec<f64>> = (0..total)
        .map(|i| match shape.len() {
            1 => vec![axes[0][i]],
            _ => vec![axes[0][i / shape[1]], axes[1][i % shape[1]]],
        })
        .collect();

    let engine: Engine = spec.engine.into();
    let mut cells: Vec<Option<CliResult<CellValue>>> = (0..total).map(|_| None).collect();
    let chunk = total.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slot_chunk) in cells.chunks_mut(chunk).enumerate() {
            let combos = &combos;
            let spec = &spec;
            let offset = w * chunk;
            scope.spawn(move || {
                for (k, slot) in slot_chunk.iter_mut().enumerate() {
                    let combo = &combos[offset + k];
                    let mut doc = spec.base.clone();
                    for (axis, &value) in spec.axes.iter().zip(combo.iter()) {
                        doc = apply_param(&doc, axis.param, value);
                    }
                    *slot = Some(eval_cell(&doc, engine, &spec.observable));
                }
            });
        }
    });

    let mut out = Vec::with_capacity(total);
    for slot in cells {
        out.push(slot.expect("every cell evaluated")?);
    }
    Ok(SweepResult { axes, cells: out })
}

/// Zero-loss trace of the stimulated interaction over an explicit coupling
/// grid, evaluated in parallel chunks (used by the pinem subcommand and the
/// revival scans).
pub fn parallel_p0_trace(
    sigma: f64,
    matching: pinem::PinemMatching,
    grid: &[f64],
    workers: usize,
) -> CliResult<Vec<f64>> {
    let workers = workers.max(1);
    let chunk = grid.len().div_ceil(workers);
    let mut out: Vec<Option<recoil_ladder::Result<Vec<f64>>>> =
        (0..grid.len().div_ceil(chunk)).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (slot, gs) in out.iter_mut().zip(grid.chunks(chunk)) {
            scope.spawn(move || {
                *slot = Some(pinem::p0_trace(sigma, matching, gs));
            });
        }
    });
    let mut trace = Vec::with_capacity(grid.len());
    for slot in out {
        let part = slot
            .expect("chunk evaluated")
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        trace.extend(part);
    }
    Ok(trace)
}
