//! Implementations of the five subcommands. Each returns the files it wrote;
//! the manifest is written last so exit code 0 implies every listed output
//! exists.

use crate::config::{scenario_from_doc, ConfigDoc, EngineDoc};
use crate::csvio::{write_csv, Field};
use crate::error::{config_err, runtime_err, CliError, CliResult};
use crate::manifest::RunManifest;
use crate::sweep::{parallel_p0_trace, run_sweep, CellValue, SweepSpec};
use recoil_ladder::engines::{evolve_with, EvolveOptions, WaveFunction};
use recoil_ladder::ladder::{n_eff, sigma_full, sigma_simple};
use recoil_ladder::multimode::{
    evolve_two_mode, fidelity_two_mode, twin_statistics, TwoModePhases, TwoModeWaveFunction,
};
use recoil_ladder::observables::{
    electron_spectrum, fidelity, photon_statistics, sv_reference_from_mean, ReferenceState,
};
use recoil_ladder::pinem;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};

pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("RECOIL_LADDER_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
    .max(1)
}

/// Default cap for a single run; enormous defaults (effectively recoil-free
/// scenarios) must be overridden explicitly instead of exhausting memory.
fn effective_sideband_cap(explicit: Option<u32>, sigma: f64, g: f64) -> CliResult<u32> {
    let cap = explicit.unwrap_or_else(|| pinem::suggested_sideband_cap(sigma, g));
    if explicit.is_none() && cap > 100_000 {
        return Err(CliError::usage(format!(
            "default sideband cap {cap} is impractically large for sigma = {sigma}; set sideband_cap explicitly"
        )));
    }
    if cap == 0 {
        return Err(CliError::usage("sideband_cap must be positive"));
    }
    Ok(cap)
}

fn read_input(path: &Path) -> CliResult<(String, Vec<u8>)> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::usage(format!("{} is not utf-8", path.display())))?;
    Ok((text, bytes))
}

fn ensure_out_dir(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", out.display())))?;
    Ok(())
}

/// `sigma`: print the phase-matching width (full and simplified formulas) and
/// the effective level count as one structured line.
pub fn cmd_sigma(ekin_kev: f64, eph_ev: f64, length_um: f64) -> CliResult<String> {
    let full = sigma_full(ekin_kev, eph_ev, length_um).map_err(config_err)?;
    let simple = sigma_simple(ekin_kev, eph_ev, length_um).map_err(config_err)?;
    let levels = n_eff(full).map_err(config_err)?;
    let mut line = format!(
        "sigma_full={full} sigma_simple={} n_eff={levels}",
        simple.value
    );
    if simple.outside_validity {
        line.push_str(" simple_formula_outside_validity=true");
    }
    Ok(line)
}

fn fidelity_report(
    kinds: &[String],
    state: &WaveFunction,
    coupling: f64,
) -> CliResult<serde_json::Map<String, serde_json::Value>> {
    let mut map = serde_json::Map::new();
    let n_cut = (state.len() as u32).saturating_sub(1) + state.initial_fock();
    for kind in kinds {
        let reference = match kind.as_str() {
            "bell" => ReferenceState::bell(),
            "noon" => ReferenceState::noon2(),
            "coherent" => ReferenceState::weak_coherent(coupling, n_cut),
            "squeezed_vacuum" => {
                let mean = photon_statistics(state).mean_photons;
                sv_reference_from_mean(mean, n_cut).map_err(config_err)?
            }
            other => return Err(CliError::usage(format!("unknown fidelity kind {other:?}"))),
        };
        let value = fidelity(state, &reference).map_err(runtime_err)?;
        map.insert(format!("{kind}_fidelity"), json!(value));
    }
    Ok(map)
}

/// `evolve`: run one single-mode scenario, write the stick spectrum CSV and a
/// statistics JSON.
pub fn cmd_evolve(config_path: &Path, engine: EngineDoc, out: &Path) -> CliResult<Vec<PathBuf>> {
    let (text, bytes) = read_input(config_path)?;
    let doc = ConfigDoc::from_json(&text)?;
    let scenario = scenario_from_doc(&doc)?;
    let (fidelities, broadening) = match &doc {
        ConfigDoc::Physical(p) => (p.fidelities.clone(), p.broadening),
        ConfigDoc::Reduced(r) => (r.fidelities.clone(), r.broadening),
        _ => unreachable!("scenario_from_doc filtered"),
    };
    ensure_out_dir(out)?;

    let phases = scenario.phases().map_err(config_err)?;
    let init = WaveFunction::ground(phases.m_min(), scenario.initial_fock());
    let state = evolve_with(
        engine.into(),
        &phases,
        scenario.coupling(),
        &init,
        &EvolveOptions::default(),
    )
    .map_err(runtime_err)?;

    let spectrum = electron_spectrum(&state, broadening);
    let spectrum_path = out.join("spectrum.csv");
    write_csv(
        &spectrum_path,
        &["m", "probability"],
        spectrum
            .levels
            .iter()
            .map(|&(m, p)| vec![Field::Int(m as i64), Field::Float(p)]),
    )?;

    let mut trace_path = None;
    if let Some((grid, density)) = &spectrum.trace {
        let path = out.join("trace.csv");
        write_csv(
            &path,
            &["energy_over_photon_energy", "density"],
            grid.iter()
                .zip(density.iter())
                .map(|(&x, &d)| vec![Field::Float(x), Field::Float(d)]),
        )?;
        trace_path = Some(path);
    }

    let stats = photon_statistics(&state);
    let mut body = json!({
        "probabilities": stats.probabilities,
        "mean_photons": stats.mean_photons,
        "g2": stats.g2,
        "norm_drift": state.norm_drift(),
    });
    for (k, v) in fidelity_report(&fidelities, &state, scenario.coupling())? {
        body[k] = v;
    }
    let stats_path = out.join("statistics.json");
    fs::write(&stats_path, serde_json::to_string_pretty(&body).expect("serializes"))?;

    let mut manifest = RunManifest::new("evolve", doc.to_json_value(), Some(&bytes));
    manifest.record(&spectrum_path);
    manifest.record(&stats_path);
    let mut outputs = vec![spectrum_path, stats_path];
    if let Some(path) = trace_path {
        manifest.record(&path);
        outputs.push(path);
    }
    manifest.write(out)?;
    outputs.push(out.join("manifest.json"));
    Ok(outputs)
}

/// `sweep`: evaluate a 1-D or 2-D grid and write `grid.csv` plus metadata.
pub fn cmd_sweep(spec_path: &Path, workers: Option<usize>, out: &Path) -> CliResult<Vec<PathBuf>> {
    let (text, bytes) = read_input(spec_path)?;
    let spec = SweepSpec::from_json(&text)?;
    ensure_out_dir(out)?;
    let workers = resolve_workers(workers);
    let result = run_sweep(&spec, workers)?;

    let grid_path = out.join("grid.csv");
    let two_d = result.axes.len() == 2;
    let axis_names: Vec<String> = spec
        .axes
        .iter()
        .map(|a| {
            serde_json::to_value(a.param)
                .expect("serializes")
                .as_str()
                .expect("string variant")
                .to_owned()
        })
        .collect();
    let spectral = matches!(spec.observable, crate::sweep::ObservableDoc::Spectrum);
    let mut header: Vec<&str> = axis_names.iter().map(String::as_str).collect();
    if spectral {
        header.push("m");
        header.push("probability");
    } else {
        header.push("value");
    }

    let mut rows: Vec<Vec<Field>> = Vec::new();
    for (i, cell) in result.cells.iter().enumerate() {
        let coords = if two_d {
            vec![
                result.axes[0][i / result.axes[1].len()],
                result.axes[1][i % result.axes[1].len()],
            ]
        } else {
            vec![result.axes[0][i]]
        };
        let coord_fields: Vec<Field> = coords.iter().map(|&v| Field::Float(v)).collect();
        match cell {
            CellValue::Scalar(v) => {
                let mut row = coord_fields.clone();
                row.push(Field::Float(*v));
                rows.push(row);
            }
            CellValue::Failed(reason) => {
                let mut row = coord_fields.clone();
                if spectral {
                    row.push(Field::Str(String::new()));
                }
                row.push(Field::Str(format!("failed:{}", reason.replace(',', ";"))));
                rows.push(row);
            }
            CellValue::Spectrum(levels) => {
                for &(m, p) in levels {
                    let mut row = coord_fields.clone();
                    row.push(Field::Int(m as i64));
                    row.push(Field::Float(p));
                    rows.push(row);
                }
            }
        }
    }
    write_csv(&grid_path, &header, rows)?;

    let meta_path = out.join("metadata.json");
    let meta = json!({
        "engine": spec.engine,
        "observable": spec.observable,
        "axes": spec.axes,
        "workers": workers,
        "version": env!("CARGO_PKG_VERSION"),
    });
    fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("serializes"))?;

    let mut manifest = RunManifest::new("sweep", serde_json::to_value(&spec.base).unwrap(), Some(&bytes));
    manifest.record(&grid_path);
    manifest.record(&meta_path);
    manifest.write(out)?;
    Ok(vec![grid_path, meta_path, out.join("manifest.json")])
}

/// `pinem`: sideband spectrum for a scalar coupling, or a zero-loss trace
/// with revival detection for a coupling grid.
pub fn cmd_pinem(config_path: &Path, workers: Option<usize>, out: &Path) -> CliResult<Vec<PathBuf>> {
    let (text, bytes) = read_input(config_path)?;
    let doc = ConfigDoc::from_json(&text)?;
    let p = match &doc {
        ConfigDoc::Pinem(p) => p,
        _ => return Err(CliError::usage("pinem expects a configuration with mode = \"pinem\"")),
    };
    p.validate()?;
    let grid = p.coupling.grid()?;
    ensure_out_dir(out)?;
    let mut outputs = Vec::new();
    let mut manifest = RunManifest::new("pinem", doc.to_json_value(), Some(&bytes));

    if p.coupling.is_scalar() {
        let g = grid[0];
        let cap = effective_sideband_cap(p.sideband_cap, p.sigma, g)?;
        let phases = match p.matched_order {
            1 => pinem::phases_reduced_one_photon(p.sigma, p.matching(), cap),
            _ => pinem::phases_reduced_two_photon(p.sigma, p.one_photon_mismatch_phase, cap),
        };
        let cfg = pinem::PinemConfig::new(g, phases).map_err(config_err)?;
        let spec = pinem::pinem_evolve(&cfg).map_err(runtime_err)?;
        let path = out.join("sidebands.csv");
        write_csv(
            &path,
            &["m", "probability"],
            spec.levels
                .iter()
                .map(|&(m, p)| vec![Field::Int(m as i64), Field::Float(p)]),
        )?;
        manifest.record(&path);
        outputs.push(path);
    } else {
        if p.matched_order != 1 {
            return Err(CliError::usage(
                "coupling scans are supported for the one-photon stimulated interaction",
            ));
        }
        let workers = resolve_workers(workers);
        let trace = parallel_p0_trace(p.sigma, p.matching(), &grid, workers)?;
        let trace_path = out.join("p0_trace.csv");
        write_csv(
            &trace_path,
            &["g", "p0"],
            grid.iter()
                .zip(trace.iter())
                .map(|(&g, &p0)| vec![Field::Float(g), Field::Float(p0)]),
        )?;
        let revivals = pinem::detect_revivals(&grid, &trace, p.revival_prominence);
        let revivals_path = out.join("revivals.json");
        fs::write(
            &revivals_path,
            serde_json::to_string_pretty(&json!({
                "prominence": p.revival_prominence,
                "revivals": revivals,
                "first_revival_fit": pinem::first_revival_estimate(p.sigma),
                "second_revival_fit": pinem::second_revival_estimate(p.sigma),
            }))
            .expect("serializes"),
        )?;
        manifest.record(&trace_path);
        manifest.record(&revivals_path);
        outputs.push(trace_path);
        outputs.push(revivals_path);
    }
    manifest.write(out)?;
    outputs.push(out.join("manifest.json"));
    Ok(outputs)
}

/// `twomode`: evolve the two-mode lattice, write the joint distribution and
/// twin statistics.
pub fn cmd_twomode(config_path: &Path, out: &Path) -> CliResult<Vec<PathBuf>> {
    let (text, bytes) = read_input(config_path)?;
    let doc = ConfigDoc::from_json(&text)?;
    let t = match &doc {
        ConfigDoc::TwoMode(t) => t,
        _ => return Err(CliError::usage("twomode expects a configuration with mode = \"two_mode\"")),
    };
    let cfg = t.to_config()?;
    ensure_out_dir(out)?;

    let phases = TwoModePhases::reduced(&cfg).map_err(config_err)?;
    let init = TwoModeWaveFunction::vacuum(cfg.truncation_n_max);
    let state = evolve_two_mode(&phases, cfg.coupling_g_qu, &init).map_err(runtime_err)?;

    let joint_path = out.join("joint.csv");
    write_csv(
        &joint_path,
        &["n1", "n2", "probability"],
        state.nodes().map(|(n1, n2, a)| {
            vec![
                Field::Int(n1 as i64),
                Field::Int(n2 as i64),
                Field::Float(a.norm_sqr()),
            ]
        }),
    )?;

    let stats = twin_statistics(&state);
    let mut body = json!({
        "marginal_mode1": stats.marginal_mode1.probabilities,
        "marginal_mode2": stats.marginal_mode2.probabilities,
        "mean_mode1": stats.marginal_mode1.mean_photons,
        "mean_mode2": stats.marginal_mode2.mean_photons,
        "diagonal": stats.diagonal,
        "diagonal_geometric_ratio": stats.geometric_ratio,
        "norm_drift": state.norm_drift(),
    });
    for kind in &t.fidelities {
        let reference = match kind.as_str() {
            "ghz" => ReferenceState::ghz(),
            "twin" => {
                let per_mode_mean = stats.marginal_mode1.mean_photons;
                let r = per_mode_mean.sqrt().asinh();
                ReferenceState::twin_beam(r, 0.0, cfg.truncation_n_max)
            }
            other => return Err(CliError::usage(format!("unknown fidelity kind {other:?}"))),
        };
        let value = fidelity_two_mode(&state, &reference).map_err(runtime_err)?;
        body[format!("{kind}_fidelity")] = json!(value);
    }
    let stats_path = out.join("statistics.json");
    fs::write(&stats_path, serde_json::to_string_pretty(&body).expect("serializes"))?;

    let mut manifest = RunManifest::new("twomode", doc.to_json_value(), Some(&bytes));
    manifest.record(&joint_path);
    manifest.record(&stats_path);
    manifest.write(out)?;
    Ok(vec![joint_path, stats_path, out.join("manifest.json")])
}
