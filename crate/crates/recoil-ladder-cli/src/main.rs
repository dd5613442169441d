use clap::{Parser, Subcommand};
use recoil_ladder_cli::commands;
use recoil_ladder_cli::config::EngineDoc;
use std::path::PathBuf;
use std::process::ExitCode;

/// Quantum evolution of a free electron coupled to one or two cavity modes,
/// with electron recoil.
#[derive(Parser)]
#[command(name = "recoil-ladder", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the phase-matching width (recoil parameter) and level count.
    Sigma {
        /// Electron kinetic energy in keV.
        #[arg(long)]
        ekin_kev: f64,
        /// Photon energy in eV.
        #[arg(long)]
        eph_ev: f64,
        /// Interaction length in um.
        #[arg(long)]
        length_um: f64,
    },
    /// Evolve one single-mode scenario and write spectrum + statistics.
    Evolve {
        /// JSON configuration (mode = "physical" or "reduced").
        #[arg(long)]
        config: PathBuf,
        /// Evolution backend.
        #[arg(long, value_enum, default_value = "exact")]
        engine: EngineArg,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a 1-D or 2-D parameter sweep.
    Sweep {
        /// JSON sweep specification.
        #[arg(long)]
        spec: PathBuf,
        /// Worker threads (default: RECOIL_LADDER_THREADS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Stimulated (classical-field) interaction: sidebands or revival scan.
    Pinem {
        /// JSON configuration (mode = "pinem").
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for coupling scans.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-mode quantized dynamics (twin beam / GHZ).
    Twomode {
        /// JSON configuration (mode = "two_mode").
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum EngineArg {
    Exact,
    Ode,
    Sinc,
}

impl From<EngineArg> for EngineDoc {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Exact => EngineDoc::Exact,
            EngineArg::Ode => EngineDoc::Ode,
            EngineArg::Sinc => EngineDoc::Sinc,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sigma {
            ekin_kev,
            eph_ev,
            length_um,
        } => commands::cmd_sigma(ekin_kev, eph_ev, length_um).map(|line| println!("{line}")),
        Command::Evolve {
            config,
            engine,
            out,
        } => commands::cmd_evolve(&config, engine.into(), &out).map(report_outputs),
        Command::Sweep { spec, workers, out } => {
            commands::cmd_sweep(&spec, workers, &out).map(report_outputs)
        }
        Command::Pinem {
            config,
            workers,
            out,
        } => commands::cmd_pinem(&config, workers, &out).map(report_outputs),
        Command::Twomode { config, out } => commands::cmd_twomode(&config, &out).map(report_outputs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn report_outputs(paths: Vec<PathBuf>) {
    for path in paths {
        println!("wrote {}", path.display());
    }
}
