use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use phasefield_core::scenario::output::{read_curve, read_vtk};
use phasefield_core::scenario::post::{element_field_vtk, f_max, kink_angle, KinkWindow};
use phasefield_core::scenario::run::{CURVE_FILE, FINAL_VTK, MANIFEST_FILE};
use phasefield_core::scenario::{parse_config, run_scenario, run_sweep, RunStatus, ScenarioConfig, ScenarioKind};
use phasefield_core::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "pfrac", version, about = "Phase-field fracture scenarios")]
struct Cli {
    /// Log level filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        config: PathBuf,
        /// Output directory; defaults to `output.dir` or `runs/<scenario>`.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a template across values of one config key.
    Sweep {
        template: PathBuf,
        /// Dotted key, e.g. `evolution.lc_mm`.
        #[arg(long)]
        axis: String,
        #[arg(long, num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a configuration, printing the resolved form.
    Validate { config: PathBuf },
    /// Evaluate a finished run directory.
    Postprocess {
        what: Quantity,
        run_dir: PathBuf,
        /// Inner radius of the kink window, mm (default 5% of the plate width).
        #[arg(long)]
        r_min: Option<f64>,
        /// Outer radius of the kink window, mm (default 25% of the plate width).
        #[arg(long)]
        r_max: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Kink,
    Fmax,
}

/// Outcome classes mapped to exit codes.
enum Failure {
    Validation(anyhow::Error),
    Solver(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(
                Error::Validation(_)
                | Error::Parse(_)
                | Error::InvalidParameter(_)
                | Error::NonPositiveParameter { .. },
            ) => Failure::Validation(e),
            Some(Error::InvalidSlit(_)) => Failure::Validation(e),
            _ => Failure::Other(e),
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    parse_config(path).with_context(|| format!("configuration {}", path.display())).map_err(Failure::from)
}

fn default_out(cfg: &ScenarioConfig) -> PathBuf {
    cfg.output.dir.as_ref().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs").join(cfg.scenario.name()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("{}", serde_json::to_string_pretty(&cfg).map_err(|e| Failure::Other(e.into()))?);
            Ok(())
        }
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| default_out(&cfg));
            let outcome = run_scenario(&cfg, Some(&dir)).map_err(|e| Failure::from(anyhow::Error::from(e)))?;
            let s = &outcome.summary;
            println!("run directory: {}", dir.display());
            println!("steps: {}  F_max: {:.6e} at u = {:.6e} mm", s.steps, s.f_max, s.u_at_f_max);
            if let Some(n) = &s.nucleation {
                println!(
                    "first z > 0.9 at step {} (node {} at {:.4}, {:.4}, {:.4})",
                    n.step, n.node, n.position[0], n.position[1], n.position[2]
                );
            }
            if let Some(e) = s.profile_l2_error {
                println!("profile L2 error: {e:.4e}");
            }
            match &s.status {
                RunStatus::SolverFailure { reason } => Err(Failure::Solver(reason.clone())),
                _ => Ok(()),
            }
        }
        Command::Sweep { template, axis, values, out } => {
            let cfg = load(&template)?;
            let dir = out.unwrap_or_else(|| default_out(&cfg).with_extension("sweep"));
            let (rows, _) =
                run_sweep(&cfg, &axis, &values, Some(&dir)).map_err(|e| Failure::from(anyhow::Error::from(e)))?;
            println!("{axis},F_max_N,ratio,status");
            for r in &rows {
                println!("{},{},{},{}", r.value, r.f_max, r.ratio, r.status);
            }
            if let Some(r) = rows.iter().find(|r| r.status == "solver_failure") {
                return Err(Failure::Solver(format!("member {axis}={} failed", r.value)));
            }
            Ok(())
        }
        Command::Postprocess { what, run_dir, r_min, r_max } => {
            match what {
                Quantity::Fmax => {
                    let rows =
                        read_curve(&run_dir.join(CURVE_FILE)).context("reading curve").map_err(Failure::Other)?;
                    match f_max(&rows) {
                        Some((f, u)) => println!("F_max,{f}\nu_at_F_max_mm,{u}"),
                        None => println!("F_max,\nu_at_F_max_mm,"),
                    }
                }
                Quantity::Kink => {
                    let cfg = load(&run_dir.join(MANIFEST_FILE))?;
                    if !matches!(cfg.scenario, ScenarioKind::ModeI | ScenarioKind::ModeII) {
                        return Err(Failure::Validation(anyhow::anyhow!(
                            "kink angle needs a notched plate run, got {}",
                            cfg.scenario.name()
                        )));
                    }
                    let g = &cfg.geometry;
                    let width = g.width_mm.unwrap_or(100.0);
                    let tip = [g.slit_length_mm.unwrap_or(0.5 * width), 0.5 * g.height_mm.unwrap_or(100.0), 0.0];
                    let field =
                        read_vtk(&run_dir.join(FINAL_VTK)).context("reading final field").map_err(Failure::Other)?;
                    let (c, zc) = element_field_vtk(&field);
                    let w = KinkWindow {
                        r_min: r_min.unwrap_or(0.05 * width),
                        r_max: r_max.unwrap_or(0.25 * width),
                        threshold: 0.9,
                    };
                    let k = kink_angle(&c, &zc, tip, &w).map_err(|e| Failure::Other(e.into()))?;
                    println!("kink_angle_deg,{}\ndeviation_deg,{}\npoints,{}", k.angle_deg, k.deviation_deg, k.points);
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Solver(reason)) => {
            eprintln!("solver failure: {reason} (partial outputs kept)");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
