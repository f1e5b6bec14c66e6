//! Executes a scenario and writes its outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolution::{profile_l2_error, step_phase_field, EvolutionParams, NodalDrive, PhaseFieldOps};
use crate::fem::mesh::{Geometry, Mesh};
use crate::fem::staggered::StepRecord;
use crate::scenario::build::{build_mesh, build_simulation};
use crate::scenario::config::{ScenarioConfig, ScenarioKind};
use crate::scenario::output::{write_json, write_vtk, CurveWriter};
use crate::scenario::post::{nucleation_node, Nucleation};

pub const CURVE_FILE: &str = "curve.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FINAL_VTK: &str = "field_final.vtk";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    /// Ran the configured number of steps.
    Completed,
    /// Stopped after the force dropped below the failure ratio.
    Failed,
    /// Stopped at the first crack nucleation.
    Nucleated,
    /// Displacement solve broke down; outputs hold the steps before it.
    SolverFailure { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: ScenarioKind,
    #[serde(flatten)]
    pub status: RunStatus,
    pub steps: usize,
    pub f_max: f64,
    pub u_at_f_max: f64,
    pub nucleation: Option<Nucleation>,
    /// Every nodal `z` was nondecreasing from step to step.
    pub z_monotone: bool,
    pub z_bounded: bool,
    /// Largest reaction imbalance over converged steps.
    pub max_balance: f64,
    /// `bar_1d`: relative L2 error against the exponential profile.
    pub profile_l2_error: Option<f64>,
    pub wall_seconds: f64,
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub records: Vec<StepRecord>,
    pub mesh: Mesh,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
}

struct Sink {
    dir: Option<PathBuf>,
    curve: Option<CurveWriter>,
    vtk_every: usize,
}

impl Sink {
    fn new(dir: Option<&Path>, cfg: &ScenarioConfig) -> Result<Self> {
        let Some(dir) = dir else {
            return Ok(Self { dir: None, curve: None, vtk_every: 0 });
        };
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join(MANIFEST_FILE), cfg)?;
        let curve = CurveWriter::create(&dir.join(CURVE_FILE))?;
        Ok(Self { dir: Some(dir.to_path_buf()), curve: Some(curve), vtk_every: cfg.output.vtk_every })
    }

    fn step(&mut self, r: &StepRecord, mesh: &Mesh, u: &[f64], z: &[f64]) -> Result<()> {
        if let Some(c) = self.curve.as_mut() {
            c.push(r)?;
        }
        if let Some(dir) = &self.dir {
            if self.vtk_every > 0 && r.step.is_multiple_of(self.vtk_every) {
                write_vtk(&dir.join(format!("field_{:06}.vtk", r.step)), mesh, u, z, &format!("step {}", r.step))?;
            }
        }
        Ok(())
    }

    fn finish(&self, summary: &RunSummary, mesh: &Mesh, u: &[f64], z: &[f64]) -> Result<()> {
        if let Some(dir) = &self.dir {
            write_vtk(&dir.join(FINAL_VTK), mesh, u, z, "final state")?;
            write_json(&dir.join(SUMMARY_FILE), summary)?;
        }
        Ok(())
    }
}

/// Run a validated configuration. With `out_dir`, the manifest is written
/// first, the curve is streamed step by step, and the final field and the
/// summary are written at the end, also after a solver failure.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let cfg = cfg.resolved()?;
    if cfg.scenario == ScenarioKind::Bar1d {
        return run_bar(&cfg, out_dir);
    }
    let start = Instant::now();
    let mut sim = build_simulation(&cfg)?;
    let mut sink = Sink::new(out_dir, &cfg)?;
    let mut records = Vec::new();
    let mut status = RunStatus::Completed;
    let (mut f_max, mut u_at) = (0.0f64, 0.0);
    let mut nucleation = None;
    let (mut monotone, mut bounded) = (true, true);
    let mut max_balance: f64 = 0.0;
    let mut z_prev = sim.z.clone();
    for _ in 0..cfg.loading.steps {
        let rec = sim.advance()?;
        if !rec.converged {
            let reason = rec.failure.clone().unwrap_or_else(|| "displacement solve failed".into());
            log::error!("step {}: {reason}", rec.step);
            status = RunStatus::SolverFailure { reason };
            break;
        }
        monotone &= sim.z.iter().zip(&z_prev).all(|(a, b)| a >= b);
        bounded &= sim.z.iter().all(|v| (0.0..=1.0).contains(v));
        z_prev.copy_from_slice(&sim.z);
        max_balance = max_balance.max(rec.balance);
        if rec.force > f_max {
            f_max = rec.force;
            u_at = rec.u_mm;
        }
        if nucleation.is_none() {
            if let Some(node) = nucleation_node(&sim.z, 0.9) {
                nucleation = Some(Nucleation { step: rec.step, u_mm: rec.u_mm, node, position: sim.mesh.nodes[node] });
            }
        }
        sink.step(&rec, &sim.mesh, &sim.u, &sim.z)?;
        log::info!(
            "step {} u={:.6e} F={:.6e} max_z={:.4} iters={}",
            rec.step,
            rec.u_mm,
            rec.force,
            rec.max_z,
            rec.iterations
        );
        let failed = cfg.loading.stop_after_failure
            && f_max > 0.0
            && rec.max_z > 0.9
            && rec.force < cfg.loading.failure_ratio * f_max;
        records.push(rec);
        if failed {
            status = RunStatus::Failed;
            break;
        }
        if cfg.loading.stop_after_nucleation && nucleation.is_some() {
            status = RunStatus::Nucleated;
            break;
        }
    }
    let summary = RunSummary {
        scenario: cfg.scenario,
        status,
        steps: records.len(),
        f_max,
        u_at_f_max: u_at,
        nucleation,
        z_monotone: monotone,
        z_bounded: bounded,
        max_balance,
        profile_l2_error: None,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    sink.finish(&summary, &sim.mesh, &sim.u, &sim.z)?;
    Ok(RunOutcome { summary, records, mesh: sim.mesh, u: sim.u, z: sim.z })
}

/// Phase field alone on a bar with `z = 1` held at the center; relaxes to
/// the stationary profile.
fn run_bar(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let start = Instant::now();
    let mesh = build_mesh(cfg)?;
    let geo = Geometry::new(&mesh)?;
    let ops = PhaseFieldOps::new(&mesh, &geo)?;
    let params: EvolutionParams = cfg.evolution_params()?;
    let center = mesh.node_set("center")?[0];
    let mut z = vec![0.0; mesh.n_nodes()];
    z[center] = 1.0;
    let drive = NodalDrive::zeros(mesh.n_nodes());
    let mut sink = Sink::new(out_dir, cfg)?;
    let mut records = Vec::new();
    let mut monotone = true;
    let u = vec![0.0; mesh.n_nodes()];
    for step in 1..=cfg.loading.steps {
        let t = Instant::now();
        let prev = z.clone();
        let info = step_phase_field(&ops, &mut z, &drive, &params, &[center])?;
        monotone &= z.iter().zip(&prev).all(|(a, b)| a >= b);
        let rec = StepRecord {
            step,
            u_mm: 0.0,
            force: 0.0,
            balance: 0.0,
            max_z: z.iter().cloned().fold(0.0, f64::max),
            iterations: info.substeps,
            seconds: t.elapsed().as_secs_f64(),
            converged: true,
            failure: None,
        };
        sink.step(&rec, &mesh, &u, &z)?;
        records.push(rec);
        if info.max_increment < 1e-12 {
            break;
        }
    }
    let x: Vec<f64> = mesh.nodes.iter().map(|p| p[0]).collect();
    let err = profile_l2_error(&x, &z, mesh.nodes[center][0], params.lc);
    let summary = RunSummary {
        scenario: cfg.scenario,
        status: RunStatus::Completed,
        steps: records.len(),
        f_max: 0.0,
        u_at_f_max: 0.0,
        nucleation: None,
        z_monotone: monotone,
        z_bounded: z.iter().all(|v| (0.0..=1.0).contains(v)),
        max_balance: 0.0,
        profile_l2_error: Some(err),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    sink.finish(&summary, &mesh, &u, &z)?;
    Ok(RunOutcome { summary, records, mesh, u, z })
}
