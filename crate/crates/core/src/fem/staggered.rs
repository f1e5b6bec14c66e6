//! Single-pass staggered scheme: displacement solve at frozen phase field,
//! then one phase-field update at frozen displacement.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::driving::{self, DriveModel, DriveSource, DrivingForceSpec, PointState};
use crate::error::{Error, Result};
use crate::evolution::{step_phase_field, EvolutionParams, NodalDrive, PhaseFieldOps};
use crate::fem::assembly::{Assembler, Material, Model};
use crate::fem::equilibrium::{reaction, solve_equilibrium_into, NewtonOptions, SolveReport};
use crate::fem::mesh::{Geometry, Mesh};
use crate::fem::system::SparseSystem;
use crate::finite::FiniteSplit;
use crate::linear::LinearElasticParams;

/// Dofs prescribed to `factor · ū`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletBc {
    pub dofs: Vec<usize>,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySchedule {
    pub dirichlet: Vec<DirichletBc>,
    /// Displacement increment per step, mm.
    pub du: f64,
    /// Dofs whose summed reaction is reported as the load.
    pub load_dofs: Vec<usize>,
    /// Opposite support in the same direction, for the balance check.
    pub support_dofs: Vec<usize>,
    /// Sign turning the summed load-dof reaction into the reported force.
    pub load_sign: f64,
    /// Phase-field Dirichlet nodes and values.
    pub z_fixed: Vec<(usize, f64)>,
}

impl BoundarySchedule {
    pub fn constrained_dofs(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.dirichlet.iter().flat_map(|b| b.dofs.iter().cloned()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Prescribed values at load level `ubar`; later entries win on overlap.
    pub fn prescribed(&self, ubar: f64) -> Vec<(usize, f64)> {
        let mut map = std::collections::BTreeMap::new();
        for b in &self.dirichlet {
            for &d in &b.dofs {
                map.insert(d, b.factor * ubar);
            }
        }
        map.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub u_mm: f64,
    pub force: f64,
    /// `|F_load + F_support| / max(|F_load|, |F_support|)`.
    pub balance: f64,
    pub max_z: f64,
    pub iterations: usize,
    pub seconds: f64,
    pub converged: bool,
    pub failure: Option<String>,
}

pub struct Simulation {
    pub mesh: Mesh,
    pub geo: Geometry,
    pub model: Model,
    pub drive: DrivingForceSpec,
    pub evolution: EvolutionParams,
    pub schedule: BoundarySchedule,
    pub newton: NewtonOptions,
    pub ops: PhaseFieldOps,
    sys: SparseSystem,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub step: usize,
    pub ubar: f64,
}

impl Simulation {
    pub fn new(
        mesh: Mesh,
        model: Model,
        drive: DrivingForceSpec,
        evolution: EvolutionParams,
        schedule: BoundarySchedule,
        newton: NewtonOptions,
    ) -> Result<Self> {
        drive.validate()?;
        evolution.validate()?;
        let geo = Geometry::new(&mesh)?;
        let ops = PhaseFieldOps::new(&mesh, &geo)?;
        let dim = mesh.dim();
        let sys = SparseSystem::new(&mesh, dim, &schedule.constrained_dofs())?;
        let mut z = vec![0.0; mesh.n_nodes()];
        for &(i, v) in &schedule.z_fixed {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRangeZ(v));
            }
            z[i] = v;
        }
        let u = vec![0.0; mesh.n_nodes() * dim];
        Ok(Self { mesh, geo, model, drive, evolution, schedule, newton, ops, sys, u, z, step: 0, ubar: 0.0 })
    }

    /// Displacement solve at the current load and phase field, without
    /// advancing anything. Returns the report and the internal force.
    pub fn equilibrate(&mut self) -> Result<(SolveReport, Vec<f64>)> {
        let mut asm = Assembler::new(&self.mesh, &self.geo, self.model)?;
        let prescribed = self.schedule.prescribed(self.ubar);
        let mut r = vec![0.0; self.u.len()];
        let rep =
            solve_equilibrium_into(&mut asm, &mut self.sys, &prescribed, &mut self.u, &self.z, &self.newton, &mut r)?;
        Ok((rep, r))
    }

    /// Nodal drive from the converged displacement.
    pub fn nodal_drive(&self) -> Result<NodalDrive> {
        let asm = Assembler::new(&self.mesh, &self.geo, self.model)?;
        let states = asm.qp_states(&self.u, &self.z)?;
        let mut fixed = vec![0.0; states.len()];
        let mut history = vec![0.0; states.len()];
        let (lc, gc) = (self.drive.lc, self.drive.gc);
        for (k, s) in states.iter().enumerate() {
            // Failure criteria act on the stress of the intact material.
            let ps = PointState { eps: s.eps, sigma: s.effective_sigma, z: s.z, stretches: s.stretches };
            let src = match self.model.material {
                Material::Linear { params, .. } => driving::drive_source(&ps, &self.drive, &params),
                Material::Finite { split, .. } => {
                    if self.drive.model.is_variational() {
                        match split {
                            FiniteSplit::InvariantSplit => DriveSource::Degradable(lc / gc * s.tensile_energy),
                            FiniteSplit::StretchSplit => DriveSource::Fixed(lc / gc * s.energy_release),
                        }
                    } else {
                        DriveSource::Fixed(driving::ad_hoc(&ps, &self.drive))
                    }
                }
            };
            match src {
                DriveSource::Degradable(h) => history[k] = h,
                DriveSource::Fixed(y) => fixed[k] = y,
            }
        }
        Ok(NodalDrive {
            fixed: self.ops.project(&self.mesh, &self.geo, &fixed),
            history: self.ops.project(&self.mesh, &self.geo, &history),
        })
    }

    /// One load increment. A failed displacement solve leaves `z` untouched
    /// and returns a record with `converged = false`.
    pub fn advance(&mut self) -> Result<StepRecord> {
        let start = Instant::now();
        self.step += 1;
        self.ubar += self.schedule.du;
        let (rep, r) = self.equilibrate()?;
        let load = reaction(&r, &self.schedule.load_dofs);
        let force = self.schedule.load_sign * load;
        let support = reaction(&r, &self.schedule.support_dofs);
        let scale = load.abs().max(support.abs());
        let balance = if scale > 0.0 { (load + support).abs() / scale } else { 0.0 };
        if rep.converged {
            let drive = self.nodal_drive()?;
            let frozen: Vec<usize> = self.schedule.z_fixed.iter().map(|&(i, _)| i).collect();
            step_phase_field(&self.ops, &mut self.z, &drive, &self.evolution, &frozen)?;
        }
        Ok(StepRecord {
            step: self.step,
            u_mm: self.ubar,
            force,
            balance,
            max_z: self.z.iter().cloned().fold(0.0, f64::max),
            iterations: rep.iterations,
            seconds: start.elapsed().as_secs_f64(),
            converged: rep.converged,
            failure: rep.failure,
        })
    }

    /// Stored elastic plus crack energy `∫Ψ dV + G_c Γ`.
    pub fn total_energy(&self) -> Result<f64> {
        let asm = Assembler::new(&self.mesh, &self.geo, self.model)?;
        Ok(asm.elastic_energy(&self.u, &self.z)? + self.drive.gc * self.ops.crack_surface(&self.z, self.drive.lc))
    }
}

/// Linear parameters used by small-strain drives; `None` at finite strain.
pub fn linear_params(model: &Model) -> Option<LinearElasticParams> {
    match model.material {
        Material::Linear { params, .. } => Some(params),
        Material::Finite { .. } => None,
    }
}

/// Whether the drive needs quantities only available for a given material.
pub fn check_compatibility(model: &Model, drive: &DriveModel) -> Result<()> {
    if let (Material::Finite { .. }, DriveModel::SpectralSplit | DriveModel::LambdaMuSplit | DriveModel::KgSplit) =
        (model.material, drive)
    {
        return Err(Error::InvalidParameter(format!(
            "drive `{}` is a small-strain energy split; use `griffith` with a finite-strain split",
            drive.name()
        )));
    }
    Ok(())
}
