//! Meshes, boundary schedules and simulations for the built-in scenarios.

use crate::error::{Error, Result};
use crate::fem::mesh::{Mesh, SlitSpec};
use crate::fem::staggered::{check_compatibility, BoundarySchedule, DirichletBc, Simulation};
use crate::scenario::config::{GeometrySpec, ScenarioConfig, ScenarioKind};

pub fn build_mesh(cfg: &ScenarioConfig) -> Result<Mesh> {
    match cfg.geometry_spec() {
        GeometrySpec::Plate { width, height, nx, ny, slit_length } => Mesh::structured_plate(
            nx,
            ny,
            width,
            height,
            Some(SlitSpec { y: 0.5 * height, x_start: 0.0, x_end: slit_length }),
        ),
        GeometrySpec::Disc { diameter, rings, arc, .. } => Mesh::disc(diameter, rings, arc),
        GeometrySpec::Block { lx, ly, lz, nx, ny, nz, patch } => Mesh::block(nx, ny, nz, lx, ly, lz, patch),
        GeometrySpec::Bar { half_length, elements } => Mesh::line(elements, -half_length, half_length),
    }
}

fn dofs(nodes: &[usize], dim: usize, comp: usize) -> Vec<usize> {
    nodes.iter().map(|&n| n * dim + comp).collect()
}

pub fn build_schedule(cfg: &ScenarioConfig, mesh: &Mesh) -> Result<BoundarySchedule> {
    let du = cfg.loading.du_mm;
    let bc = |dofs: Vec<usize>, factor: f64| DirichletBc { dofs, factor };
    let s = |name: &str| mesh.node_set(name).map(|v| v.to_vec());
    Ok(match cfg.scenario {
        ScenarioKind::ModeI | ScenarioKind::ModeII => {
            let (bottom, top) = (s("bottom")?, s("top")?);
            let (load_comp, fixed_comp) = if cfg.scenario == ScenarioKind::ModeI { (1, 0) } else { (0, 1) };
            BoundarySchedule {
                dirichlet: vec![
                    bc(dofs(&bottom, 2, 0), 0.0),
                    bc(dofs(&bottom, 2, 1), 0.0),
                    bc(dofs(&top, 2, fixed_comp), 0.0),
                    bc(dofs(&top, 2, load_comp), 1.0),
                ],
                du,
                load_dofs: dofs(&top, 2, load_comp),
                support_dofs: dofs(&bottom, 2, load_comp),
                load_sign: 1.0,
                z_fixed: Vec::new(),
            }
        }
        ScenarioKind::Brazilian => {
            let (top, bottom) = (s("top_arc")?, s("bottom_arc")?);
            let centers = [s("top_center")?, s("bottom_center")?].concat();
            BoundarySchedule {
                dirichlet: vec![
                    bc(dofs(&centers, 2, 0), 0.0),
                    bc(dofs(&top, 2, 1), -1.0),
                    bc(dofs(&bottom, 2, 1), 1.0),
                ],
                du,
                load_dofs: dofs(&top, 2, 1),
                support_dofs: dofs(&bottom, 2, 1),
                load_sign: -1.0,
                z_fixed: Vec::new(),
            }
        }
        ScenarioKind::Conchoidal => {
            let (bottom, patch) = (s("bottom")?, s("top_patch")?);
            BoundarySchedule {
                dirichlet: vec![
                    bc(dofs(&bottom, 3, 0), 0.0),
                    bc(dofs(&bottom, 3, 1), 0.0),
                    bc(dofs(&bottom, 3, 2), 0.0),
                    bc(dofs(&patch, 3, 2), 1.0),
                ],
                du,
                load_dofs: dofs(&patch, 3, 2),
                support_dofs: dofs(&bottom, 3, 2),
                load_sign: 1.0,
                z_fixed: bottom.iter().map(|&n| (n, 0.0)).collect(),
            }
        }
        ScenarioKind::Bar1d => {
            return Err(Error::InvalidParameter("bar_1d has no displacement problem".into()));
        }
    })
}

/// Staggered simulation for a 2D/3D scenario from a validated config.
pub fn build_simulation(cfg: &ScenarioConfig) -> Result<Simulation> {
    cfg.validate()?;
    let mesh = build_mesh(cfg)?;
    let schedule = build_schedule(cfg, &mesh)?;
    let model = cfg.material_model()?.ok_or_else(|| Error::InvalidParameter("material block required".into()))?;
    let drive = cfg.drive_spec()?;
    check_compatibility(&model, &drive.model)?;
    let mut sim = Simulation::new(mesh, model, drive, cfg.evolution_params()?, schedule, cfg.solver)?;
    if let GeometrySpec::Disc { seed_crack, .. } = cfg.geometry_spec() {
        if seed_crack > 0.0 {
            let half_h = 0.5 * sim.mesh.h;
            for (i, p) in sim.mesh.nodes.iter().enumerate() {
                if p[0].abs() <= half_h && p[1].abs() <= 0.5 * seed_crack {
                    sim.z[i] = 1.0;
                }
            }
        }
    }
    Ok(sim)
}
