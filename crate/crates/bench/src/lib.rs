//! Fixtures shared by the kernel benchmarks.

use phasefield_core::fem::{Geometry, Material, Mesh, Model, SlitSpec};
use phasefield_core::linear::{DegradationParams, LinearElasticParams, PlaneMode, StressSplit};

/// Notched 100 mm plate on an `n × n` grid with the desk-run material.
pub fn notched_plate(n: usize) -> (Mesh, Geometry) {
    let slit = SlitSpec { y: 50.0, x_start: 0.0, x_end: 50.0 };
    let mesh = Mesh::structured_plate(n, n, 100.0, 100.0, Some(slit)).expect("valid plate");
    let geo = Geometry::new(&mesh).expect("valid geometry");
    (mesh, geo)
}

pub fn plate_model(split: StressSplit) -> Model {
    Model {
        material: Material::Linear {
            params: LinearElasticParams::new(50_400.0, 0.2, PlaneMode::PlaneStress).expect("valid moduli"),
            split,
        },
        degradation: DegradationParams::default(),
    }
}

/// Smooth displacement field `u = (0, a y)` plus a small shear.
pub fn stretch_field(mesh: &Mesh, a: f64) -> Vec<f64> {
    mesh.nodes.iter().flat_map(|p| [0.1 * a * p[1], a * p[1]]).collect()
}
