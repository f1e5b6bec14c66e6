//! Finite element discretisation of the displacement problem.

pub mod assembly;
pub mod equilibrium;
pub mod mesh;
pub mod system;

pub use assembly::{Assembler, Material, Model, QpState};
pub use equilibrium::{reaction, solve_equilibrium, solve_equilibrium_into, NewtonOptions, SolveReport};
pub use mesh::{ElementKind, Geometry, Mesh, Slit, SlitSpec};
pub use system::{LinearSolverKind, SparseSystem};
pub mod staggered;

pub use staggered::{BoundarySchedule, DirichletBc, Simulation, StepRecord};
