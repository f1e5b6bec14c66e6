//! Newton solver for the displacement problem at fixed phase field.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::assembly::Assembler;
use crate::fem::system::{LinearSolverKind, SparseSystem, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Convergence on `‖r_free‖ ≤ rtol · reference`.
    pub rtol: f64,
    /// Looser tolerance accepted when the iteration budget runs out.
    pub accept_rtol: f64,
    /// Absolute floor on the residual norm, N.
    pub atol: f64,
    pub linear_solver: LinearSolverKind,
    pub line_search: bool,
}

impl NewtonOptions {
    fn line_search_steps(&self) -> usize {
        if self.line_search {
            20
        } else {
            1
        }
    }
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 30,
            rtol: 1e-10,
            accept_rtol: 1e-8,
            atol: 1e-12,
            linear_solver: LinearSolverKind::Direct,
            line_search: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Final free residual norm relative to the reference force.
    pub residual: f64,
    pub seconds: f64,
    pub failure: Option<String>,
}

fn free_norm(sys: &SparseSystem, r: &[f64]) -> f64 {
    r.iter().zip(&sys.free_index).filter(|(_, &f)| f != NONE).map(|(v, _)| v * v).sum::<f64>().sqrt()
}

fn constrained_norm(sys: &SparseSystem, r: &[f64]) -> f64 {
    r.iter().zip(&sys.constrained).filter(|(_, &c)| c).map(|(v, _)| v * v).sum::<f64>().sqrt()
}

/// Solve `r(u) = 0` on the free dofs with the constrained dofs set to
/// `prescribed`. Every constrained dof of `sys` must appear in `prescribed`.
///
/// Solver breakdown (singular tangent, inverted elements, stagnation) is
/// reported through `SolveReport::failure`; `u` then holds the last iterate.
pub fn solve_equilibrium(
    asm: &mut Assembler,
    sys: &mut SparseSystem,
    prescribed: &[(usize, f64)],
    u: &mut [f64],
    z: &[f64],
    opts: &NewtonOptions,
) -> Result<SolveReport> {
    let mut r = vec![0.0; u.len()];
    solve_equilibrium_into(asm, sys, prescribed, u, z, opts, &mut r)
}

/// [`solve_equilibrium`] that also leaves the internal force at the final
/// iterate in `r`.
pub fn solve_equilibrium_into(
    asm: &mut Assembler,
    sys: &mut SparseSystem,
    prescribed: &[(usize, f64)],
    u: &mut [f64],
    z: &[f64],
    opts: &NewtonOptions,
    r: &mut [f64],
) -> Result<SolveReport> {
    let start = Instant::now();
    let ndof = sys.ndof;
    if u.len() != ndof {
        return Err(Error::DimensionMismatch { expected: ndof, got: u.len() });
    }
    let mut covered = 0;
    for &(d, v) in prescribed {
        if d >= ndof || !sys.constrained[d] {
            return Err(Error::InvalidParameter(format!("dof {d} is prescribed but not constrained")));
        }
        u[d] = v;
        covered += 1;
    }
    let n_con = sys.constrained.iter().filter(|&&c| c).count();
    if covered < n_con {
        return Err(Error::InvalidParameter(format!("{n_con} constrained dofs but only {covered} prescribed values")));
    }

    if r.len() != ndof {
        return Err(Error::DimensionMismatch { expected: ndof, got: r.len() });
    }
    let mut values = vec![0.0; sys.nnz()];
    let mut trial = vec![0.0; ndof];
    let mut r_trial = vec![0.0; ndof];
    // The first tangent comes with the initial residual.
    asm.assemble(sys, u, z, r, Some(&mut values))?;
    let mut fresh_tangent = true;
    let mut norm = free_norm(sys, r);
    let mut reference = norm.max(constrained_norm(sys, r));
    let report = |converged, iterations, norm: f64, reference: f64, failure| SolveReport {
        converged,
        iterations,
        residual: if reference > 0.0 { norm / reference } else { norm },
        seconds: start.elapsed().as_secs_f64(),
        failure,
    };
    let done = |norm: f64, reference: f64, tol: f64| norm <= (tol * reference).max(opts.atol);
    if done(norm, reference, opts.rtol) {
        return Ok(report(true, 0, norm, reference, None));
    }

    for it in 1..=opts.max_iterations {
        if !fresh_tangent {
            asm.assemble(sys, u, z, r, Some(&mut values))?;
        }
        fresh_tangent = false;
        let rhs: Vec<f64> = (0..ndof).filter(|&d| sys.free_index[d] != NONE).map(|d| -r[d]).collect();
        let du = match sys.solve(&values, &rhs, opts.linear_solver) {
            Ok(x) => x,
            Err(e) => return Ok(report(false, it, norm, reference, Some(e.to_string()))),
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        // Steps that fail to lower the residual may still lower the stored
        // energy, which is the merit function for kinked split laws.
        let mut energy: Option<f64> = None;
        for _ in 0..opts.line_search_steps() {
            trial.copy_from_slice(u);
            for d in 0..ndof {
                let f = sys.free_index[d];
                if f != NONE {
                    trial[d] += alpha * du[f];
                }
            }
            match asm.assemble(sys, &trial, z, &mut r_trial, None) {
                Ok(()) => {
                    let n = free_norm(sys, &r_trial);
                    if n.is_finite() && (!opts.line_search || n < norm || n <= (opts.rtol * reference).max(opts.atol)) {
                        accepted = true;
                        norm = n;
                        break;
                    }
                    if n.is_finite() {
                        let e0 = match energy {
                            Some(e) => e,
                            None => *energy.insert(asm.elastic_energy(u, z)?),
                        };
                        let e1 = asm.elastic_energy(&trial, z)?;
                        if e1 < e0 - 1e-14 * e0.abs() {
                            accepted = true;
                            norm = n;
                            break;
                        }
                    }
                }
                Err(Error::NonPositiveJacobian(_)) if opts.line_search => {}
                Err(e) => return Ok(report(false, it, norm, reference, Some(e.to_string()))),
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Ok(report(false, it, norm, reference, Some("line search failed to reduce the residual".into())));
        }
        u.copy_from_slice(&trial);
        r.copy_from_slice(&r_trial);
        reference = reference.max(constrained_norm(sys, r));
        log::trace!("newton iteration {it}: |r| = {norm:e} (ref {reference:e}, alpha {alpha})");
        if done(norm, reference, opts.rtol) {
            return Ok(report(true, it, norm, reference, None));
        }
    }
    if done(norm, reference, opts.accept_rtol) {
        log::warn!("Newton accepted at loose tolerance: {:e}", norm / reference);
        return Ok(report(true, opts.max_iterations, norm, reference, None));
    }
    Ok(report(
        false,
        opts.max_iterations,
        norm,
        reference,
        Some(Error::NewtonDiverged { iterations: opts.max_iterations, residual: norm }.to_string()),
    ))
}

/// Sum of the internal force over `dofs` (the reaction on those dofs).
pub fn reaction(r: &[f64], dofs: &[usize]) -> f64 {
    dofs.iter().map(|&d| r[d]).sum()
}
