//! Fixed sparsity pattern over free degrees of freedom and linear solvers.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu, SymbolicLlt, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::{Col, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::mesh::Mesh;

pub const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolverKind {
    /// Sparse Cholesky, LU if the matrix is not numerically SPD.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
}

/// CSC pattern of the free-free block of the tangent, with a per-element
/// map from local matrix entries to value slots.
pub struct SparseSystem {
    pub ndof: usize,
    pub n_free: usize,
    /// Free index of each dof, `NONE` when constrained.
    pub free_index: Vec<usize>,
    pub constrained: Vec<bool>,
    symbolic: SymbolicSparseColMat<usize>,
    /// `n_elements × nd²`, row-major local entries → value slot or `NONE`.
    pub scatter: Vec<usize>,
    pub nd: usize,
    llt: Option<SymbolicLlt<usize>>,
    lu: Option<SymbolicLu<usize>>,
    diag_slot: Vec<usize>,
}

impl SparseSystem {
    pub fn new(mesh: &Mesh, dofs_per_node: usize, constrained_dofs: &[usize]) -> Result<SparseSystem> {
        let ndof = mesh.n_nodes() * dofs_per_node;
        let mut constrained = vec![false; ndof];
        for &d in constrained_dofs {
            if d >= ndof {
                return Err(Error::DimensionMismatch { expected: ndof, got: d });
            }
            constrained[d] = true;
        }
        let mut free_index = vec![NONE; ndof];
        let mut n_free = 0;
        for d in 0..ndof {
            if !constrained[d] {
                free_index[d] = n_free;
                n_free += 1;
            }
        }
        let npe = mesh.npe();
        let nd = npe * dofs_per_node;
        let local_dofs = |e: usize| -> Vec<usize> {
            let el = mesh.element(e);
            let mut v = Vec::with_capacity(nd);
            for &n in el {
                for c in 0..dofs_per_node {
                    v.push(free_index[n * dofs_per_node + c]);
                }
            }
            v
        };
        // Column adjacency via node adjacency.
        let nn = mesh.n_nodes();
        let mut node_adj: Vec<Vec<usize>> = vec![Vec::new(); nn];
        for e in 0..mesh.n_elements() {
            let el = mesh.element(e);
            for &a in el {
                node_adj[a].extend_from_slice(el);
            }
        }
        for adj in node_adj.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
        }
        let mut col_ptr = vec![0usize; n_free + 1];
        let mut row_idx = Vec::new();
        for n in 0..nn {
            for c in 0..dofs_per_node {
                let col = free_index[n * dofs_per_node + c];
                if col == NONE {
                    continue;
                }
                for &m in &node_adj[n] {
                    for k in 0..dofs_per_node {
                        let row = free_index[m * dofs_per_node + k];
                        if row != NONE {
                            row_idx.push(row);
                        }
                    }
                }
                col_ptr[col + 1] = row_idx.len();
            }
        }
        // Columns are produced in increasing free index order because free
        // indices follow node order; rows within a column are sorted since
        // node_adj is sorted and dofs of a node are consecutive.
        let nnz = row_idx.len();
        let find = |row: usize, col: usize| -> usize {
            let (s, t) = (col_ptr[col], col_ptr[col + 1]);
            s + row_idx[s..t].binary_search(&row).expect("entry in pattern")
        };
        let mut scatter = vec![NONE; mesh.n_elements() * nd * nd];
        for e in 0..mesh.n_elements() {
            let ld = local_dofs(e);
            for a in 0..nd {
                if ld[a] == NONE {
                    continue;
                }
                for b in 0..nd {
                    if ld[b] == NONE {
                        continue;
                    }
                    scatter[e * nd * nd + a * nd + b] = find(ld[a], ld[b]);
                }
            }
        }
        let diag_slot = (0..n_free).map(|i| find(i, i)).collect();
        let symbolic = SymbolicSparseColMat::new_checked(n_free, n_free, col_ptr, None, row_idx);
        debug_assert_eq!(symbolic.row_idx().len(), nnz);
        Ok(SparseSystem {
            ndof,
            n_free,
            free_index,
            constrained,
            symbolic,
            scatter,
            nd,
            llt: None,
            lu: None,
            diag_slot,
        })
    }

    pub fn nnz(&self) -> usize {
        self.symbolic.row_idx().len()
    }

    /// Solve `K x = b` for the free block with values in pattern order.
    pub fn solve(&mut self, values: &[f64], b: &[f64], kind: LinearSolverKind) -> Result<Vec<f64>> {
        if b.len() != self.n_free || values.len() != self.nnz() {
            return Err(Error::DimensionMismatch { expected: self.n_free, got: b.len() });
        }
        if self.n_free == 0 {
            return Ok(Vec::new());
        }
        match kind {
            LinearSolverKind::Direct => self.solve_direct(values, b),
            LinearSolverKind::Cg => self.solve_cg(values, b, 1e-10, 20 * self.n_free.max(100)),
        }
    }

    fn solve_direct(&mut self, values: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let mat = SparseColMatRef::new(self.symbolic.as_ref(), values);
        let rhs = Col::from_fn(b.len(), |i| b[i]);
        if self.llt.is_none() {
            let sym = SymbolicLlt::try_new(self.symbolic.as_ref(), Side::Lower)
                .map_err(|e| Error::SingularTangent(format!("symbolic Cholesky: {e:?}")))?;
            self.llt = Some(sym);
        }
        let sym = self.llt.clone().unwrap();
        match Llt::try_new_with_symbolic(sym, mat, Side::Lower) {
            Ok(llt) => {
                let x = llt.solve(&rhs);
                Ok((0..b.len()).map(|i| x[i]).collect())
            }
            Err(_) => {
                log::debug!("Cholesky failed, falling back to LU");
                if self.lu.is_none() {
                    let sym = SymbolicLu::try_new(self.symbolic.as_ref())
                        .map_err(|e| Error::SingularTangent(format!("symbolic LU: {e:?}")))?;
                    self.lu = Some(sym);
                }
                let lu = Lu::try_new_with_symbolic(self.lu.clone().unwrap(), mat)
                    .map_err(|e| Error::SingularTangent(format!("LU: {e:?}")))?;
                let x = lu.solve(&rhs);
                let out: Vec<f64> = (0..b.len()).map(|i| x[i]).collect();
                if out.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SingularTangent("non-finite solution".into()));
                }
                Ok(out)
            }
        }
    }

    /// `y = K x` for the free block.
    pub fn matvec(&self, values: &[f64], x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let cp = self.symbolic.col_ptr();
        let ri = self.symbolic.row_idx();
        for c in 0..self.n_free {
            let xc = x[c];
            for k in cp[c]..cp[c + 1] {
                y[ri[k]] += values[k] * xc;
            }
        }
    }

    /// Jacobi-preconditioned conjugate gradients to `‖r‖ ≤ tol ‖b‖`.
    pub fn solve_cg(&self, values: &[f64], b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.n_free;
        let dinv: Vec<f64> =
            self.diag_slot.iter().map(|&s| if values[s] > 0.0 { 1.0 / values[s] } else { 1.0 }).collect();
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut zv: Vec<f64> = r.iter().zip(&dinv).map(|(a, d)| a * d).collect();
        let mut p = zv.clone();
        let mut q = vec![0.0; n];
        let mut rz: f64 = r.iter().zip(&zv).map(|(a, b)| a * b).sum();
        for _ in 0..max_iter {
            self.matvec(values, &p, &mut q);
            let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
            if !(pq > 0.0) {
                return Err(Error::SingularTangent("CG encountered non-positive curvature".into()));
            }
            let alpha = rz / pq;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if rn <= tol * bnorm {
                return Ok(x);
            }
            for i in 0..n {
                zv[i] = r[i] * dinv[i];
            }
            let rz_new: f64 = r.iter().zip(&zv).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = zv[i] + beta * p[i];
            }
        }
        Err(Error::SingularTangent(format!("CG did not converge in {max_iter} iterations")))
    }
}
