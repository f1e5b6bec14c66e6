//! Element kernels and global assembly of the displacement problem.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::mesh::{Geometry, Mesh};
use crate::fem::system::{SparseSystem, NONE};
use crate::finite::{self, FiniteSplit, HyperelasticParams};
use crate::linear::{
    degradation_unchecked, degraded_tangent, split_stress, DegradationParams, LinearElasticParams, PlaneMode,
    StressSplit,
};
use crate::tensor::{principal_stretches, SymTensor, Tensor2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Material {
    Linear { params: LinearElasticParams, split: StressSplit },
    Finite { params: HyperelasticParams, split: FiniteSplit },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub material: Material,
    pub degradation: DegradationParams,
}

impl Model {
    pub fn is_linear_in_u(&self) -> bool {
        matches!(self.material, Material::Linear { split: StressSplit::Isotropic, .. })
    }
}

/// Quadrature-point state after an equilibrium solve.
#[derive(Debug, Clone, Copy)]
pub struct QpState {
    /// Small strain, or Green-Lagrange strain at finite strain.
    pub eps: SymTensor,
    /// Degraded Cauchy stress.
    pub sigma: SymTensor,
    /// Cauchy stress of the intact material at the same strain.
    pub effective_sigma: SymTensor,
    pub z: f64,
    pub stretches: Option<[f64; 3]>,
    /// Finite strain: degraded tensile energy and `−∂Ψ/∂z`.
    pub tensile_energy: f64,
    pub energy_release: f64,
}

pub struct Assembler<'a> {
    pub mesh: &'a Mesh,
    pub geo: &'a Geometry,
    pub model: Model,
    fe: Vec<f64>,
    ke: Vec<f64>,
}

fn displacement_gradient(geo: &Geometry, el: &[usize], e: usize, q: usize, u: &[f64]) -> [[f64; 3]; 3] {
    let dim = geo.dim;
    let g = geo.grads(e, q);
    let mut h = [[0.0; 3]; 3];
    for (a, &n) in el.iter().enumerate() {
        for i in 0..dim {
            let ui = u[n * dim + i];
            for j in 0..dim {
                h[i][j] += ui * g[a * dim + j];
            }
        }
    }
    h
}

fn qp_phase(geo: &Geometry, el: &[usize], q: usize, z: &[f64]) -> f64 {
    let n = geo.shape_at(q);
    let v: f64 = el.iter().enumerate().map(|(a, &i)| n[a] * z[i]).sum();
    v.clamp(0.0, 1.0)
}

/// Strain-displacement rows for node gradient `g` (engineering Voigt).
fn b_rows(dim: usize, g: &[f64]) -> [[f64; 3]; 6] {
    let mut b = [[0.0; 3]; 6];
    if dim == 2 {
        b[0] = [g[0], 0.0, 0.0];
        b[1] = [0.0, g[1], 0.0];
        b[2] = [g[1], g[0], 0.0];
    } else {
        b[0] = [g[0], 0.0, 0.0];
        b[1] = [0.0, g[1], 0.0];
        b[2] = [0.0, 0.0, g[2]];
        b[3] = [g[1], g[0], 0.0];
        b[4] = [0.0, g[2], g[1]];
        b[5] = [g[2], 0.0, g[0]];
    }
    b
}

/// Linear-material strain from the displacement gradient.
fn small_strain(p: &LinearElasticParams, dim: usize, h: &[[f64; 3]; 3]) -> SymTensor {
    if dim == 2 {
        p.embed_plane_strain(h[0][0], h[1][1], h[0][1] + h[1][0])
    } else {
        SymTensor::new(
            h[0][0],
            h[1][1],
            h[2][2],
            0.5 * (h[0][1] + h[1][0]),
            0.5 * (h[1][2] + h[2][1]),
            0.5 * (h[0][2] + h[2][0]),
        )
    }
}

fn deformation_gradient(dim: usize, h: &[[f64; 3]; 3]) -> Tensor2 {
    let mut f = Tensor2::identity();
    for i in 0..dim {
        for j in 0..dim {
            f.0[i][j] += h[i][j];
        }
    }
    f
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a Mesh, geo: &'a Geometry, model: Model) -> Result<Self> {
        if mesh.dim() < 2 {
            return Err(Error::InvalidMesh("displacement problem needs a 2D or 3D mesh".into()));
        }
        // Element buffers are sized on first use.
        Ok(Self { mesh, geo, model, fe: Vec::new(), ke: Vec::new() })
    }

    pub fn ndof(&self) -> usize {
        self.mesh.n_nodes() * self.mesh.dim()
    }

    /// Element internal force and (optionally) tangent.
    fn element(&self, e: usize, u: &[f64], z: &[f64], fe: &mut [f64], ke: Option<&mut [f64]>) -> Result<()> {
        let geo = self.geo;
        let dim = geo.dim;
        let npe = geo.npe;
        let nd = npe * dim;
        let el = self.mesh.element(e);
        fe.iter_mut().for_each(|v| *v = 0.0);
        let mut ke = ke;
        if let Some(k) = ke.as_deref_mut() {
            k.iter_mut().for_each(|v| *v = 0.0);
        }
        for q in 0..geo.nqp {
            let h = displacement_gradient(geo, el, e, q, u);
            let zq = qp_phase(geo, el, q, z);
            let w = geo.w(e, q);
            let g = geo.grads(e, q);
            match self.model.material {
                Material::Linear { params, split } => {
                    let eps = small_strain(&params, dim, &h);
                    let (gz, _) = degradation_unchecked(zq, &self.model.degradation);
                    let (sp, sm) = split_stress(&eps, split, &params);
                    let sigma = sp * gz + sm;
                    let d6 = if ke.is_some() { Some(degraded_tangent(&eps, gz, split, &params)) } else { None };
                    // Reduce to the independent strain components.
                    let (s, d): ([f64; 6], [[f64; 6]; 6]) = if dim == 2 {
                        const IDX: [usize; 3] = [0, 1, 3];
                        let s = [sigma.0[0], sigma.0[1], sigma.0[3], 0.0, 0.0, 0.0];
                        let mut d = [[0.0; 6]; 6];
                        if let Some(d6) = d6 {
                            for (r, &i) in IDX.iter().enumerate() {
                                for (k, &j) in IDX.iter().enumerate() {
                                    d[r][k] = d6[i][j];
                                }
                            }
                        }
                        (s, d)
                    } else {
                        (sigma.0, d6.unwrap_or([[0.0; 6]; 6]))
                    };
                    let nr = if dim == 2 { 3 } else { 6 };
                    let mut bs: Vec<[[f64; 3]; 6]> = Vec::with_capacity(npe);
                    for a in 0..npe {
                        bs.push(b_rows(dim, &g[a * dim..(a + 1) * dim]));
                    }
                    for a in 0..npe {
                        for i in 0..dim {
                            let mut v = 0.0;
                            for r in 0..nr {
                                v += bs[a][r][i] * s[r];
                            }
                            fe[a * dim + i] += v * w;
                        }
                    }
                    if let Some(k) = ke.as_deref_mut() {
                        for a in 0..npe {
                            for i in 0..dim {
                                // db = D Bᵀ column for (a, i)
                                let mut db = [0.0; 6];
                                for r in 0..nr {
                                    let bri = bs[a][r][i];
                                    if bri == 0.0 {
                                        continue;
                                    }
                                    for c in 0..nr {
                                        db[c] += d[c][r] * bri;
                                    }
                                }
                                let row = a * dim + i;
                                for b in 0..npe {
                                    for kk in 0..dim {
                                        let mut v = 0.0;
                                        for c in 0..nr {
                                            v += bs[b][c][kk] * db[c];
                                        }
                                        k[(b * dim + kk) * nd + row] += v * w;
                                    }
                                }
                            }
                        }
                    }
                }
                Material::Finite { params, split } => {
                    let f = deformation_gradient(dim, &h);
                    let resp = finite::evaluate(&f, zq, split, &params, &self.model.degradation)?;
                    for a in 0..npe {
                        for i in 0..dim {
                            let mut v = 0.0;
                            for jj in 0..dim {
                                v += resp.piola.0[i][jj] * g[a * dim + jj];
                            }
                            fe[a * dim + i] += v * w;
                        }
                    }
                    if let Some(k) = ke.as_deref_mut() {
                        let t = finite::piola_tangent(&f, zq, split, &params, &self.model.degradation)?;
                        for a in 0..npe {
                            for i in 0..dim {
                                for b in 0..npe {
                                    for kk in 0..dim {
                                        let mut v = 0.0;
                                        for jj in 0..dim {
                                            for ll in 0..dim {
                                                v += t[3 * i + jj][3 * kk + ll] * g[a * dim + jj] * g[b * dim + ll];
                                            }
                                        }
                                        k[(a * dim + i) * nd + b * dim + kk] += v * w;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Internal force vector over all dofs and, if `values` is given, the
    /// free-free tangent in pattern order.
    pub fn assemble(
        &mut self,
        sys: &SparseSystem,
        u: &[f64],
        z: &[f64],
        residual: &mut [f64],
        values: Option<&mut [f64]>,
    ) -> Result<()> {
        let dim = self.mesh.dim();
        let npe = self.mesh.npe();
        let nd = npe * dim;
        if u.len() != self.ndof() || residual.len() != self.ndof() {
            return Err(Error::DimensionMismatch { expected: self.ndof(), got: u.len() });
        }
        if z.len() != self.mesh.n_nodes() {
            return Err(Error::DimensionMismatch { expected: self.mesh.n_nodes(), got: z.len() });
        }
        let want_k = values.is_some();
        let nel = self.mesh.n_elements();
        let mut fe = std::mem::take(&mut self.fe);
        let mut ke = std::mem::take(&mut self.ke);
        fe.resize(nel * nd, 0.0);
        if want_k {
            ke.resize(nel * nd * nd, 0.0);
        }
        let this = &*self;
        let res: Result<()> = if want_k {
            fe.par_chunks_mut(nd)
                .zip(ke.par_chunks_mut(nd * nd))
                .enumerate()
                .try_for_each(|(e, (f, k))| this.element(e, u, z, f, Some(k)))
        } else {
            fe.par_chunks_mut(nd).enumerate().try_for_each(|(e, f)| this.element(e, u, z, f, None))
        };
        self.fe = fe;
        self.ke = ke;
        res?;
        residual.iter_mut().for_each(|v| *v = 0.0);
        for e in 0..self.mesh.n_elements() {
            let el = self.mesh.element(e);
            for (a, &n) in el.iter().enumerate() {
                for i in 0..dim {
                    residual[n * dim + i] += self.fe[e * nd + a * dim + i];
                }
            }
        }
        if let Some(vals) = values {
            vals.iter_mut().for_each(|v| *v = 0.0);
            let base = nd * nd;
            for e in 0..self.mesh.n_elements() {
                let map = &sys.scatter[e * base..(e + 1) * base];
                let k = &self.ke[e * base..(e + 1) * base];
                for (slot, v) in map.iter().zip(k) {
                    if *slot != NONE {
                        vals[*slot] += *v;
                    }
                }
            }
        }
        Ok(())
    }

    /// Kinematic and stress state at every quadrature point, element-major.
    pub fn qp_states(&self, u: &[f64], z: &[f64]) -> Result<Vec<QpState>> {
        let geo = self.geo;
        let nqp = geo.nqp;
        let dim = geo.dim;
        (0..self.mesh.n_elements() * nqp)
            .into_par_iter()
            .map(|idx| {
                let (e, q) = (idx / nqp, idx % nqp);
                let el = self.mesh.element(e);
                let h = displacement_gradient(geo, el, e, q, u);
                let zq = qp_phase(geo, el, q, z);
                match self.model.material {
                    Material::Linear { params, split } => {
                        let eps = small_strain(&params, dim, &h);
                        let (gz, _) = degradation_unchecked(zq, &self.model.degradation);
                        let (sp, sm) = split_stress(&eps, split, &params);
                        let (mut sigma, mut effective_sigma) = (sp * gz + sm, sp + sm);
                        if params.plane_mode == PlaneMode::PlaneStress {
                            sigma.0[2] = 0.0;
                            effective_sigma.0[2] = 0.0;
                        }
                        Ok(QpState {
                            eps,
                            sigma,
                            effective_sigma,
                            z: zq,
                            stretches: None,
                            tensile_energy: 0.0,
                            energy_release: 0.0,
                        })
                    }
                    Material::Finite { params, split } => {
                        let f = deformation_gradient(dim, &h);
                        let resp = finite::evaluate(&f, zq, split, &params, &self.model.degradation)?;
                        let c = f.right_cauchy_green();
                        let eps = (c - SymTensor::identity()) * 0.5;
                        let intact = finite::evaluate(&f, 0.0, split, &params, &self.model.degradation)?;
                        Ok(QpState {
                            eps,
                            sigma: finite::cauchy_stress(&f, &resp.piola),
                            effective_sigma: finite::cauchy_stress(&f, &intact.piola),
                            z: zq,
                            stretches: Some(principal_stretches(&f)?.stretches),
                            tensile_energy: resp.tensile_energy,
                            energy_release: resp.energy_release,
                        })
                    }
                }
            })
            .collect()
    }

    /// Total stored elastic energy.
    pub fn elastic_energy(&self, u: &[f64], z: &[f64]) -> Result<f64> {
        let geo = self.geo;
        let nqp = geo.nqp;
        let dim = geo.dim;
        let mut total = 0.0;
        for e in 0..self.mesh.n_elements() {
            let el = self.mesh.element(e);
            for q in 0..nqp {
                let h = displacement_gradient(geo, el, e, q, u);
                let zq = qp_phase(geo, el, q, z);
                let psi = match self.model.material {
                    Material::Linear { params, split } => {
                        let eps = small_strain(&params, dim, &h);
                        let (gz, _) = degradation_unchecked(zq, &self.model.degradation);
                        split_energy(&eps, split, &params, gz)
                    }
                    Material::Finite { params, split } => {
                        let f = deformation_gradient(dim, &h);
                        finite::evaluate(&f, zq, split, &params, &self.model.degradation)?.energy
                    }
                };
                total += psi * geo.w(e, q);
            }
        }
        Ok(total)
    }
}

/// Degraded energy consistent with the assembled stress.
pub fn split_energy(eps: &SymTensor, split: StressSplit, p: &LinearElasticParams, g: f64) -> f64 {
    use crate::linear::{energy_and_stress, positive_negative_energy, EnergySplit};
    match split {
        StressSplit::Isotropic => g * energy_and_stress(eps, p).0,
        StressSplit::VolDev => {
            let (a, b) = positive_negative_energy(eps, EnergySplit::VolDev, p);
            g * a + b
        }
        StressSplit::LambdaMu => {
            let (a, b) = positive_negative_energy(eps, EnergySplit::LambdaMu, p);
            g * a + b
        }
    }
}
