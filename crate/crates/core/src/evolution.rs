//! Normalized Allen-Cahn evolution of the phase field and the 1D analytics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::mesh::{Geometry, Mesh};

/// Second-order crack surface density `γ = z²/(2l_c) + l_c/2 |∇z|²`.
pub fn surface_density(z: f64, grad_z: &[f64], lc: f64) -> f64 {
    let g2: f64 = grad_z.iter().map(|g| g * g).sum();
    z * z / (2.0 * lc) + 0.5 * lc * g2
}

/// `(M, τ)` from the time-step rule `τ = c Δt`, with `M = l_c/(τ G_c)`.
pub fn mobility_rule(dt: f64, c_rule: f64, lc: f64, gc: f64) -> Result<(f64, f64)> {
    for (name, v) in [("dt", dt), ("c_rule", c_rule), ("l_c", lc), ("G_c", gc)] {
        if !(v > 0.0) {
            return Err(Error::NonPositiveParameter { name, value: v });
        }
    }
    let tau = c_rule * dt;
    Ok((lc / (tau * gc), tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub lc: f64,
    pub gc: f64,
    /// Retardation time τ, s.
    pub tau: f64,
    /// Load-step size Δt, s.
    pub dt: f64,
}

impl EvolutionParams {
    /// `τ = c_rule Δt`.
    pub fn from_rule(lc: f64, gc: f64, dt: f64, c_rule: f64) -> Result<Self> {
        let (_, tau) = mobility_rule(dt, c_rule, lc, gc)?;
        Ok(Self { lc, gc, tau, dt })
    }

    /// `τ = l_c/(M G_c)`.
    pub fn from_mobility(lc: f64, gc: f64, dt: f64, mobility: f64) -> Result<Self> {
        if !(mobility > 0.0) {
            return Err(Error::NonPositiveParameter { name: "M", value: mobility });
        }
        let p = Self { lc, gc, tau: lc / (mobility * gc), dt };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("l_c", self.lc), ("G_c", self.gc), ("tau", self.tau), ("dt", self.dt)] {
            if !(v > 0.0) {
                return Err(Error::NonPositiveParameter { name, value: v });
            }
        }
        Ok(())
    }

    pub fn mobility(&self) -> f64 {
        self.lc / (self.tau * self.gc)
    }
}

/// Lumped mass and stiffness (Laplacian) of the phase-field problem.
#[derive(Debug, Clone)]
pub struct PhaseFieldOps {
    pub lumped_mass: Vec<f64>,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
    /// `Σ_j |K_ij|` per row.
    abs_row_sum: Vec<f64>,
    /// Smallest element size, for the diffusion stability bound.
    pub h_min: f64,
    pub dim: usize,
}

impl PhaseFieldOps {
    pub fn new(mesh: &Mesh, geo: &Geometry) -> Result<Self> {
        let nn = mesh.n_nodes();
        let npe = geo.npe;
        let dim = geo.dim;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nn];
        for e in 0..mesh.n_elements() {
            let el = mesh.element(e);
            for &a in el {
                adj[a].extend_from_slice(el);
            }
        }
        let mut row_ptr = vec![0usize; nn + 1];
        let mut col = Vec::new();
        for (i, a) in adj.iter_mut().enumerate() {
            a.sort_unstable();
            a.dedup();
            col.extend_from_slice(a);
            row_ptr[i + 1] = col.len();
        }
        let mut val = vec![0.0; col.len()];
        let mut lumped_mass = vec![0.0; nn];
        let mut h_min = f64::INFINITY;
        for e in 0..mesh.n_elements() {
            let el = mesh.element(e);
            let mut vol = 0.0;
            for q in 0..geo.nqp {
                let w = geo.w(e, q);
                vol += w;
                let n = geo.shape_at(q);
                let g = geo.grads(e, q);
                for a in 0..npe {
                    lumped_mass[el[a]] += n[a] * w;
                    let ia = el[a];
                    for b in 0..npe {
                        let ib = el[b];
                        let mut k = 0.0;
                        for d in 0..dim {
                            k += g[a * dim + d] * g[b * dim + d];
                        }
                        let s = row_ptr[ia] + col[row_ptr[ia]..row_ptr[ia + 1]].binary_search(&ib).unwrap();
                        val[s] += k * w;
                    }
                }
            }
            // Size of the element measured in its own dimension.
            h_min = h_min.min(match dim {
                1 => vol,
                2 => (2.0 * vol).sqrt(),
                _ => vol.cbrt(),
            });
        }
        if lumped_mass.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::InvalidMesh("node with zero lumped mass (unused node)".into()));
        }
        let abs_row_sum = (0..nn).map(|i| val[row_ptr[i]..row_ptr[i + 1]].iter().map(|v| v.abs()).sum()).collect();
        Ok(Self { lumped_mass, row_ptr, col, val, abs_row_sum, h_min, dim })
    }

    pub fn n_nodes(&self) -> usize {
        self.lumped_mass.len()
    }

    /// `y = K z`.
    pub fn laplacian(&self, z: &[f64], y: &mut [f64]) {
        for i in 0..self.n_nodes() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * z[self.col[k]];
            }
            y[i] = s;
        }
    }

    /// Nodal crack resistance `r_i = −(M z + l_c² K z)_i`.
    pub fn resistance_term(&self, z: &[f64], lc: f64) -> Result<Vec<f64>> {
        if z.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch { expected: self.n_nodes(), got: z.len() });
        }
        let mut kz = vec![0.0; z.len()];
        self.laplacian(z, &mut kz);
        Ok((0..z.len()).map(|i| -(self.lumped_mass[i] * z[i] + lc * lc * kz[i])).collect())
    }

    /// Crack surface `Γ = ∫ γ dV` with lumped mass.
    pub fn crack_surface(&self, z: &[f64], lc: f64) -> f64 {
        let mut kz = vec![0.0; z.len()];
        self.laplacian(z, &mut kz);
        let mut s = 0.0;
        for i in 0..z.len() {
            s += self.lumped_mass[i] * z[i] * z[i] / (2.0 * lc) + 0.5 * lc * z[i] * kz[i];
        }
        s
    }

    /// Lumped L2 projection of quadrature values to nodes.
    pub fn project(&self, mesh: &Mesh, geo: &Geometry, qp_values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_nodes()];
        for e in 0..mesh.n_elements() {
            let el = mesh.element(e);
            for q in 0..geo.nqp {
                let v = qp_values[e * geo.nqp + q] * geo.w(e, q);
                let n = geo.shape_at(q);
                for (a, &i) in el.iter().enumerate() {
                    out[i] += n[a] * v;
                }
            }
        }
        for (o, m) in out.iter_mut().zip(&self.lumped_mass) {
            *o /= m;
        }
        out
    }

    /// Sub-step size for the explicit update: the diffusion bound
    /// `0.4 τ h²/(2 dim l_c²)` and the nodal contraction bound.
    pub fn stable_substep(&self, params: &EvolutionParams, history: &[f64]) -> f64 {
        let l2 = params.lc * params.lc;
        let diffusion = 0.4 * params.tau * self.h_min * self.h_min / (2.0 * self.dim as f64 * l2);
        let mut rate: f64 = 1.0;
        for i in 0..self.n_nodes() {
            let h = history.get(i).copied().unwrap_or(0.0).max(0.0);
            rate = rate.max(1.0 + 2.0 * h + l2 * self.abs_row_sum[i] / self.lumped_mass[i]);
        }
        diffusion.min(params.tau / rate)
    }
}

/// Nodal driving force, already divided by the lumped mass.
#[derive(Debug, Clone, Default)]
pub struct NodalDrive {
    /// Drive frozen over the step.
    pub fixed: Vec<f64>,
    /// `H` of the degradable part `2(1 − z) H`.
    pub history: Vec<f64>,
}

impl NodalDrive {
    pub fn zeros(n: usize) -> Self {
        Self { fixed: vec![0.0; n], history: vec![0.0; n] }
    }
}

/// Outcome of one phase-field step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub substeps: usize,
    pub max_increment: f64,
}

/// Advance `z` by `Δt` with the clamped explicit update
/// `z ← clamp(z + (Δt_s/τ)⟨Ȳ_i + r_i⟩₊/m_i, z, 1)`, sub-cycled for stability.
/// Nodes in `frozen` keep their value.
pub fn step_phase_field(
    ops: &PhaseFieldOps,
    z: &mut [f64],
    drive: &NodalDrive,
    params: &EvolutionParams,
    frozen: &[usize],
) -> Result<StepInfo> {
    let n = ops.n_nodes();
    if z.len() != n || drive.fixed.len() != n || drive.history.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    if let Some(&v) = z.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::OutOfRangeZ(v));
    }
    let mut is_frozen = vec![false; n];
    for &i in frozen {
        is_frozen[i] = true;
    }
    let dts = ops.stable_substep(params, &drive.history);
    let substeps = (params.dt / dts).ceil().max(1.0) as usize;
    let ratio = params.dt / substeps as f64 / params.tau;
    let l2 = params.lc * params.lc;
    let z0 = z.to_vec();
    let mut kz = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..substeps {
        ops.laplacian(z, &mut kz);
        for i in 0..n {
            if is_frozen[i] {
                next[i] = z[i];
                continue;
            }
            let m = ops.lumped_mass[i];
            let y = drive.fixed[i] + 2.0 * (1.0 - z[i]) * drive.history[i];
            let rate = (y - z[i] - l2 * kz[i] / m).max(0.0);
            next[i] = (z[i] + ratio * rate).clamp(z[i], 1.0);
        }
        z.copy_from_slice(&next);
    }
    let max_increment = z.iter().zip(&z0).map(|(a, b)| a - b).fold(0.0, f64::max);
    Ok(StepInfo { substeps, max_increment })
}

/// `z(x) = exp(−|x|/l_c)`.
pub fn analytic_profile(x: f64, lc: f64) -> f64 {
    (-x.abs() / lc).exp()
}

/// Diffusive crack volume of a straight crack of length `crack_length`:
/// `crack_length · ∫_{−L}^{L} exp(−|x|/l_c) dx` by composite Simpson.
pub fn crack_volume(lc: f64, half_width: f64, crack_length: f64) -> f64 {
    let n = 2000;
    let h = half_width / n as f64;
    let mut s = analytic_profile(0.0, lc) + analytic_profile(half_width, lc);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * analytic_profile(i as f64 * h, lc);
    }
    crack_length * 2.0 * s * h / 3.0
}

/// Relative L2 error of a nodal 1D profile against `exp(−|x − x0|/l_c)`.
pub fn profile_l2_error(x: &[f64], z: &[f64], x0: f64, lc: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..x.len().saturating_sub(1) {
        // Trapezoid on each segment.
        let h = x[k + 1] - x[k];
        let e0 = z[k] - analytic_profile(x[k] - x0, lc);
        let e1 = z[k + 1] - analytic_profile(x[k + 1] - x0, lc);
        let a0 = analytic_profile(x[k] - x0, lc);
        let a1 = analytic_profile(x[k + 1] - x0, lc);
        num += 0.5 * h * (e0 * e0 + e1 * e1);
        den += 0.5 * h * (a0 * a0 + a1 * a1);
    }
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_ops(n: usize, half: f64) -> (Mesh, PhaseFieldOps) {
        let m = Mesh::line(n, -half, half).unwrap();
        let g = Geometry::new(&m).unwrap();
        let ops = PhaseFieldOps::new(&m, &g).unwrap();
        (m, ops)
    }

    #[test]
    fn surface_density_examples() {
        assert_eq!(surface_density(0.0, &[0.0], 1.0), 0.0);
        assert_eq!(surface_density(1.0, &[0.0], 2.0), 0.25);
        // ∫γ of the analytic profile over the real line is 1.
        let lc = 1.5;
        let n = 200_000;
        let half = 40.0 * lc;
        let h = 2.0 * half / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let x = -half + (i as f64 + 0.5) * h;
            let z = analytic_profile(x, lc);
            s += surface_density(z, &[-x.signum() * z / lc], lc) * h;
        }
        assert!((s - 1.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn mobility_rule_examples() {
        let (m, tau) = mobility_rule(1e-3, 1.0, 1.0, 0.075).unwrap();
        assert_eq!(tau, 1e-3);
        let p = EvolutionParams::from_mobility(1.0, 0.075, 1e-3, m).unwrap();
        assert!((p.tau - tau).abs() < 1e-10 * tau);
        let (_, t10) = mobility_rule(1.0, 10.0, 1.0, 1.0).unwrap();
        let (_, t01) = mobility_rule(1.0, 0.1, 1.0, 1.0).unwrap();
        assert!((t10 / t01 - 100.0).abs() < 1e-12);
        assert!(mobility_rule(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn resistance_examples() {
        let m = Mesh::structured_plate(4, 4, 1.0, 1.0, None).unwrap();
        let g = Geometry::new(&m).unwrap();
        let ops = PhaseFieldOps::new(&m, &g).unwrap();
        let r0 = ops.resistance_term(&vec![0.0; m.n_nodes()], 1.0).unwrap();
        assert!(r0.iter().all(|&v| v == 0.0));
        let r1 = ops.resistance_term(&vec![1.0; m.n_nodes()], 1.0).unwrap();
        for (r, mass) in r1.iter().zip(&ops.lumped_mass) {
            assert!((r + mass).abs() < 1e-12);
        }
        assert!((r1.iter().sum::<f64>() + 1.0).abs() < 1e-12);
        assert!(ops.resistance_term(&[0.0; 3], 1.0).is_err());
    }

    #[test]
    fn no_spontaneous_damage_and_cap() {
        let (m, ops) = line_ops(20, 5.0);
        let p = EvolutionParams::from_rule(1.0, 1.0, 1.0, 1.0).unwrap();
        let mut z = vec![0.0; m.n_nodes()];
        step_phase_field(&ops, &mut z, &NodalDrive::zeros(m.n_nodes()), &p, &[]).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        let mut d = NodalDrive::zeros(m.n_nodes());
        d.fixed.iter_mut().for_each(|v| *v = 50.0);
        for _ in 0..5 {
            step_phase_field(&ops, &mut z, &d, &p, &[]).unwrap();
        }
        assert!(z.iter().all(|&v| v == 1.0));
        let mut z = vec![0.0; m.n_nodes()];
        d.fixed.iter_mut().for_each(|v| *v = 0.5);
        let p = EvolutionParams::from_rule(1.0, 1.0, 0.01, 1.0).unwrap();
        step_phase_field(&ops, &mut z, &d, &p, &[]).unwrap();
        let z0 = z[0];
        assert!(z0 > 0.0 && z.iter().all(|&v| (v - z0).abs() < 1e-12));
    }

    fn steady_profile(n: usize, lc: f64, half: f64) -> (Vec<f64>, Vec<f64>) {
        let (m, ops) = line_ops(n, half);
        let p = EvolutionParams::from_rule(lc, 1.0, 1.0, 1.0).unwrap();
        let mut z = vec![0.0; m.n_nodes()];
        let c = m.node_set("center").unwrap()[0];
        z[c] = 1.0;
        let d = NodalDrive::zeros(m.n_nodes());
        for _ in 0..40 {
            let info = step_phase_field(&ops, &mut z, &d, &p, &[c]).unwrap();
            if info.max_increment < 1e-12 {
                break;
            }
        }
        (m.nodes.iter().map(|x| x[0]).collect(), z)
    }

    #[test]
    fn steady_profile_matches_exponential() {
        let lc = 1.0;
        let (x, z) = steady_profile(200, lc, 10.0);
        let e1 = profile_l2_error(&x, &z, 0.0, lc);
        assert!(e1 < 0.05, "{e1}");
        let (x2, z2) = steady_profile(400, lc, 10.0);
        let e2 = profile_l2_error(&x2, &z2, 0.0, lc);
        assert!(e2 < e1, "{e2} !< {e1}");
        assert!(z.windows(2).all(|w| w[0] >= 0.0 && w[1] <= 1.0));
    }

    #[test]
    fn crack_volume_table() {
        let v1 = crack_volume(1.0, 1.0, 100.0);
        assert!((v1 - 126.4).abs() < 0.1, "{v1}");
        let expected = [0.0, 25.0, 35.0, 40.0, 44.0];
        let mut prev = 0.0;
        for (k, e) in expected.iter().enumerate() {
            let v = crack_volume((k + 1) as f64, 1.0, 100.0);
            assert!(v > prev);
            prev = v;
            let inc = 100.0 * (v / v1 - 1.0);
            assert!((inc - e).abs() < 1.0, "l_c={} {inc}", k + 1);
        }
        assert_eq!(analytic_profile(0.0, 3.0), 1.0);
        assert!(analytic_profile(1e3, 1.0) < 1e-300);
    }
}
