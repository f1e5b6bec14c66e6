//! Linear elasticity with tension/compression energy splits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{eig_sym_sorted, heaviside, macaulay, positive_part_derivative, Sign, SymTensor};

/// 6×6 tangent in engineering Voigt order `[xx, yy, zz, γxy, γyz, γxz]`.
pub type Voigt6 = [[f64; 6]; 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneMode {
    PlaneStress,
    PlaneStrain,
    Full3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearElasticParams {
    pub young: f64,
    pub poisson: f64,
    pub lambda: f64,
    pub mu: f64,
    pub bulk: f64,
    pub plane_mode: PlaneMode,
}

impl LinearElasticParams {
    pub fn new(young: f64, poisson: f64, plane_mode: PlaneMode) -> Result<Self> {
        if young <= 0.0 || !young.is_finite() {
            return Err(Error::NonPositiveParameter { name: "E", value: young });
        }
        if !(poisson > -1.0 && poisson < 0.5) {
            return Err(Error::InvalidParameter(format!("Poisson ratio {poisson} outside (-1, 0.5)")));
        }
        let mu = young / (2.0 * (1.0 + poisson));
        let lambda = match plane_mode {
            // In-plane Lamé constant; splits then act on the 2D strain tensor.
            PlaneMode::PlaneStress => young * poisson / (1.0 - poisson * poisson),
            _ => young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)),
        };
        Ok(Self { young, poisson, lambda, mu, bulk: lambda + 2.0 * mu / 3.0, plane_mode })
    }

    /// Out-of-plane strain implied by the plane mode for in-plane strains.
    pub fn out_of_plane_strain(&self, exx: f64, eyy: f64) -> f64 {
        match self.plane_mode {
            PlaneMode::PlaneStress => -self.poisson / (1.0 - self.poisson) * (exx + eyy),
            PlaneMode::PlaneStrain | PlaneMode::Full3d => 0.0,
        }
    }

    /// Embed an in-plane strain (engineering shear `gxy`) as a 3×3 tensor with
    /// `ε₃₃ = 0`. Under plane stress the reduced `lambda` makes
    /// `λ tr ε I + 2μ ε` the exact in-plane stress; its `zz` entry is then
    /// not a physical stress.
    pub fn embed_plane_strain(&self, exx: f64, eyy: f64, gxy: f64) -> SymTensor {
        SymTensor::new(exx, eyy, 0.0, 0.5 * gxy, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationParams {
    pub residual: f64,
}

impl Default for DegradationParams {
    fn default() -> Self {
        Self { residual: 1e-5 }
    }
}

impl DegradationParams {
    pub fn new(residual: f64) -> Result<Self> {
        if !(0.0..=1e-2).contains(&residual) {
            return Err(Error::InvalidParameter(format!("residual stiffness {residual} outside [0, 1e-2]")));
        }
        Ok(Self { residual })
    }
}

/// Quadratic degradation `g = (1−z)² + ε_res` and its derivative.
pub fn degradation(z: f64, p: &DegradationParams) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::OutOfRangeZ(z));
    }
    Ok(degradation_unchecked(z, p))
}

#[inline]
pub(crate) fn degradation_unchecked(z: f64, p: &DegradationParams) -> (f64, f64) {
    let s = 1.0 - z;
    (s * s + p.residual, -2.0 * s)
}

/// Undamaged energy `Ψ = λ/2 (tr ε)² + μ ε:ε` and stress `σ = λ tr ε I + 2μ ε`.
pub fn energy_and_stress(eps: &SymTensor, p: &LinearElasticParams) -> (f64, SymTensor) {
    let tr = eps.trace();
    let psi = 0.5 * p.lambda * tr * tr + p.mu * eps.ddot(eps);
    let sigma = SymTensor::identity() * (p.lambda * tr) + *eps * (2.0 * p.mu);
    (psi, sigma)
}

/// Tension/compression decompositions of the stored energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySplit {
    /// `Ψ± = ½ ε± : C : ε±` with the energy-norm projection of
    /// [`energy_norm_split`].
    Spectral,
    /// Bulk/shear split on `⟨tr ε⟩±` and the spectral parts of `dev ε`.
    VolDev,
    /// Lamé split on `⟨tr ε⟩±` and the spectral parts of `ε`.
    LambdaMu,
}

/// Split `ε = ε⁺ + ε⁻` where `ε⁺` is the positive semidefinite tensor closest
/// to `ε` in the energy norm. The parts are C-orthogonal, `ε⁺ : C : ε⁻ = 0`.
///
/// For isotropic C the minimizer is coaxial with `ε`, so the projection
/// reduces to a three-variable quadratic program over the principal values,
/// solved by active-set enumeration.
pub fn energy_norm_split(eps: &SymTensor, p: &LinearElasticParams) -> (SymTensor, SymTensor) {
    let dec = eig_sym_sorted(eps);
    let e = dec.values;
    let a = |i: usize, j: usize| p.lambda + if i == j { 2.0 * p.mu } else { 0.0 };
    let ae: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| a(i, j) * e[j]).sum());
    let emax = e.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let scale = emax * (p.lambda + 2.0 * p.mu);
    let mut best = ([0.0; 3], f64::INFINITY);
    for mask in 0u8..8 {
        let free: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let mut x = [0.0; 3];
        let n = free.len();
        if n > 0 {
            let mut m = [[0.0; 4]; 3];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    m[r][c] = a(i, j);
                }
                m[r][n] = ae[i];
            }
            for col in 0..n {
                let piv = m[col][col];
                for r in 0..n {
                    if r != col {
                        let f = m[r][col] / piv;
                        for c in col..=n {
                            m[r][c] -= f * m[col][c];
                        }
                    }
                }
            }
            for (r, &i) in free.iter().enumerate() {
                x[i] = m[r][n] / m[r][r];
            }
        }
        let mut violation = 0.0f64;
        for i in 0..3 {
            if mask & (1 << i) != 0 {
                violation = violation.max(-x[i] / emax);
            } else {
                let g: f64 = (0..3).map(|j| a(i, j) * (x[j] - e[j])).sum();
                violation = violation.max(-g / scale);
            }
        }
        if violation < best.1 {
            best = (x, violation);
        }
    }
    let x = best.0.map(|v| v.max(0.0));
    let mut plus = SymTensor::ZERO;
    for i in 0..3 {
        plus += SymTensor::outer(&dec.vectors[i]) * x[i];
    }
    (plus, *eps - plus)
}

/// Stress law used when assembling the displacement problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressSplit {
    /// The whole stress is degraded: `σ = g C:ε`.
    Isotropic,
    VolDev,
    LambdaMu,
}

/// `(Ψ₀⁺, Ψ₀⁻)` for the chosen split.
pub fn positive_negative_energy(eps: &SymTensor, method: EnergySplit, p: &LinearElasticParams) -> (f64, f64) {
    match method {
        EnergySplit::Spectral => {
            let (plus, minus) = energy_norm_split(eps, p);
            let energy = |e: &SymTensor| {
                let t = e.trace();
                0.5 * p.lambda * t * t + p.mu * e.ddot(e)
            };
            (energy(&plus), energy(&minus))
        }
        EnergySplit::VolDev => {
            let tr = eps.trace();
            let dev = eps.dev();
            let dec = eig_sym_sorted(&dev);
            let dplus = dec.reconstruct_with(|x| macaulay(x, Sign::Plus));
            let dminus = dev - dplus;
            let tp = macaulay(tr, Sign::Plus);
            let tm = macaulay(tr, Sign::Minus);
            (0.5 * p.bulk * tp * tp + p.mu * dplus.ddot(&dplus), 0.5 * p.bulk * tm * tm + p.mu * dminus.ddot(&dminus))
        }
        EnergySplit::LambdaMu => {
            let tr = eps.trace();
            let dec = eig_sym_sorted(eps);
            let plus = dec.reconstruct_with(|x| macaulay(x, Sign::Plus));
            let minus = *eps - plus;
            let tp = macaulay(tr, Sign::Plus);
            let tm = macaulay(tr, Sign::Minus);
            (0.5 * p.lambda * tp * tp + p.mu * plus.ddot(&plus), 0.5 * p.lambda * tm * tm + p.mu * minus.ddot(&minus))
        }
    }
}

/// `(σ₀⁺, σ₀⁻)` with `σ₀⁺ + σ₀⁻ = C:ε`.
pub fn split_stress(eps: &SymTensor, split: StressSplit, p: &LinearElasticParams) -> (SymTensor, SymTensor) {
    let tr = eps.trace();
    let id = SymTensor::identity();
    match split {
        StressSplit::Isotropic => (energy_and_stress(eps, p).1, SymTensor::ZERO),
        StressSplit::VolDev => {
            let dev = eps.dev();
            let dplus = eig_sym_sorted(&dev).reconstruct_with(|x| macaulay(x, Sign::Plus));
            let dminus = dev - dplus;
            (
                id * (p.bulk * macaulay(tr, Sign::Plus)) + dplus.dev() * (2.0 * p.mu),
                id * (p.bulk * macaulay(tr, Sign::Minus)) + dminus.dev() * (2.0 * p.mu),
            )
        }
        StressSplit::LambdaMu => {
            let plus = eig_sym_sorted(eps).reconstruct_with(|x| macaulay(x, Sign::Plus));
            let minus = *eps - plus;
            (
                id * (p.lambda * macaulay(tr, Sign::Plus)) + plus * (2.0 * p.mu),
                id * (p.lambda * macaulay(tr, Sign::Minus)) + minus * (2.0 * p.mu),
            )
        }
    }
}

/// Degraded stress `σ = g(z) σ₀⁺ + σ₀⁻`.
pub fn degraded_stress(
    eps: &SymTensor,
    z: f64,
    split: StressSplit,
    p: &LinearElasticParams,
    deg: &DegradationParams,
) -> Result<SymTensor> {
    let (g, _) = degradation(z, deg)?;
    let (plus, minus) = split_stress(eps, split, p);
    Ok(plus * g + minus)
}

/// Unit tensor for the engineering-Voigt strain component `l`.
pub fn voigt_unit_strain(l: usize) -> SymTensor {
    let mut t = SymTensor::ZERO;
    t.0[l] = if l < 3 { 1.0 } else { 0.5 };
    t
}

/// Tangent `∂σ/∂ε` of the degraded stress, engineering-Voigt columns.
pub fn degraded_tangent(eps: &SymTensor, g: f64, split: StressSplit, p: &LinearElasticParams) -> Voigt6 {
    let mut d = [[0.0; 6]; 6];
    let tr = eps.trace();
    let id = SymTensor::identity();
    match split {
        StressSplit::Isotropic => {
            for l in 0..6 {
                let de = voigt_unit_strain(l);
                let ds = (id * (p.lambda * de.trace()) + de * (2.0 * p.mu)) * g;
                for k in 0..6 {
                    d[k][l] = ds.0[k];
                }
            }
        }
        StressSplit::VolDev => {
            let dec = eig_sym_sorted(&eps.dev());
            let h = heaviside(tr);
            for l in 0..6 {
                let de = voigt_unit_strain(l);
                let dtr = de.trace();
                let da = de.dev();
                let dap = positive_part_derivative(&dec, &da);
                let dplus = id * (p.bulk * h * dtr) + dap.dev() * (2.0 * p.mu);
                let dminus = id * (p.bulk * (1.0 - h) * dtr) + (da - dap).dev() * (2.0 * p.mu);
                let ds = dplus * g + dminus;
                for k in 0..6 {
                    d[k][l] = ds.0[k];
                }
            }
        }
        StressSplit::LambdaMu => {
            let dec = eig_sym_sorted(eps);
            let h = heaviside(tr);
            for l in 0..6 {
                let de = voigt_unit_strain(l);
                let dtr = de.trace();
                let dep = positive_part_derivative(&dec, &de);
                let dplus = id * (p.lambda * h * dtr) + dep * (2.0 * p.mu);
                let dminus = id * (p.lambda * (1.0 - h) * dtr) + (de - dep) * (2.0 * p.mu);
                let ds = dplus * g + dminus;
                for k in 0..6 {
                    d[k][l] = ds.0[k];
                }
            }
        }
    }
    d
}

/// Critical stress of the homogeneous one-dimensional solution,
/// `σ_c = sqrt(E G_c / (3 l_c))`.
pub fn critical_stress(young: f64, gc: f64, lc: f64) -> Result<f64> {
    for (name, value) in [("E", young), ("G_c", gc), ("l_c", lc)] {
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    Ok((young * gc / (3.0 * lc)).sqrt())
}
