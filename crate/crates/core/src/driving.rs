//! Effective crack-driving forces, variational and failure-criterion based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{energy_and_stress, positive_negative_energy, EnergySplit, LinearElasticParams};
use crate::tensor::{eig_sym_sorted, macaulay, Sign, SymTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrescaForm {
    /// `⟨(σ_I − σ_III)/σ_c − 1⟩₊`
    Principal,
    /// `⟨τ_I/τ_c − 1⟩₊` with `τ_I = (σ_I − σ_III)/2`
    ShearPrincipal,
    /// `⟨τ_I/τ_c − 1⟩₊` with `τ_I = sqrt(3/8 dev σ : dev σ)`
    ShearDeviatoric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DriveModel {
    Griffith,
    SpectralSplit,
    LambdaMuSplit,
    #[serde(rename = "KG_split")]
    KgSplit,
    Rankine {
        sigma_c: f64,
    },
    Tresca {
        threshold: f64,
        form: TrescaForm,
    },
    CompressiveRankine {
        sigma_c: f64,
    },
    MohrCoulomb {
        r_t: f64,
        r_c: f64,
    },
    Beltrami {
        eps_c: f64,
    },
    BeltramiStretch {
        lambda_c: f64,
    },
}

impl DriveModel {
    pub fn is_variational(&self) -> bool {
        matches!(
            self,
            DriveModel::Griffith | DriveModel::SpectralSplit | DriveModel::LambdaMuSplit | DriveModel::KgSplit
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            DriveModel::Griffith => "griffith",
            DriveModel::SpectralSplit => "spectral_split",
            DriveModel::LambdaMuSplit => "lambda_mu_split",
            DriveModel::KgSplit => "KG_split",
            DriveModel::Rankine { .. } => "rankine",
            DriveModel::Tresca { .. } => "tresca",
            DriveModel::CompressiveRankine { .. } => "compressive_rankine",
            DriveModel::MohrCoulomb { .. } => "mohr_coulomb",
            DriveModel::Beltrami { .. } => "beltrami",
            DriveModel::BeltramiStretch { .. } => "beltrami_stretch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivingForceSpec {
    pub model: DriveModel,
    pub lc: f64,
    pub gc: f64,
}

impl DrivingForceSpec {
    pub fn new(model: DriveModel, lc: f64, gc: f64) -> Result<Self> {
        let spec = Self { model, lc, gc };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut checks: Vec<(&'static str, f64)> = vec![("l_c", self.lc), ("G_c", self.gc)];
        match self.model {
            DriveModel::Rankine { sigma_c } | DriveModel::CompressiveRankine { sigma_c } => {
                checks.push(("sigma_c", sigma_c))
            }
            DriveModel::Tresca { threshold, .. } => checks.push(("tresca threshold", threshold)),
            DriveModel::MohrCoulomb { r_t, r_c } => {
                checks.push(("R_t", r_t));
                checks.push(("R_c", r_c));
            }
            DriveModel::Beltrami { eps_c } => checks.push(("eps_c", eps_c)),
            DriveModel::BeltramiStretch { lambda_c } if !(lambda_c > 1.0) => {
                return Err(Error::InvalidParameter(format!("lambda_c = {lambda_c} must exceed 1")));
            }
            _ => {}
        }
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Material-point state the drives are evaluated from.
#[derive(Debug, Clone, Copy)]
pub struct PointState {
    pub eps: SymTensor,
    /// Cauchy stress of the intact material at the current strain.
    pub sigma: SymTensor,
    pub z: f64,
    /// Principal stretches, finite strain only.
    pub stretches: Option<[f64; 3]>,
}

/// How a quadrature-point drive enters the phase-field update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSource {
    /// `Ȳᵉ = 2(1 − z) H` with `H = (l_c/G_c) Ψ₀`, re-evaluated as `z` changes.
    Degradable(f64),
    /// `Ȳᵉ` frozen for the current load step.
    Fixed(f64),
}

impl DriveSource {
    pub fn value_at(&self, z: f64) -> f64 {
        match *self {
            DriveSource::Degradable(h) => 2.0 * (1.0 - z) * h,
            DriveSource::Fixed(y) => y,
        }
    }
}

/// Undegraded energy `Ψ₀` entering a variational drive.
pub fn variational_energy(model: &DriveModel, eps: &SymTensor, p: &LinearElasticParams) -> f64 {
    match model {
        DriveModel::Griffith => energy_and_stress(eps, p).0,
        DriveModel::SpectralSplit => positive_negative_energy(eps, EnergySplit::Spectral, p).0,
        DriveModel::LambdaMuSplit => positive_negative_energy(eps, EnergySplit::LambdaMu, p).0,
        DriveModel::KgSplit => positive_negative_energy(eps, EnergySplit::VolDev, p).0,
        _ => 0.0,
    }
}

/// `Ȳᵉ = 2(1 − z)(l_c/G_c) Ψ₀`.
pub fn griffith_variational(state: &PointState, spec: &DrivingForceSpec, p: &LinearElasticParams) -> f64 {
    2.0 * (1.0 - state.z) * spec.lc / spec.gc * variational_energy(&spec.model, &state.eps, p)
}

pub fn rankine(sigma: &SymTensor, sigma_c: f64) -> f64 {
    let s = eig_sym_sorted(sigma).values;
    macaulay(s[0] / sigma_c - 1.0, Sign::Plus)
}

/// Maximum shear stress from the deviator, `sqrt(3/8 dev σ : dev σ)`.
pub fn deviatoric_shear(sigma: &SymTensor) -> f64 {
    let d = sigma.dev();
    (0.375 * d.ddot(&d)).sqrt()
}

pub fn tresca(sigma: &SymTensor, threshold: f64, form: TrescaForm) -> f64 {
    let ratio = match form {
        TrescaForm::Principal => {
            let s = eig_sym_sorted(sigma).values;
            (s[0] - s[2]) / threshold
        }
        TrescaForm::ShearPrincipal => {
            let s = eig_sym_sorted(sigma).values;
            0.5 * (s[0] - s[2]) / threshold
        }
        TrescaForm::ShearDeviatoric => deviatoric_shear(sigma) / threshold,
    };
    macaulay(ratio - 1.0, Sign::Plus)
}

pub fn compressive_rankine(sigma: &SymTensor, sigma_c: f64) -> f64 {
    if sigma.trace() > 0.0 {
        rankine(sigma, sigma_c)
    } else {
        0.0
    }
}

pub fn mohr_coulomb(sigma: &SymTensor, r_t: f64, r_c: f64) -> f64 {
    let s = eig_sym_sorted(sigma).values;
    macaulay(s[0] / r_t - s[2] / r_c - 1.0, Sign::Plus)
}

/// Effective Mohr-Coulomb stress `m σ_I − σ_III`.
pub fn mohr_coulomb_effective_stress(sigma: &SymTensor, m: f64) -> f64 {
    let s = eig_sym_sorted(sigma).values;
    m * s[0] - s[2]
}

pub fn beltrami(eps: &SymTensor, eps_c: f64) -> f64 {
    let e = eig_sym_sorted(eps).values;
    macaulay(e[0] / eps_c - 1.0, Sign::Plus)
}

pub fn beltrami_stretch(stretches: &[f64; 3], lambda_c: f64) -> f64 {
    let l = stretches.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    macaulay(l / lambda_c - 1.0, Sign::Plus)
}

/// Drive source at a material point (small strain).
pub fn drive_source(state: &PointState, spec: &DrivingForceSpec, p: &LinearElasticParams) -> DriveSource {
    if spec.model.is_variational() {
        return DriveSource::Degradable(spec.lc / spec.gc * variational_energy(&spec.model, &state.eps, p));
    }
    DriveSource::Fixed(ad_hoc(state, spec))
}

/// Failure-criterion drives; zero for variational models.
pub fn ad_hoc(state: &PointState, spec: &DrivingForceSpec) -> f64 {
    match spec.model {
        DriveModel::Rankine { sigma_c } => rankine(&state.sigma, sigma_c),
        DriveModel::Tresca { threshold, form } => tresca(&state.sigma, threshold, form),
        DriveModel::CompressiveRankine { sigma_c } => compressive_rankine(&state.sigma, sigma_c),
        DriveModel::MohrCoulomb { r_t, r_c } => mohr_coulomb(&state.sigma, r_t, r_c),
        DriveModel::Beltrami { eps_c } => beltrami(&state.eps, eps_c),
        DriveModel::BeltramiStretch { lambda_c } => match state.stretches {
            Some(l) => beltrami_stretch(&l, lambda_c),
            None => {
                // Small strain: principal stretches 1 + ε_a.
                let e = eig_sym_sorted(&state.eps).values;
                beltrami_stretch(&e.map(|x| 1.0 + x), lambda_c)
            }
        },
        _ => 0.0,
    }
}

/// Pointwise `Ȳᵉ` for any model.
pub fn evaluate(state: &PointState, spec: &DrivingForceSpec, p: &LinearElasticParams) -> f64 {
    drive_source(state, spec, p).value_at(state.z)
}
