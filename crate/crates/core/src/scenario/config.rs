//! Scenario configuration files: JSON with unit-suffixed keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::driving::{DriveModel, DrivingForceSpec, TrescaForm};
use crate::error::{Error, Result};
use crate::evolution::EvolutionParams;
use crate::fem::assembly::{Material, Model};
use crate::fem::equilibrium::NewtonOptions;
use crate::finite::{FiniteSplit, HyperelasticModel, HyperelasticParams};
use crate::linear::{critical_stress, DegradationParams, LinearElasticParams, PlaneMode, StressSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "mode_I")]
    ModeI,
    #[serde(rename = "mode_II")]
    ModeII,
    #[serde(rename = "brazilian")]
    Brazilian,
    #[serde(rename = "conchoidal")]
    Conchoidal,
    #[serde(rename = "bar_1d")]
    Bar1d,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ModeI => "mode_I",
            ScenarioKind::ModeII => "mode_II",
            ScenarioKind::Brazilian => "brazilian",
            ScenarioKind::Conchoidal => "conchoidal",
            ScenarioKind::Bar1d => "bar_1d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ScenarioKind::Bar1d => 1,
            ScenarioKind::Conchoidal => 3,
            _ => 2,
        }
    }
}

/// Geometry and mesh density. Keys not used by the scenario are rejected
/// during validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nz: Option<usize>,
    /// Slit from the left edge along the mid-height line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slit_length_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rings: Option<usize>,
    /// Width of each loaded arc of the disc.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc_mm: Option<f64>,
    /// Length of an initial `z = 1` seam along the loading diameter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_crack_mm: Option<f64>,
    /// Side of the loaded square patch on the block top.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patch_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_length_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaterialKind {
    #[default]
    Linear,
    Hyperelastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct MaterialConfig {
    #[serde(default)]
    pub kind: MaterialKind,
    pub E_MPa: f64,
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane_mode: Option<PlaneMode>,
    /// Stress split of the displacement problem (linear material).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<StressSplit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_split: Option<FiniteSplit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperelastic_model: Option<HyperelasticModel>,
    /// Second Mooney-Rivlin coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_MPa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_stiffness: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveVariant {
    Griffith,
    SpectralSplit,
    LambdaMuSplit,
    #[serde(rename = "KG_split")]
    KgSplit,
    Rankine,
    Tresca,
    CompressiveRankine,
    MohrCoulomb,
    Beltrami,
    BeltramiStretch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct DriveConfig {
    pub variant: DriveVariant,
    /// Defaults to `sqrt(E G_c / (3 l_c))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_c_MPa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_MPa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tresca_form: Option<TrescaForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_t_MPa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_c_MPa: Option<f64>,
    /// `R_c / R_t`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct EvolutionConfig {
    pub lc_mm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub Gc_N_per_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub Gc_N_per_m: Option<f64>,
    #[serde(default = "one")]
    pub dt_s: f64,
    /// `τ = c_rule Δt`.
    #[serde(default = "one")]
    pub c_rule: f64,
    /// Explicit retardation time, overrides `c_rule`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    /// Mobility `M`, mm²/(N s); `τ = l_c/(M G_c)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mobility: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn failure_ratio() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingConfig {
    #[serde(default)]
    pub du_mm: f64,
    pub steps: usize,
    /// Stop once the force falls below `failure_ratio · F_max` after the peak.
    #[serde(default = "yes")]
    pub stop_after_failure: bool,
    #[serde(default = "failure_ratio")]
    pub failure_ratio: f64,
    /// Stop at the first step with a node above `z = 0.9`.
    #[serde(default)]
    pub stop_after_nucleation: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Field dump every n steps; 0 writes only the final state.
    #[serde(default)]
    pub vtk_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialConfig>,
    pub drive: DriveConfig,
    pub evolution: EvolutionConfig,
    pub loading: LoadingConfig,
    #[serde(default)]
    pub solver: NewtonOptions,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Parse JSON text; syntax and type errors carry line and column.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    if text.trim().is_empty() {
        return Err(Error::Parse("empty configuration".into()));
    }
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Read, parse and validate a configuration file; defaults are filled in.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)?.resolved()
}

/// Concrete geometry after defaults.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    Plate { width: f64, height: f64, nx: usize, ny: usize, slit_length: f64 },
    Disc { diameter: f64, rings: usize, arc: f64, seed_crack: f64 },
    Block { lx: f64, ly: f64, lz: f64, nx: usize, ny: usize, nz: usize, patch: f64 },
    Bar { half_length: f64, elements: usize },
}

impl GeometrySpec {
    /// Characteristic element size.
    pub fn h(&self) -> f64 {
        match *self {
            GeometrySpec::Plate { width, height, nx, ny, .. } => (width / nx as f64).max(height / ny as f64),
            GeometrySpec::Disc { diameter, rings, .. } => 0.5 * diameter / rings as f64,
            GeometrySpec::Block { lx, ly, lz, nx, ny, nz, .. } => {
                (lx / nx as f64).max(ly / ny as f64).max(lz / nz as f64)
            }
            GeometrySpec::Bar { half_length, elements } => 2.0 * half_length / elements as f64,
        }
    }
}

impl ScenarioConfig {
    pub fn gc(&self) -> Option<f64> {
        match (self.evolution.Gc_N_per_mm, self.evolution.Gc_N_per_m) {
            (Some(g), None) => Some(g),
            (None, Some(g)) => Some(g * 1e-3),
            _ => None,
        }
    }

    fn used_geometry_keys(&self) -> &'static [&'static str] {
        match self.scenario {
            ScenarioKind::ModeI | ScenarioKind::ModeII => &["width_mm", "height_mm", "nx", "ny", "slit_length_mm"],
            ScenarioKind::Brazilian => &["diameter_mm", "rings", "arc_mm", "seed_crack_mm"],
            ScenarioKind::Conchoidal => &["width_mm", "depth_mm", "height_mm", "nx", "ny", "nz", "patch_mm"],
            ScenarioKind::Bar1d => &["half_length_mm", "elements"],
        }
    }

    pub fn geometry_spec(&self) -> GeometrySpec {
        let g = &self.geometry;
        let lc = self.evolution.lc_mm;
        match self.scenario {
            ScenarioKind::ModeI | ScenarioKind::ModeII => {
                let width = g.width_mm.unwrap_or(100.0);
                GeometrySpec::Plate {
                    width,
                    height: g.height_mm.unwrap_or(100.0),
                    nx: g.nx.unwrap_or(100),
                    ny: g.ny.unwrap_or(100),
                    slit_length: g.slit_length_mm.unwrap_or(0.5 * width),
                }
            }
            ScenarioKind::Brazilian => {
                let diameter = g.diameter_mm.unwrap_or(50.0);
                GeometrySpec::Disc {
                    diameter,
                    rings: g.rings.unwrap_or(50),
                    arc: g.arc_mm.unwrap_or(0.1 * diameter),
                    seed_crack: g.seed_crack_mm.unwrap_or(0.0),
                }
            }
            ScenarioKind::Conchoidal => GeometrySpec::Block {
                lx: g.width_mm.unwrap_or(2000.0),
                ly: g.depth_mm.unwrap_or(2000.0),
                lz: g.height_mm.unwrap_or(1000.0),
                nx: g.nx.unwrap_or(20),
                ny: g.ny.unwrap_or(20),
                nz: g.nz.unwrap_or(10),
                patch: g.patch_mm.unwrap_or(1000.0),
            },
            ScenarioKind::Bar1d => {
                let half_length = g.half_length_mm.unwrap_or(10.0 * lc);
                let elements = g.elements.unwrap_or(((2.0 * half_length / (0.1 * lc)).round() as usize).max(2));
                GeometrySpec::Bar { half_length, elements: elements + elements % 2 }
            }
        }
    }

    /// Linear parameters; `None` for hyperelastic material or missing block.
    pub fn material_model(&self) -> Result<Option<Model>> {
        let Some(m) = &self.material else { return Ok(None) };
        let degradation = DegradationParams::new(m.residual_stiffness.unwrap_or(1e-5))?;
        let dim = self.scenario.dim();
        let material = match m.kind {
            MaterialKind::Linear => {
                let mode = if dim == 3 { PlaneMode::Full3d } else { m.plane_mode.unwrap_or(PlaneMode::PlaneStress) };
                let params = LinearElasticParams::new(m.E_MPa, m.nu, mode)?;
                Material::Linear { params, split: m.split.unwrap_or(default_split(self.drive.variant)) }
            }
            MaterialKind::Hyperelastic => {
                let base = HyperelasticParams::neo_hooke_from_young(m.E_MPa, m.nu)?;
                let model = m.hyperelastic_model.unwrap_or(HyperelasticModel::NeoHooke);
                let params = HyperelasticParams::new(base.mu, m.k_MPa.unwrap_or(0.0), base.bulk, model)?;
                Material::Finite { params, split: m.finite_split.unwrap_or(FiniteSplit::InvariantSplit) }
            }
        };
        Ok(Some(Model { material, degradation }))
    }

    /// Default critical stress `sqrt(E G_c/(3 l_c))`.
    pub fn critical_stress(&self) -> Result<f64> {
        let e = self.material.as_ref().map(|m| m.E_MPa).ok_or_else(|| Error::InvalidParameter("no material".into()))?;
        let gc = self.gc().ok_or_else(|| Error::InvalidParameter("G_c missing".into()))?;
        critical_stress(e, gc, self.evolution.lc_mm)
    }

    pub fn drive_spec(&self) -> Result<DrivingForceSpec> {
        let d = &self.drive;
        let gc = self.gc().ok_or_else(|| Error::InvalidParameter("G_c missing".into()))?;
        let lc = self.evolution.lc_mm;
        let sigma_c = || -> Result<f64> {
            match d.sigma_c_MPa {
                Some(s) => Ok(s),
                None => self.critical_stress(),
            }
        };
        let young = self.material.as_ref().map(|m| m.E_MPa).unwrap_or(1.0);
        let model = match d.variant {
            DriveVariant::Griffith => DriveModel::Griffith,
            DriveVariant::SpectralSplit => DriveModel::SpectralSplit,
            DriveVariant::LambdaMuSplit => DriveModel::LambdaMuSplit,
            DriveVariant::KgSplit => DriveModel::KgSplit,
            DriveVariant::Rankine => DriveModel::Rankine { sigma_c: sigma_c()? },
            DriveVariant::CompressiveRankine => DriveModel::CompressiveRankine { sigma_c: sigma_c()? },
            DriveVariant::Tresca => DriveModel::Tresca {
                threshold: match d.threshold_MPa {
                    Some(t) => t,
                    None => sigma_c()?,
                },
                form: d.tresca_form.unwrap_or(TrescaForm::Principal),
            },
            DriveVariant::MohrCoulomb => {
                let r_t = match d.r_t_MPa {
                    Some(r) => r,
                    None => sigma_c()?,
                };
                let r_c = match (d.r_c_MPa, d.m) {
                    (Some(r), None) => r,
                    (None, Some(m)) => m * r_t,
                    _ => return Err(Error::InvalidParameter("mohr_coulomb needs exactly one of r_c_MPa, m".into())),
                };
                DriveModel::MohrCoulomb { r_t, r_c }
            }
            DriveVariant::Beltrami => DriveModel::Beltrami {
                eps_c: match d.eps_c {
                    Some(e) => e,
                    None => sigma_c()? / young,
                },
            },
            DriveVariant::BeltramiStretch => DriveModel::BeltramiStretch {
                lambda_c: match d.lambda_c {
                    Some(l) => l,
                    None => 1.0 + sigma_c()? / young,
                },
            },
        };
        DrivingForceSpec::new(model, lc, gc)
    }

    pub fn evolution_params(&self) -> Result<EvolutionParams> {
        let e = &self.evolution;
        let gc = self.gc().ok_or_else(|| Error::InvalidParameter("G_c missing".into()))?;
        match (e.tau_s, e.mobility) {
            (Some(tau), None) => {
                let p = EvolutionParams { lc: e.lc_mm, gc, tau, dt: e.dt_s };
                p.validate()?;
                Ok(p)
            }
            (None, Some(m)) => EvolutionParams::from_mobility(e.lc_mm, gc, e.dt_s, m),
            (None, None) => EvolutionParams::from_rule(e.lc_mm, gc, e.dt_s, e.c_rule),
            (Some(_), Some(_)) => Err(Error::InvalidParameter("give at most one of tau_s, mobility".into())),
        }
    }

    /// Every violation of the configuration invariants.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let e = &self.evolution;
        let mut positive = |name: &str, x: f64| {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("{name} must be positive, got {x}"));
            }
        };
        positive("evolution.lc_mm", e.lc_mm);
        positive("evolution.dt_s", e.dt_s);
        positive("evolution.c_rule", e.c_rule);
        if let Some(t) = e.tau_s {
            positive("evolution.tau_s", t);
        }
        if let Some(m) = e.mobility {
            positive("evolution.mobility", m);
        }
        if let Some(m) = &self.material {
            positive("material.E_MPa", m.E_MPa);
            if let Some(k) = m.k_MPa {
                if k < 0.0 {
                    v.push(format!("material.k_MPa must be >= 0, got {k}"));
                }
            }
        }
        let d = &self.drive;
        for (name, x) in [
            ("drive.sigma_c_MPa", d.sigma_c_MPa),
            ("drive.threshold_MPa", d.threshold_MPa),
            ("drive.r_t_MPa", d.r_t_MPa),
            ("drive.r_c_MPa", d.r_c_MPa),
            ("drive.m", d.m),
            ("drive.eps_c", d.eps_c),
            ("drive.lambda_c", d.lambda_c),
        ] {
            if let Some(x) = x {
                if !(x > 0.0 && x.is_finite()) {
                    v.push(format!("{name} must be positive, got {x}"));
                }
            }
        }
        match (e.Gc_N_per_mm, e.Gc_N_per_m) {
            (Some(g), None) | (None, Some(g)) => {
                if !(g > 0.0 && g.is_finite()) {
                    v.push(format!("G_c must be positive, got {g}"));
                }
            }
            (None, None) => v.push("evolution: one of Gc_N_per_mm, Gc_N_per_m is required".into()),
            (Some(_), Some(_)) => v.push("evolution: give only one of Gc_N_per_mm, Gc_N_per_m".into()),
        }
        if e.tau_s.is_some() && e.mobility.is_some() {
            v.push("evolution: give at most one of tau_s, mobility".into());
        }
        if let Some(m) = &self.material {
            if !(m.nu > -1.0 && m.nu < 0.5) {
                v.push(format!("material.nu must lie in (-1, 0.5), got {}", m.nu));
            }
            if let Some(r) = m.residual_stiffness {
                if !(0.0..=1e-2).contains(&r) {
                    v.push(format!("material.residual_stiffness must lie in [0, 1e-2], got {r}"));
                }
            }
            if m.kind == MaterialKind::Hyperelastic {
                if m.split.is_some() || m.plane_mode.is_some() {
                    v.push("material: split/plane_mode apply to linear material only".into());
                }
                if matches!(
                    d.variant,
                    DriveVariant::SpectralSplit | DriveVariant::LambdaMuSplit | DriveVariant::KgSplit
                ) {
                    v.push("drive: small-strain energy splits need linear material; use griffith".into());
                }
            } else if m.finite_split.is_some() || m.hyperelastic_model.is_some() || m.k_MPa.is_some() {
                v.push("material: finite_split/hyperelastic_model/k_MPa apply to hyperelastic material only".into());
            }
            if m.kind == MaterialKind::Linear && self.scenario.dim() == 2 && m.plane_mode == Some(PlaneMode::Full3d) {
                v.push("material.plane_mode full3d is not valid for a 2D scenario".into());
            }
        } else if self.scenario != ScenarioKind::Bar1d {
            v.push(format!("material block is required for scenario {}", self.scenario.name()));
        }
        if d.variant == DriveVariant::MohrCoulomb && d.r_c_MPa.is_some() == d.m.is_some() {
            v.push("drive: mohr_coulomb needs exactly one of r_c_MPa, m".into());
        }
        let l = &self.loading;
        if l.steps > 0 && self.scenario != ScenarioKind::Bar1d && !(l.du_mm > 0.0 && l.du_mm.is_finite()) {
            v.push(format!("loading.du_mm must be positive, got {}", l.du_mm));
        }
        if !(l.failure_ratio > 0.0 && l.failure_ratio < 1.0) {
            v.push(format!("loading.failure_ratio must lie in (0, 1), got {}", l.failure_ratio));
        }

        let used = self.used_geometry_keys();
        let given = serde_json::to_value(&self.geometry).unwrap_or_default();
        if let Some(obj) = given.as_object() {
            for k in obj.keys() {
                if !used.contains(&k.as_str()) {
                    v.push(format!("geometry.{k} is not used by scenario {}", self.scenario.name()));
                }
            }
        }
        let geo = self.geometry_spec();
        match geo {
            GeometrySpec::Plate { width, height, nx, ny, slit_length } => {
                positive_into(&mut v, "geometry.width_mm", width);
                positive_into(&mut v, "geometry.height_mm", height);
                if nx < 4 || ny < 4 {
                    v.push(format!("plate grid must be at least 4x4, got {nx}x{ny}"));
                }
                if !(slit_length > 0.0 && slit_length < width) {
                    v.push(format!("geometry.slit_length_mm must lie in (0, width), got {slit_length}"));
                }
                if ny % 2 != 0 {
                    v.push(format!("geometry.ny must be even so the slit lies on a grid line, got {ny}"));
                }
            }
            GeometrySpec::Disc { diameter, rings, arc, seed_crack } => {
                positive_into(&mut v, "geometry.diameter_mm", diameter);
                if rings < 2 || rings % 2 != 0 {
                    v.push(format!("geometry.rings must be even and >= 2, got {rings}"));
                }
                if !(arc > 0.0 && arc < diameter) {
                    v.push(format!("geometry.arc_mm must lie in (0, D), got {arc}"));
                }
                if !(seed_crack >= 0.0 && seed_crack < diameter) {
                    v.push(format!("geometry.seed_crack_mm must lie in [0, D), got {seed_crack}"));
                }
            }
            GeometrySpec::Block { lx, ly, lz, nx, ny, nz, patch } => {
                positive_into(&mut v, "geometry.width_mm", lx);
                positive_into(&mut v, "geometry.depth_mm", ly);
                positive_into(&mut v, "geometry.height_mm", lz);
                if nx < 2 || ny < 2 || nz < 2 {
                    v.push(format!("block grid must be at least 2x2x2, got {nx}x{ny}x{nz}"));
                }
                if !(patch > 0.0 && patch <= lx.min(ly)) {
                    v.push(format!("geometry.patch_mm must lie in (0, min(width, depth)], got {patch}"));
                }
            }
            GeometrySpec::Bar { half_length, elements } => {
                positive_into(&mut v, "geometry.half_length_mm", half_length);
                if elements < 4 {
                    v.push(format!("geometry.elements must be >= 4, got {elements}"));
                }
            }
        }
        let h = geo.h();
        if self.scenario != ScenarioKind::Bar1d && e.lc_mm < 2.0 * h * (1.0 - 1e-12) {
            v.push(format!("l_c = {} mm must be at least 2h = {} mm", e.lc_mm, 2.0 * h));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        // Parameter constructors catch what the checks above do not.
        self.material_model()?;
        self.drive_spec()?;
        self.evolution_params()?;
        Ok(())
    }

    /// Validated copy with every default written out, as echoed in the manifest.
    pub fn resolved(&self) -> Result<ScenarioConfig> {
        self.validate()?;
        let mut c = self.clone();
        let g = &mut c.geometry;
        match self.geometry_spec() {
            GeometrySpec::Plate { width, height, nx, ny, slit_length } => {
                g.width_mm = Some(width);
                g.height_mm = Some(height);
                g.nx = Some(nx);
                g.ny = Some(ny);
                g.slit_length_mm = Some(slit_length);
            }
            GeometrySpec::Disc { diameter, rings, arc, seed_crack } => {
                g.diameter_mm = Some(diameter);
                g.rings = Some(rings);
                g.arc_mm = Some(arc);
                g.seed_crack_mm = Some(seed_crack);
            }
            GeometrySpec::Block { lx, ly, lz, nx, ny, nz, patch } => {
                g.width_mm = Some(lx);
                g.depth_mm = Some(ly);
                g.height_mm = Some(lz);
                g.nx = Some(nx);
                g.ny = Some(ny);
                g.nz = Some(nz);
                g.patch_mm = Some(patch);
            }
            GeometrySpec::Bar { half_length, elements } => {
                g.half_length_mm = Some(half_length);
                g.elements = Some(elements);
            }
        }
        if let (Some(m), Some(model)) = (c.material.as_mut(), self.material_model()?) {
            m.residual_stiffness = Some(model.degradation.residual);
            match model.material {
                Material::Linear { params, split } => {
                    m.split = Some(split);
                    if self.scenario.dim() == 2 {
                        m.plane_mode = Some(params.plane_mode);
                    }
                }
                Material::Finite { params, split } => {
                    m.finite_split = Some(split);
                    m.hyperelastic_model = Some(params.model);
                    m.k_MPa = Some(params.k);
                }
            }
        }
        if c.scenario != ScenarioKind::Bar1d {
            let spec = self.drive_spec()?;
            let d = &mut c.drive;
            match spec.model {
                DriveModel::Rankine { sigma_c } | DriveModel::CompressiveRankine { sigma_c } => {
                    d.sigma_c_MPa = Some(sigma_c)
                }
                DriveModel::Tresca { threshold, form } => {
                    d.threshold_MPa = Some(threshold);
                    d.tresca_form = Some(form);
                }
                DriveModel::MohrCoulomb { r_t, r_c } => {
                    d.r_t_MPa = Some(r_t);
                    if d.m.is_none() {
                        d.r_c_MPa = Some(r_c);
                    }
                }
                DriveModel::Beltrami { eps_c } => d.eps_c = Some(eps_c),
                DriveModel::BeltramiStretch { lambda_c } => d.lambda_c = Some(lambda_c),
                _ => {}
            }
        }
        Ok(c)
    }
}

fn positive_into(v: &mut Vec<String>, name: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        v.push(format!("{name} must be positive, got {x}"));
    }
}

/// Assembled stress law matching a drive: energy-split drives use the
/// corresponding split, everything else degrades the whole stress.
pub fn default_split(variant: DriveVariant) -> StressSplit {
    match variant {
        DriveVariant::SpectralSplit | DriveVariant::LambdaMuSplit => StressSplit::LambdaMu,
        DriveVariant::KgSplit => StressSplit::VolDev,
        _ => StressSplit::Isotropic,
    }
}
