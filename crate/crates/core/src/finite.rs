//! Hyperelastic energies with invariant- and stretch-based tension/compression splits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{degradation, DegradationParams};
use crate::tensor::{heaviside, macaulay, principal_stretches, Sign, SymTensor, Tensor2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperelasticModel {
    NeoHooke,
    MooneyRivlinPolyconvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperelasticParams {
    pub mu: f64,
    pub k: f64,
    pub bulk: f64,
    pub model: HyperelasticModel,
}

impl HyperelasticParams {
    pub fn new(mu: f64, k: f64, bulk: f64, model: HyperelasticModel) -> Result<Self> {
        if mu <= 0.0 || !mu.is_finite() {
            return Err(Error::NonPositiveParameter { name: "mu", value: mu });
        }
        if bulk <= 0.0 || !bulk.is_finite() {
            return Err(Error::NonPositiveParameter { name: "K", value: bulk });
        }
        if k < 0.0 || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("k = {k} must be >= 0")));
        }
        let k = match model {
            HyperelasticModel::NeoHooke => 0.0,
            HyperelasticModel::MooneyRivlinPolyconvex => k,
        };
        Ok(Self { mu, k, bulk, model })
    }

    /// Neo-Hooke parameters matching the small-strain moduli of `(E, ν)`.
    pub fn neo_hooke_from_young(young: f64, poisson: f64) -> Result<Self> {
        let mu = young / (2.0 * (1.0 + poisson));
        let bulk = young / (3.0 * (1.0 - 2.0 * poisson));
        Self::new(mu, 0.0, bulk, HyperelasticModel::NeoHooke)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteSplit {
    InvariantSplit,
    StretchSplit,
}

/// `U(J) = K/2 (J−1)²`.
pub fn volumetric_energy(j: f64, bulk: f64) -> Result<f64> {
    if j <= 0.0 {
        return Err(Error::NonPositiveJacobian(j));
    }
    Ok(0.5 * bulk * (j - 1.0) * (j - 1.0))
}

/// `Ψ̄₀ = μ/2 [(Ī₁−3) + k(Ī₂^{3/2} − 3√3)]`; both invariants must be `≥ 3`.
pub fn isochoric_energy(i1: f64, i2: f64, p: &HyperelasticParams) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if i1 < 3.0 - SLACK {
        return Err(Error::InvalidInvariant { name: "I1", value: i1 });
    }
    if i2 < 3.0 - SLACK {
        return Err(Error::InvalidInvariant { name: "I2", value: i2 });
    }
    Ok(isochoric_unchecked(i1, i2, p).0)
}

/// Energy and partial derivatives `(Ψ̄₀, ∂/∂Ī₁, ∂/∂Ī₂)` without range checks.
/// Negative `Ī₂` is clamped to zero.
fn isochoric_unchecked(i1: f64, i2: f64, p: &HyperelasticParams) -> (f64, f64, f64) {
    let i2c = if i2 < 0.0 {
        log::trace!("clamping negative I2 = {i2:e} to zero");
        0.0
    } else {
        i2
    };
    let s3 = 3.0f64.sqrt();
    let psi = 0.5 * p.mu * ((i1 - 3.0) + p.k * (i2c.powf(1.5) - 3.0 * s3));
    let d2 = if i2 < 0.0 { 0.0 } else { 0.75 * p.mu * p.k * i2c.sqrt() };
    (psi, 0.5 * p.mu, d2)
}

/// Split invariants of the invariant-based split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSplit {
    pub i1_plus: f64,
    pub i1_minus: f64,
    pub i2_plus: f64,
    pub i2_minus: f64,
    pub j_plus: f64,
    pub j_minus: f64,
}

pub fn invariant_split(f: &Tensor2) -> Result<InvariantSplit> {
    let j = f.det();
    if j <= 0.0 {
        return Err(Error::NonPositiveJacobian(j));
    }
    let a = f.ddot(f) - 3.0;
    let cof = f.cof();
    let b = cof.ddot(&cof) - 3.0;
    let j23 = j.powf(-2.0 / 3.0);
    let j43 = j23 * j23;
    Ok(InvariantSplit {
        i1_plus: 3.0 + j23 * macaulay(a, Sign::Plus),
        i1_minus: 3.0 + j23 * macaulay(a, Sign::Minus),
        i2_plus: 3.0 + j43 * macaulay(b, Sign::Plus),
        i2_minus: 3.0 + j43 * macaulay(b, Sign::Minus),
        j_plus: 1.0 + macaulay(j - 1.0, Sign::Plus),
        j_minus: 1.0 + macaulay(j - 1.0, Sign::Minus),
    })
}

/// Per-axis stretch split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchSplit {
    pub stretches: [f64; 3],
    pub plus: [f64; 3],
    pub minus: [f64; 3],
    pub elastic: [f64; 3],
    pub inelastic: [f64; 3],
}

pub fn stretch_split(f: &Tensor2, z: f64) -> Result<StretchSplit> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::OutOfRangeZ(z));
    }
    let ps = principal_stretches(f)?;
    Ok(split_stretches(ps.stretches, z))
}

fn split_stretches(l: [f64; 3], z: f64) -> StretchSplit {
    // λ⁺λ⁻ = λ exactly: one of the two factors is exactly 1.
    let plus = l.map(|x| if x > 1.0 { x } else { 1.0 });
    let minus = l.map(|x| if x > 1.0 { 1.0 } else { x });
    let elastic = plus.map(|x| x.powf(1.0 - z));
    let inelastic = std::array::from_fn(|a| plus[a].powf(z) * minus[a]);
    StretchSplit { stretches: l, plus, minus, elastic, inelastic }
}

/// Energy of the isotropic model as a function of principal stretches, with
/// the gradient `∂Ψ/∂λ_a`.
fn stretch_energy(l: [f64; 3], p: &HyperelasticParams) -> (f64, [f64; 3]) {
    let j = l[0] * l[1] * l[2];
    let j23 = j.powf(-2.0 / 3.0);
    let sq = l.map(|x| x * x);
    let s1 = sq[0] + sq[1] + sq[2];
    let s2 = sq[0] * sq[1] + sq[1] * sq[2] + sq[0] * sq[2];
    let i1 = j23 * s1;
    let i2 = j23 * j23 * s2;
    let (iso, d1, d2) = isochoric_unchecked(i1, i2, p);
    let psi = 0.5 * p.bulk * (j - 1.0) * (j - 1.0) + iso;
    let du = p.bulk * (j - 1.0);
    let grad = std::array::from_fn(|a| {
        let dj = j / l[a];
        let di1 = j23 * 2.0 * l[a] - (2.0 / 3.0) * i1 / l[a];
        let others = s1 - sq[a];
        let di2 = j23 * j23 * 2.0 * l[a] * others - (4.0 / 3.0) * i2 / l[a];
        du * dj + d1 * di1 + d2 * di2
    });
    (psi, grad)
}

/// Undamaged energy `Ψ = U(J) + Ψ̄₀(Ī₁, Ī₂)`.
pub fn undamaged_energy(f: &Tensor2, p: &HyperelasticParams) -> Result<f64> {
    let (i1, i2, j) = crate::tensor::modified_invariants(f)?;
    Ok(0.5 * p.bulk * (j - 1.0) * (j - 1.0) + isochoric_unchecked(i1, i2, p).0)
}

/// Result of a pointwise finite-strain evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FiniteResponse {
    pub energy: f64,
    pub piola: Tensor2,
    /// Tensile energy that is degraded (invariant split), used by the drive.
    pub tensile_energy: f64,
    /// `−∂Ψ/∂z` at fixed `F`.
    pub energy_release: f64,
}

/// Degraded energy `Ψᵉ(F, z)`.
pub fn degraded_energy(
    f: &Tensor2,
    z: f64,
    method: FiniteSplit,
    p: &HyperelasticParams,
    deg: &DegradationParams,
) -> Result<f64> {
    Ok(evaluate(f, z, method, p, deg)?.energy)
}

/// First Piola-Kirchhoff stress `P = ∂Ψᵉ/∂F`.
pub fn piola_stress(
    f: &Tensor2,
    z: f64,
    method: FiniteSplit,
    p: &HyperelasticParams,
    deg: &DegradationParams,
) -> Result<Tensor2> {
    Ok(evaluate(f, z, method, p, deg)?.piola)
}

/// Energy, stress and drive ingredients in one pass.
///
/// Invariant split: `Ψ = g U(J⁺) + U(J⁻) + g Ψ̄₀(Ī₁⁺, Ī₂⁺) + Ψ̄₀(Ī₁⁻, Ī₂⁻)`.
/// The split invariants carry the `J`-only remainder `3(J^{∓2/3·n} − 1)` on
/// the branch picked by `J − 1`, so that `Ī⁺ + Ī⁻ − 3 = Ī` and the reference
/// state is stress free. [`invariant_split`] returns the bare `⟨·⟩±` values.
///
/// Stretch split: the model energy is evaluated on `λ̂_a = λ_aᵉ λ_a⁻`, i.e.
/// the tensile part of each stretch is degraded through the exponent
/// `1 − z` while the compressive part stays elastic, plus `ε_res` times the
/// undamaged energy.
pub fn evaluate(
    f: &Tensor2,
    z: f64,
    method: FiniteSplit,
    p: &HyperelasticParams,
    deg: &DegradationParams,
) -> Result<FiniteResponse> {
    let (g, dg) = degradation(z, deg)?;
    match method {
        FiniteSplit::InvariantSplit => {
            let j = f.det();
            if j <= 0.0 {
                return Err(Error::NonPositiveJacobian(j));
            }
            let cof = f.cof();
            let ff = f.ddot(f);
            let a = ff - 3.0;
            let b = cof.ddot(&cof) - 3.0;
            let j23 = j.powf(-2.0 / 3.0);
            let j43 = j23 * j23;
            let hj = heaviside(j - 1.0);
            let (jp, jm) = if j > 1.0 { (j, 1.0) } else { (1.0, j) };
            let ha = heaviside(a);
            let hb = heaviside(b);
            let (ap, am) = (macaulay(a, Sign::Plus), macaulay(a, Sign::Minus));
            let (bp, bm) = (macaulay(b, Sign::Plus), macaulay(b, Sign::Minus));
            // Ī₁ − 3 = J^{-2/3}(F:F − 3) + 3(J^{-2/3} − 1); the second term is
            // assigned to the branch selected by the sign of J − 1.
            let i1p = 3.0 + j23 * ap + 3.0 * (jp.powf(-2.0 / 3.0) - 1.0);
            let i1m = 3.0 + j23 * am + 3.0 * (jm.powf(-2.0 / 3.0) - 1.0);
            let i2p = 3.0 + j43 * bp + 3.0 * (jp.powf(-4.0 / 3.0) - 1.0);
            let i2m = 3.0 + j43 * bm + 3.0 * (jm.powf(-4.0 / 3.0) - 1.0);
            let (iso_p, d1p, d2p) = isochoric_unchecked(i1p, i2p, p);
            let (iso_m, d1m, d2m) = isochoric_unchecked(i1m, i2m, p);
            let u_p = 0.5 * p.bulk * (jp - 1.0) * (jp - 1.0);
            let u_m = 0.5 * p.bulk * (jm - 1.0) * (jm - 1.0);
            let tensile = u_p + iso_p;
            let energy = g * tensile + u_m + iso_m;

            // ∂(F:F)/∂F = 2F, ∂|cof F|²/∂F = 2(F:F F − F C), ∂J/∂F = cof F.
            let c = f.transpose().matmul(f);
            let da = f.scale(2.0);
            let db = (f.scale(ff) - f.matmul(&c)).scale(2.0);
            let dj23 = -2.0 / 3.0 * j23 / j;
            let dj43 = -4.0 / 3.0 * j43 / j;
            let comp1 = -2.0 * j23 / j;
            let comp2 = -4.0 * j43 / j;
            let mut piola = Tensor2::ZERO;
            let w_cof_p = p.bulk * (jp - 1.0) * hj + d1p * (ap * dj23 + comp1 * hj) + d2p * (bp * dj43 + comp2 * hj);
            piola.axpy(g * w_cof_p, &cof);
            piola.axpy(g * d1p * j23 * ha, &da);
            piola.axpy(g * d2p * j43 * hb, &db);
            let w_cof_m = p.bulk * (jm - 1.0) * (1.0 - hj)
                + d1m * (am * dj23 + comp1 * (1.0 - hj))
                + d2m * (bm * dj43 + comp2 * (1.0 - hj));
            piola.axpy(w_cof_m, &cof);
            piola.axpy(d1m * j23 * (1.0 - ha), &da);
            piola.axpy(d2m * j43 * (1.0 - hb), &db);
            Ok(FiniteResponse { energy, piola, tensile_energy: tensile, energy_release: -dg * tensile })
        }
        FiniteSplit::StretchSplit => {
            let ps = principal_stretches(f)?;
            let l = ps.stretches;
            let sp = split_stretches(l, z);
            let hat: [f64; 3] = std::array::from_fn(|a| sp.elastic[a] * sp.minus[a]);
            let (psi_hat, g_hat) = stretch_energy(hat, p);
            let (psi_full, g_full) = stretch_energy(l, p);
            let mut dpsi = [0.0; 3];
            let mut dz = 0.0;
            for a in 0..3 {
                let (dhat, dhat_dz) =
                    if l[a] > 1.0 { ((1.0 - z) * l[a].powf(-z), -l[a].ln() * hat[a]) } else { (1.0, 0.0) };
                dpsi[a] = g_hat[a] * dhat + deg.residual * g_full[a];
                dz += g_hat[a] * dhat_dz;
            }
            let mut piola = Tensor2::ZERO;
            for a in 0..3 {
                piola.axpy(dpsi[a], &Tensor2::outer(&ps.current_dirs[a], &ps.reference_dirs[a]));
            }
            Ok(FiniteResponse {
                energy: psi_hat + deg.residual * psi_full,
                piola,
                tensile_energy: psi_full - stretch_energy(sp.minus, p).0,
                energy_release: -dz,
            })
        }
    }
}

/// Cauchy stress `σ = J⁻¹ P Fᵀ`.
pub fn cauchy_stress(f: &Tensor2, piola: &Tensor2) -> SymTensor {
    let j = f.det();
    piola.sym_mul_transpose(f) * (1.0 / j)
}

/// Material tangent `∂P/∂F` by central differences of the analytic stress,
/// row-major index `3i + j`.
pub fn piola_tangent(
    f: &Tensor2,
    z: f64,
    method: FiniteSplit,
    p: &HyperelasticParams,
    deg: &DegradationParams,
) -> Result<[[f64; 9]; 9]> {
    let h = 1e-7 * f.norm().max(1.0);
    let mut out = [[0.0; 9]; 9];
    for col in 0..9 {
        let (i, j) = (col / 3, col % 3);
        let mut fp = *f;
        fp.0[i][j] += h;
        let mut fm = *f;
        fm.0[i][j] -= h;
        let pp = piola_stress(&fp, z, method, p, deg)?;
        let pm = piola_stress(&fm, z, method, p, deg)?;
        for row in 0..9 {
            let (k, l) = (row / 3, row % 3);
            out[row][col] = (pp.0[k][l] - pm.0[k][l]) / (2.0 * h);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(k: f64) -> HyperelasticParams {
        let model = if k == 0.0 { HyperelasticModel::NeoHooke } else { HyperelasticModel::MooneyRivlinPolyconvex };
        HyperelasticParams::new(21_000.0, k, 28_000.0, model).unwrap()
    }

    fn random_f(rng: &mut impl Rng, amp: f64) -> Tensor2 {
        loop {
            let mut f = Tensor2::identity();
            for i in 0..3 {
                for j in 0..3 {
                    f.0[i][j] += rng.gen_range(-amp..amp);
                }
            }
            if f.det() > 0.2 {
                return f;
            }
        }
    }

    #[test]
    fn volumetric_examples() {
        assert_eq!(volumetric_energy(1.0, 28_000.0).unwrap(), 0.0);
        assert!((volumetric_energy(1.1, 28_000.0).unwrap() - 140.0).abs() < 1e-9);
        assert!((volumetric_energy(0.9, 28_000.0).unwrap() - 140.0).abs() < 1e-9);
        assert!(volumetric_energy(0.0, 1.0).is_err());
    }

    #[test]
    fn isochoric_examples() {
        let p2 = HyperelasticParams::new(2.0, 0.0, 1.0, HyperelasticModel::NeoHooke).unwrap();
        assert_eq!(isochoric_energy(3.0, 3.0, &p2).unwrap(), 0.0);
        assert!((isochoric_energy(4.0, 3.0, &p2).unwrap() - 1.0).abs() < 1e-14);
        let mr = HyperelasticParams::new(2.0, 1.0, 1.0, HyperelasticModel::MooneyRivlinPolyconvex).unwrap();
        let v = isochoric_energy(3.0, 4.0, &mr).unwrap();
        assert!((v - (8.0 - 3.0 * 3.0f64.sqrt())).abs() < 1e-12);
        assert!((v - 2.804).abs() < 1e-3);
        assert!(isochoric_energy(2.0, 3.0, &mr).is_err());
    }

    #[test]
    fn invariant_split_examples() {
        let s = invariant_split(&Tensor2::identity()).unwrap();
        assert_eq!((s.i1_plus, s.i1_minus, s.i2_plus, s.i2_minus), (3.0, 3.0, 3.0, 3.0));
        assert_eq!((s.j_plus, s.j_minus), (1.0, 1.0));
        let s = invariant_split(&Tensor2::identity().scale(2.0)).unwrap();
        assert!((s.j_plus - 8.0).abs() < 1e-12 && s.j_minus == 1.0 && s.i1_minus == 3.0);
        let s = invariant_split(&Tensor2::identity().scale(0.5)).unwrap();
        assert!(s.j_plus == 1.0 && (s.j_minus - 0.125).abs() < 1e-15);
        assert_eq!(s.i1_plus, 3.0);
        assert!((s.i1_minus + 6.0).abs() < 1e-12);
        let mut bad = Tensor2::identity();
        bad.0[2][2] = -1.0;
        assert!(matches!(invariant_split(&bad), Err(Error::NonPositiveJacobian(_))));
    }

    #[test]
    fn invariant_split_complementarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let f = random_f(&mut rng, 0.4);
            let s = invariant_split(&f).unwrap();
            assert_eq!((s.i1_plus - 3.0) * (s.i1_minus - 3.0), 0.0);
            assert_eq!((s.j_plus - 1.0) * (s.j_minus - 1.0), 0.0);
            let p = params(0.0);
            let split = 0.5 * p.bulk * ((s.j_plus - 1.0).powi(2) + (s.j_minus - 1.0).powi(2));
            let full = volumetric_energy(f.det(), p.bulk).unwrap();
            assert!((split - full).abs() <= 1e-12 * full.max(1e-300));
        }
    }

    #[test]
    fn stretch_split_examples() {
        let s = split_stretches([1.2, 1.0, 0.8], 0.0);
        assert!((s.elastic[0] - 1.2).abs() < 1e-15 && s.inelastic[0] == 1.0);
        let s = split_stretches([1.2, 1.0, 0.8], 1.0);
        assert_eq!(s.elastic[0], 1.0);
        assert_eq!(s.elastic[2], 1.0);
        assert_eq!(s.inelastic[2], 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let l: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.3..2.0));
            let z = rng.gen_range(0.0..=1.0);
            let s = split_stretches(l, z);
            for a in 0..3 {
                assert_eq!(s.plus[a] * s.minus[a], l[a]);
                assert!((s.elastic[a] * s.inelastic[a] - l[a]).abs() <= 1e-12 * l[a]);
            }
        }
    }

    #[test]
    fn degraded_energy_examples() {
        let d = DegradationParams { residual: 0.0 };
        for p in [params(0.0), params(0.5)] {
            for m in [FiniteSplit::InvariantSplit, FiniteSplit::StretchSplit] {
                for z in [0.0, 0.4, 1.0] {
                    assert!(degraded_energy(&Tensor2::identity(), z, m, &p, &d).unwrap().abs() < 1e-9);
                }
            }
            let e = degraded_energy(&Tensor2::identity().scale(2.0), 1.0, FiniteSplit::InvariantSplit, &p, &d).unwrap();
            assert!(e.abs() < 1e-9);
        }
    }

    #[test]
    fn invariant_split_additive_for_isochoric_f() {
        let d = DegradationParams { residual: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for k in [0.0, 0.7] {
            let p = params(k);
            for _ in 0..200 {
                let f = random_f(&mut rng, 0.4);
                let f = f.scale(f.det().powf(-1.0 / 3.0));
                let split = degraded_energy(&f, 0.0, FiniteSplit::InvariantSplit, &p, &d).unwrap();
                let full = undamaged_energy(&f, &p).unwrap();
                assert!((split - full).abs() <= 1e-10 * full.abs().max(1.0));
            }
        }
    }

    #[test]
    fn invariant_split_residual_is_bounded() {
        let d = DegradationParams { residual: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = params(0.0);
        for _ in 0..200 {
            let f = random_f(&mut rng, 0.3);
            let j = f.det();
            let split = degraded_energy(&f, 0.0, FiniteSplit::InvariantSplit, &p, &d).unwrap();
            let full = undamaged_energy(&f, &p).unwrap();
            let bound = 0.5 * p.mu * (3.0 * (1.0 - j.powf(-2.0 / 3.0))).abs()
                + 0.5 * p.mu * p.k * (3.0 * (1.0 - j.powf(-4.0 / 3.0))).abs();
            assert!((split - full).abs() <= bound * (1.0 + 1e-10) + 1e-9);
        }
    }

    fn fd_check(method: FiniteSplit, tol: f64, seed: u64) {
        let d = DegradationParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checked = 0;
        for k in [0.0, 0.5] {
            let p = params(k);
            while checked < 200 {
                let f = random_f(&mut rng, 0.3);
                let piola = piola_stress(&f, 0.3, method, &p, &d).unwrap();
                let h = 1e-6;
                let mut max_err = 0.0f64;
                let mut near_kink = false;
                for i in 0..3 {
                    for j in 0..3 {
                        let mut fp = f;
                        fp.0[i][j] += h;
                        let mut fm = f;
                        fm.0[i][j] -= h;
                        let ep = degraded_energy(&fp, 0.3, method, &p, &d).unwrap();
                        let em = degraded_energy(&fm, 0.3, method, &p, &d).unwrap();
                        let fd = (ep - em) / (2.0 * h);
                        max_err = max_err.max((fd - piola.0[i][j]).abs());
                        // Macaulay kinks are crossed by the stencil.
                        let (sp, sm) = (invariant_split(&fp).unwrap(), invariant_split(&fm).unwrap());
                        let sf = |s: InvariantSplit| (s.i1_plus > 3.0, s.i2_plus > 3.0, s.j_plus > 1.0);
                        near_kink |= sf(sp) != sf(sm);
                        let (lp, lm) =
                            (principal_stretches(&fp).unwrap().stretches, principal_stretches(&fm).unwrap().stretches);
                        near_kink |= (0..3).any(|a| (lp[a] > 1.0) != (lm[a] > 1.0));
                    }
                }
                if near_kink {
                    continue;
                }
                assert!(max_err <= tol * piola.norm(), "{method:?} err {max_err} |P| {}", piola.norm());
                checked += 1;
            }
            checked = 0;
        }
    }

    #[test]
    fn piola_matches_fd_invariant_split() {
        fd_check(FiniteSplit::InvariantSplit, 1e-5, 15);
    }

    #[test]
    fn piola_matches_fd_stretch_split() {
        fd_check(FiniteSplit::StretchSplit, 1e-4, 16);
    }

    #[test]
    fn reference_state_is_stress_free() {
        let d = DegradationParams::default();
        for m in [FiniteSplit::InvariantSplit, FiniteSplit::StretchSplit] {
            let p = piola_stress(&Tensor2::identity(), 0.0, m, &params(0.5), &d).unwrap();
            assert!(p.norm() < 1e-9);
        }
    }

    #[test]
    fn invariant_split_convex_along_rank_one_lines() {
        let d = DegradationParams { residual: 1e-5 };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = params(0.5);
        for _ in 0..200 {
            let f0 = random_f(&mut rng, 0.2);
            let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let b: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let ab = Tensor2::outer(&a, &b);
            let z = rng.gen_range(0.0..1.0);
            let h = 1e-3;
            let e = |t: f64| {
                let mut f = f0;
                f.axpy(t, &ab);
                degraded_energy(&f, z, FiniteSplit::InvariantSplit, &p, &d)
            };
            let branch = |t: f64| {
                let mut f = f0;
                f.axpy(t, &ab);
                let c = f.cof();
                (f.ddot(&f) > 3.0, c.ddot(&c) > 3.0, f.det() > 1.0)
            };
            // The split switches branch across Macaulay kinks; sample smooth stretches only.
            if branch(-h) != branch(h) {
                continue;
            }
            if let (Ok(em), Ok(e0), Ok(ep)) = (e(-h), e(0.0), e(h)) {
                let scale = p.mu + p.bulk;
                assert!(ep - 2.0 * e0 + em >= -1e-8 * scale, "{}", ep - 2.0 * e0 + em);
            }
        }
    }

    #[test]
    fn tangent_is_derivative_of_stress() {
        let d = DegradationParams::default();
        let p = params(0.0);
        let f = Tensor2([[1.05, 0.02, 0.0], [0.01, 0.97, 0.03], [0.0, -0.02, 1.01]]);
        let t = piola_tangent(&f, 0.2, FiniteSplit::InvariantSplit, &p, &d).unwrap();
        for r in 0..9 {
            for c in 0..9 {
                assert!((t[r][c] - t[c][r]).abs() <= 1e-4 * (p.mu + p.bulk));
            }
        }
    }
}
