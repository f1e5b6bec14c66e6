//! Small dense tensor algebra on 3×3 tensors.
//!
//! [`SymTensor`] stores the six independent components of a symmetric tensor
//! in the order `[xx, yy, zz, xy, yz, xz]`. [`Tensor2`] is a general 3×3
//! tensor used for deformation gradients and first Piola-Kirchhoff stresses.
//! Plane problems are embedded as 3×3 with the out-of-plane entries filled by
//! the caller.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Index pairs of the six stored components.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

/// Positive or negative Macaulay bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `⟨x⟩₊ = (x + |x|)/2`, `⟨x⟩₋ = (x − |x|)/2`.
#[inline]
pub fn macaulay(x: f64, sign: Sign) -> f64 {
    match sign {
        Sign::Plus => x.max(0.0),
        Sign::Minus => x.min(0.0),
    }
}

/// Heaviside step matching the derivative of `⟨x⟩₊` (zero at the kink).
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor(pub [f64; 6]);

impl SymTensor {
    pub const ZERO: SymTensor = SymTensor([0.0; 6]);

    pub fn identity() -> Self {
        SymTensor([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        SymTensor([a, b, c, 0.0, 0.0, 0.0])
    }

    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64, yz: f64, xz: f64) -> Self {
        SymTensor([xx, yy, zz, xy, yz, xz])
    }

    /// Symmetric part of a full matrix.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        SymTensor([
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[1][2] + m[2][1]),
            0.5 * (m[0][2] + m[2][0]),
        ])
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let c = &self.0;
        [[c[0], c[3], c[5]], [c[3], c[1], c[4]], [c[5], c[4], c[2]]]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let c = &self.0;
        match (i.min(j), i.max(j)) {
            (0, 0) => c[0],
            (1, 1) => c[1],
            (2, 2) => c[2],
            (0, 1) => c[3],
            (1, 2) => c[4],
            (0, 2) => c[5],
            _ => unreachable!("index out of range"),
        }
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// Double contraction `A : B`.
    #[inline]
    pub fn ddot(&self, other: &SymTensor) -> f64 {
        let a = &self.0;
        let b = &other.0;
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn dev(&self) -> SymTensor {
        let m = self.trace() / 3.0;
        let mut d = *self;
        d.0[0] -= m;
        d.0[1] -= m;
        d.0[2] -= m;
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `Q A Qᵀ` for a rotation (or any) matrix `Q`.
    pub fn rotate(&self, q: &[[f64; 3]; 3]) -> SymTensor {
        let a = self.to_matrix();
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += q[i][k] * a[k][l] * q[j][l];
                    }
                }
                r[i][j] = s;
            }
        }
        SymTensor::from_matrix(&r)
    }

    pub fn outer(v: &[f64; 3]) -> SymTensor {
        SymTensor([v[0] * v[0], v[1] * v[1], v[2] * v[2], v[0] * v[1], v[1] * v[2], v[0] * v[2]])
    }

    pub fn det(&self) -> f64 {
        let c = &self.0;
        c[0] * (c[1] * c[2] - c[4] * c[4]) - c[3] * (c[3] * c[2] - c[4] * c[5]) + c[5] * (c[3] * c[4] - c[1] * c[5])
    }
}

impl Add for SymTensor {
    type Output = SymTensor;
    fn add(self, rhs: SymTensor) -> SymTensor {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for SymTensor {
    fn add_assign(&mut self, rhs: SymTensor) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: SymTensor) -> SymTensor {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        out
    }
}

impl Neg for SymTensor {
    type Output = SymTensor;
    fn neg(self) -> SymTensor {
        self * -1.0
    }
}

impl Mul<f64> for SymTensor {
    type Output = SymTensor;
    fn mul(self, s: f64) -> SymTensor {
        SymTensor(self.0.map(|v| v * s))
    }
}

impl Mul<SymTensor> for f64 {
    type Output = SymTensor;
    fn mul(self, t: SymTensor) -> SymTensor {
        t * self
    }
}

/// General 3×3 tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor2(pub [[f64; 3]; 3]);

impl Tensor2 {
    pub const ZERO: Tensor2 = Tensor2([[0.0; 3]; 3]);

    pub fn identity() -> Self {
        Tensor2([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Cofactor `cof F = det(F) F⁻ᵀ`, computed from 2×2 minors.
    pub fn cof(&self) -> Tensor2 {
        let a = &self.0;
        let mut c = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                c[i][j] = a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1];
            }
        }
        Tensor2(c)
    }

    pub fn transpose(&self) -> Tensor2 {
        let a = &self.0;
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[j][i];
            }
        }
        Tensor2(t)
    }

    pub fn matmul(&self, other: &Tensor2) -> Tensor2 {
        let (a, b) = (&self.0, &other.0);
        let mut c = [[0.0; 3]; 3];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Tensor2(c)
    }

    pub fn ddot(&self, other: &Tensor2) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// Right Cauchy-Green tensor `C = FᵀF`.
    pub fn right_cauchy_green(&self) -> SymTensor {
        SymTensor::from_matrix(&self.transpose().matmul(self).0)
    }

    /// Symmetric part of `A Bᵀ`.
    pub fn sym_mul_transpose(&self, other: &Tensor2) -> SymTensor {
        SymTensor::from_matrix(&self.matmul(&other.transpose()).0)
    }

    pub fn scale(&self, s: f64) -> Tensor2 {
        Tensor2(self.0.map(|r| r.map(|v| v * s)))
    }

    pub fn axpy(&mut self, s: f64, other: &Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += s * other.0[i][j];
            }
        }
    }

    pub fn outer(a: &[f64; 3], b: &[f64; 3]) -> Tensor2 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i] * b[j];
            }
        }
        Tensor2(t)
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let a = &self.0;
        [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(self, rhs: Tensor2) -> Tensor2 {
        let mut out = self;
        out.axpy(1.0, &rhs);
        out
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(self, rhs: Tensor2) -> Tensor2 {
        let mut out = self;
        out.axpy(-1.0, &rhs);
        out
    }
}

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomp {
    pub values: [f64; 3],
    /// `vectors[a]` is the unit eigenvector of `values[a]`.
    pub vectors: [[f64; 3]; 3],
}

impl SpectralDecomp {
    /// `Σ f(λ_a) n_a ⊗ n_a`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymTensor {
        let mut out = SymTensor::ZERO;
        for a in 0..3 {
            out += SymTensor::outer(&self.vectors[a]) * f(self.values[a]);
        }
        out
    }

    pub fn reconstruct(&self) -> SymTensor {
        self.reconstruct_with(|x| x)
    }

    /// Rotation matrix whose columns are the eigenvectors.
    pub fn basis(&self) -> [[f64; 3]; 3] {
        let v = &self.vectors;
        [[v[0][0], v[1][0], v[2][0]], [v[0][1], v[1][1], v[2][1]], [v[0][2], v[1][2], v[2][2]]]
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;
const ANALYTIC_DEGENERACY_TOL: f64 = 1e-12;

/// Symmetric 3×3 eigen-decomposition, eigenvalues sorted descending.
///
/// Uses the trigonometric closed form for the eigenvalues with eigenvectors
/// from cross products of the rows of `A − λI`; falls back to cyclic Jacobi
/// when the spectrum is near-degenerate or the closed-form vectors fail the
/// reconstruction check.
pub fn eig_sym_sorted(a: &SymTensor) -> SpectralDecomp {
    let scale = a.max_abs();
    if scale == 0.0 {
        return SpectralDecomp { values: [0.0; 3], vectors: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };
    }
    if a.0[3] == 0.0 && a.0[4] == 0.0 && a.0[5] == 0.0 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| a.0[j].total_cmp(&a.0[i]));
        let mut vectors = [[0.0; 3]; 3];
        for (k, &i) in idx.iter().enumerate() {
            vectors[k][i] = 1.0;
        }
        return SpectralDecomp { values: idx.map(|i| a.0[i]), vectors };
    }
    if let Some(dec) = eig_analytic(a, scale) {
        if reconstruction_residual(a, &dec) <= 1e-12 * scale {
            return dec;
        }
    }
    eig_jacobi(a)
}

/// Like [`eig_sym_sorted`] but reports failure when the reconstruction
/// residual exceeds `1e-8·|A|`.
pub fn try_eig_sym_sorted(a: &SymTensor) -> Result<SpectralDecomp> {
    let dec = eig_sym_sorted(a);
    let residual = reconstruction_residual(a, &dec);
    if residual > 1e-8 * a.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::EigenNotConverged { residual });
    }
    Ok(dec)
}

pub fn reconstruction_residual(a: &SymTensor, dec: &SpectralDecomp) -> f64 {
    (dec.reconstruct() - *a).norm()
}

fn eig_analytic(a: &SymTensor, scale: f64) -> Option<SpectralDecomp> {
    let c = &a.0;
    let q = a.trace() / 3.0;
    let p1 = c[3] * c[3] + c[4] * c[4] + c[5] * c[5];
    let p2 = (c[0] - q).powi(2) + (c[1] - q).powi(2) + (c[2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p <= ANALYTIC_DEGENERACY_TOL * scale {
        return None;
    }
    let b = SymTensor([(c[0] - q) / p, (c[1] - q) / p, (c[2] - q) / p, c[3] / p, c[4] / p, c[5] / p]);
    let r = (b.det() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    // Relative gap below which cross-product vectors lose accuracy.
    let gap = (l1 - l2).min(l2 - l3);
    if gap <= 1e-6 * scale {
        return None;
    }
    let v1 = null_vector(a, l1)?;
    let v3 = null_vector(a, l3)?;
    let v3 = orthonormalize(&v3, &v1)?;
    let v2 = cross(&v3, &v1);
    Some(SpectralDecomp { values: [l1, l2, l3], vectors: [v1, v2, v3] })
}

fn null_vector(a: &SymTensor, lambda: f64) -> Option<[f64; 3]> {
    let mut m = a.to_matrix();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let candidates = [cross(&m[0], &m[1]), cross(&m[0], &m[2]), cross(&m[1], &m[2])];
    let best = candidates.iter().max_by(|x, y| norm3(x).total_cmp(&norm3(y))).copied()?;
    let n = norm3(&best);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(best.map(|v| v / n))
}

fn orthonormalize(v: &[f64; 3], against: &[f64; 3]) -> Option<[f64; 3]> {
    let d = dot3(v, against);
    let w = [0, 1, 2].map(|i| v[i] - d * against[i]);
    let n = norm3(&w);
    if n < 0.5 {
        return None;
    }
    Some(w.map(|x| x / n))
}

fn eig_jacobi(a: &SymTensor) -> SpectralDecomp {
    let mut m = a.to_matrix();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = a.max_abs();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        if off <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[p][q].abs() <= f64::MIN_POSITIVE {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // m ← Jᵀ m J
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values = order.map(|i| m[i][i]);
    let vectors = order.map(|i| [v[0][i], v[1][i], v[2][i]]);
    SpectralDecomp { values, vectors }
}

#[inline]
pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Spectral tension/compression split `ε = ε⁺ + ε⁻`.
pub fn split_strain_spectral(eps: &SymTensor) -> (SymTensor, SymTensor) {
    let dec = eig_sym_sorted(eps);
    let plus = dec.reconstruct_with(|x| macaulay(x, Sign::Plus));
    (plus, *eps - plus)
}

/// `A = (tr/3) I + dev`.
pub fn vol_dev_parts(a: &SymTensor) -> (f64, SymTensor) {
    (a.trace(), a.dev())
}

/// Directional derivative of the positive spectral projection `A ↦ A⁺`.
///
/// Evaluates `dA⁺ = Q (Θ ∘ (Qᵀ dA Q)) Qᵀ` where `Θ` holds the divided
/// differences of `⟨·⟩₊` over the eigenvalues (Daleckii-Krein). Coincident
/// eigenvalues fall back to the one-sided derivative.
pub fn positive_part_derivative(dec: &SpectralDecomp, da: &SymTensor) -> SymTensor {
    let lam = dec.values;
    let q = dec.basis();
    let qt = transpose3(&q);
    let local = SymTensor::from_matrix(&triple(&qt, &da.to_matrix(), &q));
    let mut m = local.to_matrix();
    let scale = lam.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for a in 0..3 {
        for b in 0..3 {
            let theta = if a == b || (lam[a] - lam[b]).abs() <= 1e-12 * scale {
                // Average the one-sided slopes at a repeated eigenvalue.
                0.5 * (heaviside(lam[a]) + heaviside(lam[b]))
            } else {
                (lam[a].max(0.0) - lam[b].max(0.0)) / (lam[a] - lam[b])
            };
            m[a][b] *= theta;
        }
    }
    SymTensor::from_matrix(&triple(&q, &m, &qt))
}

fn transpose3(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

fn triple(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3], c: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut ab = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ab[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| ab[i][k] * c[k][j]).sum();
        }
    }
    out
}

/// Isochoric invariants `(Ī₁, Ī₂, J)` of a deformation gradient.
///
/// `Ī₁ = J^{-2/3} F:F`, `Ī₂ = J^{-4/3} cof F : cof F`.
pub fn modified_invariants(f: &Tensor2) -> Result<(f64, f64, f64)> {
    let j = f.det();
    if j <= 0.0 {
        return Err(Error::NonPositiveJacobian(j));
    }
    let cof = f.cof();
    let i1 = j.powf(-2.0 / 3.0) * f.ddot(f);
    let i2 = j.powf(-4.0 / 3.0) * cof.ddot(&cof);
    Ok((i1, i2, j))
}

/// Singular values of `F` sorted descending, with right (`N_a`) and left
/// (`n_a = F N_a / λ_a`) principal directions.
#[derive(Debug, Clone, Copy)]
pub struct PrincipalStretches {
    pub stretches: [f64; 3],
    pub reference_dirs: [[f64; 3]; 3],
    pub current_dirs: [[f64; 3]; 3],
}

pub fn principal_stretches(f: &Tensor2) -> Result<PrincipalStretches> {
    let j = f.det();
    if j <= 0.0 {
        return Err(Error::NonPositiveJacobian(j));
    }
    let dec = eig_sym_sorted(&f.right_cauchy_green());
    let stretches = dec.values.map(|v| v.max(0.0).sqrt());
    let reference_dirs = dec.vectors;
    let mut current_dirs = [[0.0; 3]; 3];
    for a in 0..3 {
        let fn_a = f.apply(&reference_dirs[a]);
        current_dirs[a] = fn_a.map(|v| v / stretches[a]);
    }
    Ok(PrincipalStretches { stretches, reference_dirs, current_dirs })
}
