//! Post-processing: peak load, kink angle and crack-nucleation locus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::mesh::Mesh;
use crate::scenario::output::{CurveRow, VtkField};

/// Peak force and the displacement at which it occurs.
pub fn f_max(rows: &[CurveRow]) -> Option<(f64, f64)> {
    rows.iter().filter(|r| r.F_N.is_finite()).fold(None, |best: Option<(f64, f64)>, r| match best {
        Some((f, _)) if f >= r.F_N => best,
        _ => Some((r.F_N, r.u_mm)),
    })
}

/// Element centroids and element-averaged phase field.
pub fn element_field(mesh: &Mesh, z: &[f64]) -> (Vec<[f64; 3]>, Vec<f64>) {
    let c = (0..mesh.n_elements()).map(|e| mesh.centroid(e)).collect();
    let zc = (0..mesh.n_elements())
        .map(|e| {
            let el = mesh.element(e);
            el.iter().map(|&i| z[i]).sum::<f64>() / el.len() as f64
        })
        .collect();
    (c, zc)
}

pub fn element_field_vtk(f: &VtkField) -> (Vec<[f64; 3]>, Vec<f64>) {
    let mut c = Vec::with_capacity(f.cells.len());
    let mut zc = Vec::with_capacity(f.cells.len());
    for cell in &f.cells {
        let k = cell.len() as f64;
        let mut p = [0.0; 3];
        let mut s = 0.0;
        for &i in cell {
            for d in 0..3 {
                p[d] += f.points[i][d] / k;
            }
            s += f.z[i] / k;
        }
        c.push(p);
        zc.push(s);
    }
    (c, zc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkWindow {
    pub r_min: f64,
    pub r_max: f64,
    /// Elements with averaged `z` above this count as cracked.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkResult {
    /// 180° is straight continuation; below the notch line gives less.
    pub angle_deg: f64,
    /// Signed direction of the crack path relative to the notch line;
    /// negative below it.
    pub deviation_deg: f64,
    pub points: usize,
}

/// Angle of the least-squares line through cracked element centroids in the
/// annulus `r_min ≤ |x − tip| ≤ r_max` (in the x-y plane), oriented away from
/// the tip. The notch runs along +x into the tip.
pub fn kink_angle(centroids: &[[f64; 3]], zc: &[f64], tip: [f64; 3], w: &KinkWindow) -> Result<KinkResult> {
    let pts: Vec<[f64; 2]> = centroids
        .iter()
        .zip(zc)
        .filter(|(c, &z)| {
            let r = ((c[0] - tip[0]).powi(2) + (c[1] - tip[1]).powi(2)).sqrt();
            z > w.threshold && r >= w.r_min && r <= w.r_max
        })
        .map(|(c, _)| [c[0] - tip[0], c[1] - tip[1]])
        .collect();
    if pts.len() < 3 {
        return Err(Error::NoCrackFound(format!(
            "{} cracked elements in the window [{}, {}] around the tip",
            pts.len(),
            w.r_min,
            w.r_max
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Principal axis of the 2x2 scatter matrix.
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (mut dx, mut dy) = (phi.cos(), phi.sin());
    if dx * mx + dy * my < 0.0 {
        dx = -dx;
        dy = -dy;
    }
    let theta = dy.atan2(dx).to_degrees();
    Ok(KinkResult { angle_deg: 180.0 + theta, deviation_deg: theta, points: pts.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nucleation {
    pub step: usize,
    pub u_mm: f64,
    pub node: usize,
    pub position: [f64; 3],
}

/// Node with the largest `z` if it exceeds `threshold`.
pub fn nucleation_node(z: &[f64], threshold: f64) -> Option<usize> {
    let (i, &v) = z.iter().enumerate().fold((0, &f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    (v > threshold).then_some(i)
}
