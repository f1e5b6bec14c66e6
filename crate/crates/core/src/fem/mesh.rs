//! Structured mesh generators and per-element quadrature data.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Line2,
    Tri3,
    Hex8,
}

impl ElementKind {
    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementKind::Line2 => 2,
            ElementKind::Tri3 => 3,
            ElementKind::Hex8 => 8,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ElementKind::Line2 => 1,
            ElementKind::Tri3 => 2,
            ElementKind::Hex8 => 3,
        }
    }

    /// Legacy-VTK cell type id.
    pub fn vtk_cell_type(self) -> u8 {
        match self {
            ElementKind::Line2 => 3,
            ElementKind::Tri3 => 5,
            ElementKind::Hex8 => 12,
        }
    }
}

/// Horizontal slit embedded by duplicating the nodes of a grid line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitSpec {
    pub y: f64,
    pub x_start: f64,
    pub x_end: f64,
}

/// Slit as realized in a mesh; `tip` is the crack tip inside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    pub spec: SlitSpec,
    pub tip: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub kind: ElementKind,
    pub nodes: Vec<[f64; 3]>,
    /// Flat connectivity, `nodes_per_element` entries per element.
    pub conn: Vec<usize>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub slit: Option<Slit>,
    /// Characteristic element size used for the `l_c ≥ 2h` check.
    pub h: f64,
}

type NodePredicate<'a> = Box<dyn Fn(&[f64; 3]) -> bool + 'a>;

impl Mesh {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn npe(&self) -> usize {
        self.kind.nodes_per_element()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.conn.len() / self.npe()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let n = self.npe();
        &self.conn[e * n..(e + 1) * n]
    }

    pub fn centroid(&self, e: usize) -> [f64; 3] {
        let el = self.element(e);
        let mut c = [0.0; 3];
        for &n in el {
            for k in 0..3 {
                c[k] += self.nodes[n][k];
            }
        }
        c.map(|v| v / el.len() as f64)
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize]> {
        self.node_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::InvalidMesh(format!("unknown node set `{name}`")))
    }

    fn add_set(&mut self, name: &str, mut nodes: Vec<usize>) {
        nodes.sort_unstable();
        nodes.dedup();
        self.node_sets.insert(name.to_string(), nodes);
    }

    /// Uniform 1D mesh of `n` elements on `[x0, x1]`; set `center` holds the
    /// midpoint node when `n` is even.
    pub fn line(n: usize, x0: f64, x1: f64) -> Result<Mesh> {
        if n < 2 || !(x1 > x0) {
            return Err(Error::InvalidMesh(format!("line mesh needs n >= 2 and x1 > x0 (n = {n})")));
        }
        let h = (x1 - x0) / n as f64;
        let nodes = (0..=n).map(|i| [x0 + i as f64 * h, 0.0, 0.0]).collect();
        let conn = (0..n).flat_map(|e| [e, e + 1]).collect();
        let mut mesh = Mesh { kind: ElementKind::Line2, nodes, conn, node_sets: BTreeMap::new(), slit: None, h };
        mesh.add_set("left", vec![0]);
        mesh.add_set("right", vec![n]);
        if n.is_multiple_of(2) {
            mesh.add_set("center", vec![n / 2]);
        }
        Ok(mesh)
    }

    /// Rectangular plate `[0, width] × [0, height]` on an `nx × ny` grid with
    /// every cell split into four triangles through a cell-center node.
    ///
    /// A slit is embedded by duplicating the grid-line nodes on
    /// `x_start ≤ x < x_end` (the tip node at `x_end` stays shared); cells
    /// above the seam are connected to the duplicates.
    pub fn structured_plate(nx: usize, ny: usize, width: f64, height: f64, slit: Option<SlitSpec>) -> Result<Mesh> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidMesh(format!("plate grid {nx}x{ny} too small")));
        }
        let (hx, hy) = (width / nx as f64, height / ny as f64);
        let corner = |i: usize, j: usize| j * (nx + 1) + i;
        let mut nodes: Vec<[f64; 3]> = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([i as f64 * hx, j as f64 * hy, 0.0]);
            }
        }
        let center0 = nodes.len();
        for j in 0..ny {
            for i in 0..nx {
                nodes.push([(i as f64 + 0.5) * hx, (j as f64 + 0.5) * hy, 0.0]);
            }
        }

        // Seam: grid row js, columns is..ie are duplicated.
        let mut dup: BTreeMap<usize, usize> = BTreeMap::new();
        let mut realized = None;
        if let Some(s) = slit {
            let tol = 1e-9 * width.max(height);
            let fj = s.y / hy;
            let fi0 = s.x_start / hx;
            let fi1 = s.x_end / hx;
            let aligned = |f: f64, step: f64| ((f - f.round()) * step).abs() <= tol;
            if !(aligned(fj, hy) && aligned(fi0, hx) && aligned(fi1, hx)) {
                return Err(Error::InvalidSlit(format!(
                    "slit y={}, x=[{}, {}] not on grid lines (hx={hx}, hy={hy})",
                    s.y, s.x_start, s.x_end
                )));
            }
            let js = fj.round() as i64;
            let (i0, i1) = (fi0.round() as i64, fi1.round() as i64);
            if js <= 0 || js >= ny as i64 || i0 < 0 || i1 > nx as i64 || i1 <= i0 {
                return Err(Error::InvalidSlit(format!(
                    "slit y={}, x=[{}, {}] outside the plate interior",
                    s.y, s.x_start, s.x_end
                )));
            }
            if i0 > 0 && i1 < nx as i64 {
                return Err(Error::InvalidSlit("slit must start or end on a vertical edge".into()));
            }
            let js = js as usize;
            // Open the seam from the boundary up to (excluding) the tip.
            let (range, tip_i) =
                if i0 == 0 { (0..i1 as usize, i1 as usize) } else { (i0 as usize + 1..nx + 1, i0 as usize) };
            for i in range {
                let orig = corner(i, js);
                dup.insert(orig, nodes.len());
                nodes.push(nodes[orig]);
            }
            realized = Some(Slit { spec: s, tip: nodes[corner(tip_i, js)] });
            realized.as_mut().unwrap().spec.y = js as f64 * hy;
        }
        let seam_row = realized.map(|s| (s.spec.y / hy).round() as usize);

        let mut conn = Vec::with_capacity(12 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let mut a = corner(i, j);
                let mut b = corner(i + 1, j);
                let (c, d) = (corner(i + 1, j + 1), corner(i, j + 1));
                if seam_row == Some(j) {
                    // Cells directly above the seam use the duplicates.
                    a = *dup.get(&a).unwrap_or(&a);
                    b = *dup.get(&b).unwrap_or(&b);
                }
                let m = center0 + j * nx + i;
                conn.extend_from_slice(&[a, b, m, b, c, m, c, d, m, d, a, m]);
            }
        }

        let mut mesh =
            Mesh { kind: ElementKind::Tri3, nodes, conn, node_sets: BTreeMap::new(), slit: realized, h: hx.max(hy) };
        let tol = 1e-9 * width.max(height);
        let pick = |f: &dyn Fn(&[f64; 3]) -> bool, m: &Mesh| -> Vec<usize> {
            (0..m.nodes.len()).filter(|&n| f(&m.nodes[n])).collect()
        };
        let bottom = pick(&|p| p[1].abs() <= tol, &mesh);
        let top = pick(&|p| (p[1] - height).abs() <= tol, &mesh);
        let left = pick(&|p| p[0].abs() <= tol, &mesh);
        let right = pick(&|p| (p[0] - width).abs() <= tol, &mesh);
        mesh.add_set("bottom", bottom);
        mesh.add_set("top", top);
        mesh.add_set("left", left);
        mesh.add_set("right", right);
        if !dup.is_empty() {
            mesh.add_set("slit_lower", dup.keys().cloned().collect());
            mesh.add_set("slit_upper", dup.values().cloned().collect());
        }
        Ok(mesh)
    }

    /// Disc of the given diameter from concentric rings: ring `k` has radius
    /// `k R / rings` and `6k` nodes. Sets `top_arc`/`bottom_arc` hold the
    /// outer nodes within the arc width `arc` around ±90°, `top_center` and
    /// `bottom_center` the nodes at exactly ±90° (requires even `rings`).
    pub fn disc(diameter: f64, rings: usize, arc: f64) -> Result<Mesh> {
        if rings < 2 || !rings.is_multiple_of(2) {
            return Err(Error::InvalidMesh(format!("disc needs an even ring count >= 2, got {rings}")));
        }
        if !(arc > 0.0 && arc < diameter) {
            return Err(Error::InvalidMesh(format!("load arc width {arc} outside (0, D)")));
        }
        let r = 0.5 * diameter;
        let mut nodes = vec![[0.0, 0.0, 0.0]];
        let mut first = vec![0usize];
        for k in 1..=rings {
            first.push(nodes.len());
            let n = 6 * k;
            let rk = r * k as f64 / rings as f64;
            for i in 0..n {
                let t = 2.0 * PI * i as f64 / n as f64;
                nodes.push([rk * t.cos(), rk * t.sin(), 0.0]);
            }
        }
        let ring_size = |k: usize| if k == 0 { 1 } else { 6 * k };
        let mut conn = Vec::new();
        for k in 1..=rings {
            let (n1, n2) = (ring_size(k - 1), ring_size(k));
            let inner = |i: usize| if k == 1 { 0 } else { first[k - 1] + i % n1 };
            let outer = |j: usize| first[k] + j % n2;
            let (mut i, mut j) = (0usize, 0usize);
            if k == 1 {
                for j in 0..n2 {
                    conn.extend_from_slice(&[0, outer(j), outer(j + 1)]);
                }
                continue;
            }
            while i < n1 || j < n2 {
                let a_in = (i + 1) as f64 / n1 as f64;
                let a_out = (j + 1) as f64 / n2 as f64;
                if j < n2 && (i == n1 || a_out <= a_in) {
                    conn.extend_from_slice(&[inner(i), outer(j), outer(j + 1)]);
                    j += 1;
                } else {
                    conn.extend_from_slice(&[inner(i), outer(j), inner(i + 1)]);
                    i += 1;
                }
            }
        }
        let mut mesh =
            Mesh { kind: ElementKind::Tri3, nodes, conn, node_sets: BTreeMap::new(), slit: None, h: r / rings as f64 };
        let n_out = 6 * rings;
        let outer: Vec<usize> = (0..n_out).map(|j| first[rings] + j).collect();
        let half = 0.5 * arc / r;
        let within = |n: usize, center: f64| {
            let p = mesh.nodes[n];
            let t = p[1].atan2(p[0]);
            let mut d = (t - center).abs();
            if d > PI {
                d = 2.0 * PI - d;
            }
            d <= half + 1e-12
        };
        let top: Vec<usize> = outer.iter().cloned().filter(|&n| within(n, 0.5 * PI)).collect();
        let bottom: Vec<usize> = outer.iter().cloned().filter(|&n| within(n, -0.5 * PI)).collect();
        let top_c = first[rings] + n_out / 4;
        let bot_c = first[rings] + 3 * n_out / 4;
        mesh.add_set("top_arc", top);
        mesh.add_set("bottom_arc", bottom);
        mesh.add_set("top_center", vec![top_c]);
        mesh.add_set("bottom_center", vec![bot_c]);
        mesh.add_set("boundary", outer);
        Ok(mesh)
    }

    /// Box `[0,lx]×[0,ly]×[0,lz]` of trilinear hexes. Face sets `x0`, `x1`,
    /// `y0`, `y1`, `bottom` (z = 0), `top` (z = lz), and `top_patch`: top
    /// nodes in the centered square of side `patch`.
    pub fn block(nx: usize, ny: usize, nz: usize, lx: f64, ly: f64, lz: f64, patch: f64) -> Result<Mesh> {
        if nx < 1 || ny < 1 || nz < 1 {
            return Err(Error::InvalidMesh("block needs at least one cell per direction".into()));
        }
        let (hx, hy, hz) = (lx / nx as f64, ly / ny as f64, lz / nz as f64);
        let id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    nodes.push([i as f64 * hx, j as f64 * hy, k as f64 * hz]);
                }
            }
        }
        let mut conn = Vec::with_capacity(8 * nx * ny * nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    conn.extend_from_slice(&[
                        id(i, j, k),
                        id(i + 1, j, k),
                        id(i + 1, j + 1, k),
                        id(i, j + 1, k),
                        id(i, j, k + 1),
                        id(i + 1, j, k + 1),
                        id(i + 1, j + 1, k + 1),
                        id(i, j + 1, k + 1),
                    ]);
                }
            }
        }
        let mut mesh = Mesh {
            kind: ElementKind::Hex8,
            nodes,
            conn,
            node_sets: BTreeMap::new(),
            slit: None,
            h: hx.max(hy).max(hz),
        };
        let tol = 1e-9 * lx.max(ly).max(lz);
        let sets: [(&str, NodePredicate); 7] = [
            ("x0", Box::new(|p: &[f64; 3]| p[0].abs() <= tol)),
            ("x1", Box::new(move |p: &[f64; 3]| (p[0] - lx).abs() <= tol)),
            ("y0", Box::new(|p: &[f64; 3]| p[1].abs() <= tol)),
            ("y1", Box::new(move |p: &[f64; 3]| (p[1] - ly).abs() <= tol)),
            ("bottom", Box::new(|p: &[f64; 3]| p[2].abs() <= tol)),
            ("top", Box::new(move |p: &[f64; 3]| (p[2] - lz).abs() <= tol)),
            (
                "top_patch",
                Box::new(move |p: &[f64; 3]| {
                    (p[2] - lz).abs() <= tol
                        && (p[0] - 0.5 * lx).abs() <= 0.5 * patch + tol
                        && (p[1] - 0.5 * ly).abs() <= 0.5 * patch + tol
                }),
            ),
        ];
        for (name, f) in sets.iter() {
            let v: Vec<usize> = (0..mesh.nodes.len()).filter(|&n| f(&mesh.nodes[n])).collect();
            mesh.add_set(name, v);
        }
        Ok(mesh)
    }

    /// Nodes on the outer boundary (2D: edges used by one element; 3D: box faces).
    pub fn boundary_nodes(&self) -> Vec<usize> {
        use std::collections::HashMap;
        let mut out = Vec::new();
        match self.kind {
            ElementKind::Line2 => {
                let mut count = vec![0usize; self.n_nodes()];
                for &n in &self.conn {
                    count[n] += 1;
                }
                out = (0..self.n_nodes()).filter(|&n| count[n] == 1).collect();
            }
            ElementKind::Tri3 => {
                let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
                for e in 0..self.n_elements() {
                    let el = self.element(e);
                    for k in 0..3 {
                        let (a, b) = (el[k], el[(k + 1) % 3]);
                        *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                    }
                }
                for ((a, b), c) in edges {
                    if c == 1 {
                        out.push(a);
                        out.push(b);
                    }
                }
            }
            ElementKind::Hex8 => {
                for name in ["x0", "x1", "y0", "y1", "bottom", "top"] {
                    if let Some(s) = self.node_sets.get(name) {
                        out.extend_from_slice(s);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Shape-function values, physical gradients and weights at every
/// quadrature point of every element.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub dim: usize,
    pub npe: usize,
    pub nqp: usize,
    /// `N_a(ξ_q)`, shared by all elements: `nqp × npe`.
    pub shape: Vec<f64>,
    /// `∂N_a/∂x_i`: `n_elements × nqp × npe × dim`.
    pub grad: Vec<f64>,
    /// `w_q det J`: `n_elements × nqp`.
    pub weight: Vec<f64>,
}

impl Geometry {
    pub fn new(mesh: &Mesh) -> Result<Geometry> {
        let dim = mesh.dim();
        let npe = mesh.npe();
        let nel = mesh.n_elements();
        let (shape, ref_grads, ref_w) = reference_rule(mesh.kind);
        let nqp = ref_w.len();
        let mut grad = vec![0.0; nel * nqp * npe * dim];
        let mut weight = vec![0.0; nel * nqp];
        for e in 0..nel {
            let el = mesh.element(e);
            for q in 0..nqp {
                // Jacobian J_ij = Σ_a x_a,i ∂N_a/∂ξ_j.
                let mut jac = [[0.0; 3]; 3];
                for a in 0..npe {
                    for i in 0..dim {
                        for j in 0..dim {
                            jac[i][j] += mesh.nodes[el[a]][i] * ref_grads[(q * npe + a) * dim + j];
                        }
                    }
                }
                let (det, inv) = invert(&jac, dim);
                if !(det > 0.0) {
                    return Err(Error::NonPositiveJacobian(det));
                }
                weight[e * nqp + q] = ref_w[q] * det;
                for a in 0..npe {
                    for i in 0..dim {
                        // ∂N/∂x_i = Σ_j ∂N/∂ξ_j (J⁻¹)_ji
                        let mut s = 0.0;
                        for j in 0..dim {
                            s += ref_grads[(q * npe + a) * dim + j] * inv[j][i];
                        }
                        grad[((e * nqp + q) * npe + a) * dim + i] = s;
                    }
                }
            }
        }
        Ok(Geometry { dim, npe, nqp, shape, grad, weight })
    }

    #[inline]
    pub fn grads(&self, e: usize, q: usize) -> &[f64] {
        let n = self.npe * self.dim;
        let o = (e * self.nqp + q) * n;
        &self.grad[o..o + n]
    }

    #[inline]
    pub fn shape_at(&self, q: usize) -> &[f64] {
        &self.shape[q * self.npe..(q + 1) * self.npe]
    }

    #[inline]
    pub fn w(&self, e: usize, q: usize) -> f64 {
        self.weight[e * self.nqp + q]
    }
}

fn invert(j: &[[f64; 3]; 3], dim: usize) -> (f64, [[f64; 3]; 3]) {
    let mut inv = [[0.0; 3]; 3];
    match dim {
        1 => {
            inv[0][0] = 1.0 / j[0][0];
            (j[0][0], inv)
        }
        2 => {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            inv[0][0] = j[1][1] / det;
            inv[0][1] = -j[0][1] / det;
            inv[1][0] = -j[1][0] / det;
            inv[1][1] = j[0][0] / det;
            (det, inv)
        }
        _ => {
            let t = crate::tensor::Tensor2(*j);
            let det = t.det();
            let cof = t.cof();
            for a in 0..3 {
                for b in 0..3 {
                    inv[a][b] = cof.0[b][a] / det;
                }
            }
            (det, inv)
        }
    }
}

/// `(N, ∂N/∂ξ, w)` on the reference element.
fn reference_rule(kind: ElementKind) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    match kind {
        ElementKind::Line2 => (vec![0.5, 0.5], vec![-0.5, 0.5], vec![2.0]),
        ElementKind::Tri3 => (vec![1.0 / 3.0; 3], vec![-1.0, -1.0, 1.0, 0.0, 0.0, 1.0], vec![0.5]),
        ElementKind::Hex8 => {
            let g = 1.0 / 3.0f64.sqrt();
            let corners: [[f64; 3]; 8] = [
                [-1.0, -1.0, -1.0],
                [1.0, -1.0, -1.0],
                [1.0, 1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
                [1.0, -1.0, 1.0],
                [1.0, 1.0, 1.0],
                [-1.0, 1.0, 1.0],
            ];
            let mut n = Vec::new();
            let mut dn = Vec::new();
            let mut w = Vec::new();
            for q in corners.iter() {
                let xi = q.map(|c| c * g);
                for c in corners.iter() {
                    n.push(0.125 * (1.0 + c[0] * xi[0]) * (1.0 + c[1] * xi[1]) * (1.0 + c[2] * xi[2]));
                }
                for c in corners.iter() {
                    dn.push(0.125 * c[0] * (1.0 + c[1] * xi[1]) * (1.0 + c[2] * xi[2]));
                    dn.push(0.125 * c[1] * (1.0 + c[0] * xi[0]) * (1.0 + c[2] * xi[2]));
                    dn.push(0.125 * c[2] * (1.0 + c[0] * xi[0]) * (1.0 + c[1] * xi[1]));
                }
                w.push(1.0);
            }
            (n, dn, w)
        }
    }
}
