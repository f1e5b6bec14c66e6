//! CSV load curves, legacy VTK field dumps and the run manifest.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::mesh::Mesh;
use crate::fem::staggered::StepRecord;

pub const CSV_HEADER: [&str; 6] = ["step", "u_mm", "F_N", "max_z", "iters", "seconds"];

/// Streaming writer for the load-displacement curve.
pub struct CurveWriter {
    inner: csv::Writer<File>,
}

impl CurveWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut inner = csv::Writer::from_path(path)?;
        inner.write_record(CSV_HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn push(&mut self, r: &StepRecord) -> Result<()> {
        self.inner.write_record([
            r.step.to_string(),
            r.u_mm.to_string(),
            r.force.to_string(),
            r.max_z.to_string(),
            r.iterations.to_string(),
            format!("{:.6}", r.seconds),
        ])?;
        self.inner.flush()?;
        Ok(())
    }
}

/// One row of a curve file.
#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
#[allow(non_snake_case)]
pub struct CurveRow {
    pub step: usize,
    pub u_mm: f64,
    pub F_N: f64,
    pub max_z: f64,
    pub iters: usize,
    pub seconds: f64,
}

pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Legacy VTK (ASCII, version 3.0) unstructured grid with point data `z`
/// and `displacement`. Floats use the shortest round-trip representation.
pub fn write_vtk(path: &Path, mesh: &Mesh, u: &[f64], z: &[f64], title: &str) -> Result<()> {
    let dim = mesh.dim();
    let n = mesh.n_nodes();
    let npe = mesh.npe();
    let ne = mesh.n_elements();
    let mut s = String::with_capacity(64 * n);
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str(title.lines().next().unwrap_or(""));
    s.push_str("\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    let _ = writeln!(s, "CELLS {ne} {}", ne * (npe + 1));
    for e in 0..ne {
        s.push_str(&npe.to_string());
        for &i in mesh.element(e) {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    let ct = mesh.kind.vtk_cell_type();
    for _ in 0..ne {
        let _ = writeln!(s, "{ct}");
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    s.push_str("SCALARS z double 1\nLOOKUP_TABLE default\n");
    for v in z {
        let _ = writeln!(s, "{v}");
    }
    s.push_str("VECTORS displacement double\n");
    for i in 0..n {
        let c = |k: usize| if k < dim { u[i * dim + k] } else { 0.0 };
        let _ = writeln!(s, "{} {} {}", c(0), c(1), c(2));
    }
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(s.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Contents of a legacy VTK file written by [`write_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkField {
    pub points: Vec<[f64; 3]>,
    pub cells: Vec<Vec<usize>>,
    pub cell_types: Vec<u8>,
    pub z: Vec<f64>,
    pub displacement: Vec<[f64; 3]>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn read_vtk(path: &Path) -> Result<VtkField> {
    let rdr = BufReader::new(File::open(path)?);
    let mut lines = rdr.lines();
    let mut next = move || -> Result<String> {
        loop {
            match lines.next() {
                Some(l) => {
                    let l = l?;
                    if !l.trim().is_empty() {
                        return Ok(l);
                    }
                }
                None => return Err(parse_err("unexpected end of VTK file")),
            }
        }
    };
    let head = next()?;
    if !head.starts_with("# vtk DataFile") {
        return Err(parse_err("not a legacy VTK file"));
    }
    let _title = next()?;
    if next()?.trim() != "ASCII" {
        return Err(parse_err("only ASCII VTK is supported"));
    }
    if next()?.trim() != "DATASET UNSTRUCTURED_GRID" {
        return Err(parse_err("expected DATASET UNSTRUCTURED_GRID"));
    }
    let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| parse_err(format!("{s}: {e}"))) };
    let int = |s: &str| -> Result<usize> { s.parse::<usize>().map_err(|e| parse_err(format!("{s}: {e}"))) };
    let header = |line: String, key: &str| -> Result<usize> {
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(parse_err(format!("expected {key}, got `{line}`")));
        }
        it.next().ok_or_else(|| parse_err(format!("{key} without count"))).and_then(int)
    };
    let n = header(next()?, "POINTS")?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let l = next()?;
        let v: Vec<&str> = l.split_whitespace().collect();
        if v.len() != 3 {
            return Err(parse_err(format!("bad point line `{l}`")));
        }
        points.push([num(v[0])?, num(v[1])?, num(v[2])?]);
    }
    let ne = header(next()?, "CELLS")?;
    let mut cells = Vec::with_capacity(ne);
    for _ in 0..ne {
        let l = next()?;
        let v = l.split_whitespace().map(int).collect::<Result<Vec<usize>>>()?;
        if v.is_empty() || v.len() != v[0] + 1 {
            return Err(parse_err(format!("bad cell line `{l}`")));
        }
        cells.push(v[1..].to_vec());
    }
    let nt = header(next()?, "CELL_TYPES")?;
    let mut cell_types = Vec::with_capacity(nt);
    for _ in 0..nt {
        cell_types.push(next()?.trim().parse::<u8>().map_err(|e| parse_err(e.to_string()))?);
    }
    let np = header(next()?, "POINT_DATA")?;
    if np != n {
        return Err(parse_err("POINT_DATA count differs from POINTS"));
    }
    let mut z = Vec::new();
    let mut displacement = Vec::new();
    while let Ok(l) = next() {
        let t = l.trim().to_string();
        if t.starts_with("SCALARS z") {
            let _lut = next()?;
            for _ in 0..n {
                z.push(num(next()?.trim())?);
            }
        } else if t.starts_with("VECTORS displacement") {
            for _ in 0..n {
                let l = next()?;
                let v: Vec<&str> = l.split_whitespace().collect();
                if v.len() != 3 {
                    return Err(parse_err(format!("bad vector line `{l}`")));
                }
                displacement.push([num(v[0])?, num(v[1])?, num(v[2])?]);
            }
        } else {
            return Err(parse_err(format!("unexpected line `{t}`")));
        }
    }
    if z.len() != n || displacement.len() != n {
        return Err(parse_err("missing z or displacement point data"));
    }
    Ok(VtkField { points, cells, cell_types, z, displacement })
}

/// Pretty JSON of any serializable value.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
