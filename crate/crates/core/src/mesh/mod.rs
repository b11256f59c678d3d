//! Triangulation topology, face connectivity and per-element geometry.

mod connectivity;
pub mod format;
pub mod generators;

use crate::refel::NFACES;
use crate::{Error, Result};

/// Boundary condition tag attached to boundary faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Wall,
    Dirichlet,
    Outflow,
}

impl std::str::FromStr for BoundaryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall" => Ok(BoundaryTag::Wall),
            "dirichlet" => Ok(BoundaryTag::Dirichlet),
            "outflow" => Ok(BoundaryTag::Outflow),
            other => Err(Error::config(format!("unknown boundary tag '{other}'"))),
        }
    }
}

/// Triangulation with connectivity and geometric factors.
///
/// Face f of element [v0,v1,v2] joins local vertices (f, (f+1)%3), matching
/// the reference-element face numbering. `etoe[k][f] == k` marks a boundary
/// face (self-reference convention).
#[derive(Debug, Clone)]
pub struct MeshData {
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub elements: Vec<[usize; 3]>,
    pub etoe: Vec<[usize; NFACES]>,
    pub etof: Vec<[usize; NFACES]>,
    /// Tag per boundary face; `None` on interior faces.
    pub face_tag: Vec<[Option<BoundaryTag>; NFACES]>,
    /// Affine map factors, constant per straight-sided triangle.
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub jac: Vec<f64>,
    /// Outward unit normals and surface Jacobians per face.
    pub nx: Vec<[f64; NFACES]>,
    pub ny: Vec<[f64; NFACES]>,
    pub s_jac: Vec<[f64; NFACES]>,
    /// Characteristic length: the incircle diameter.
    pub hk: Vec<f64>,
    /// Number of elements whose orientation was flipped to counterclockwise
    /// during loading.
    pub orientation_flips: usize,
}

impl MeshData {
    /// Number of elements.
    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn nvertices(&self) -> usize {
        self.vx.len()
    }

    /// Topology-only mesh from raw arrays; orientation normalized to
    /// counterclockwise. Connectivity and geometry are built afterwards.
    pub fn from_topology(
        vx: Vec<f64>,
        vy: Vec<f64>,
        elements: Vec<[usize; 3]>,
        boundary: Vec<(usize, usize, BoundaryTag)>,
    ) -> Result<Self> {
        let mut mesh = MeshData {
            vx,
            vy,
            elements,
            etoe: vec![],
            etof: vec![],
            face_tag: vec![],
            rx: vec![],
            ry: vec![],
            sx: vec![],
            sy: vec![],
            jac: vec![],
            nx: vec![],
            ny: vec![],
            s_jac: vec![],
            hk: vec![],
            orientation_flips: 0,
        };
        mesh.validate_and_orient()?;
        mesh.build_connectivity()?;
        mesh.apply_boundary_tags(&boundary)?;
        mesh.compute_geometry()?;
        Ok(mesh)
    }

    /// Parse a mesh file (bespoke `$nodes/$elements/$boundary` format, or
    /// Gmsh v2 ASCII when the file starts with `$MeshFormat`) and build
    /// connectivity and geometry.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (vx, vy, elements, boundary) = if text.trim_start().starts_with("$MeshFormat") {
            format::parse_gmsh(text)?
        } else {
            format::parse_native(text)?
        };
        Self::from_topology(vx, vy, elements, boundary)
    }

    fn validate_and_orient(&mut self) -> Result<()> {
        let nv = self.vx.len();
        for (k, e) in self.elements.iter_mut().enumerate() {
            for &v in e.iter() {
                if v >= nv {
                    return Err(Error::mesh(format!(
                        "element {k} references vertex {v} beyond vertex count {nv}"
                    )));
                }
            }
            if e[0] == e[1] || e[1] == e[2] || e[0] == e[2] {
                return Err(Error::mesh(format!("element {k} repeats a vertex index")));
            }
            let ax = self.vx[e[1]] - self.vx[e[0]];
            let ay = self.vy[e[1]] - self.vy[e[0]];
            let bx = self.vx[e[2]] - self.vx[e[0]];
            let by = self.vy[e[2]] - self.vy[e[0]];
            let twice_area = ax * by - ay * bx;
            if twice_area == 0.0 {
                return Err(Error::mesh(format!("element {k} is degenerate (zero area)")));
            }
            if twice_area < 0.0 {
                e.swap(1, 2);
                self.orientation_flips += 1;
            }
        }
        Ok(())
    }

    fn apply_boundary_tags(&mut self, tags: &[(usize, usize, BoundaryTag)]) -> Result<()> {
        use std::collections::HashMap;
        let mut by_pair: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for k in 0..self.k() {
            for f in 0..NFACES {
                if self.etoe[k][f] == k && self.etof[k][f] == f {
                    let (a, b) = self.face_vertices(k, f);
                    by_pair.insert((a.min(b), a.max(b)), (k, f));
                }
            }
        }
        for &(a, b, tag) in tags {
            match by_pair.get(&(a.min(b), a.max(b))) {
                Some(&(k, f)) => self.face_tag[k][f] = Some(tag),
                None => {
                    return Err(Error::mesh(format!(
                        "boundary tag names vertex pair ({a}, {b}) which is not a boundary face"
                    )))
                }
            }
        }
        // untagged boundary faces default to reflective walls
        for k in 0..self.k() {
            for f in 0..NFACES {
                if self.etoe[k][f] == k && self.etof[k][f] == f && self.face_tag[k][f].is_none() {
                    self.face_tag[k][f] = Some(BoundaryTag::Wall);
                }
            }
        }
        Ok(())
    }

    /// Global vertex indices of face f of element k, in traversal order.
    pub fn face_vertices(&self, k: usize, f: usize) -> (usize, usize) {
        let e = &self.elements[k];
        (e[f], e[(f + 1) % 3])
    }

    fn compute_geometry(&mut self) -> Result<()> {
        let k = self.k();
        self.rx = vec![0.0; k];
        self.ry = vec![0.0; k];
        self.sx = vec![0.0; k];
        self.sy = vec![0.0; k];
        self.jac = vec![0.0; k];
        self.nx = vec![[0.0; NFACES]; k];
        self.ny = vec![[0.0; NFACES]; k];
        self.s_jac = vec![[0.0; NFACES]; k];
        self.hk = vec![0.0; k];
        for e in 0..k {
            let [v0, v1, v2] = self.elements[e];
            let (x0, y0) = (self.vx[v0], self.vy[v0]);
            let (x1, y1) = (self.vx[v1], self.vy[v1]);
            let (x2, y2) = (self.vx[v2], self.vy[v2]);
            let xr = (x1 - x0) / 2.0;
            let yr = (y1 - y0) / 2.0;
            let xs = (x2 - x0) / 2.0;
            let ys = (y2 - y0) / 2.0;
            let j = xr * ys - xs * yr;
            if j <= 0.0 {
                return Err(Error::mesh(format!("element {e} has nonpositive Jacobian")));
            }
            self.jac[e] = j;
            self.rx[e] = ys / j;
            self.ry[e] = -xs / j;
            self.sx[e] = -yr / j;
            self.sy[e] = xr / j;

            // outward normals: rotate each face tangent by -90 degrees
            let tangents = [
                (xr, yr),           // face 0: v0 -> v1
                (xs - xr, ys - yr), // face 1: v1 -> v2
                (-xs, -ys),         // face 2: v2 -> v0
            ];
            for (f, &(tx, ty)) in tangents.iter().enumerate() {
                let len = (tx * tx + ty * ty).sqrt();
                self.nx[e][f] = ty / len;
                self.ny[e][f] = -tx / len;
                // reference edges have length 2, physical edge length 2*len
                self.s_jac[e][f] = len;
            }

            let la = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            let lb = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt();
            let lc = ((x0 - x2).powi(2) + (y0 - y2).powi(2)).sqrt();
            let area = 2.0 * j;
            self.hk[e] = 4.0 * area / (la + lb + lc);
        }
        Ok(())
    }

    /// Physical coordinates of reference points (r,s) inside element k.
    pub fn map_to_physical(&self, k: usize, r: &[f64], s: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let [v0, v1, v2] = self.elements[k];
        let (x0, y0) = (self.vx[v0], self.vy[v0]);
        let (x1, y1) = (self.vx[v1], self.vy[v1]);
        let (x2, y2) = (self.vx[v2], self.vy[v2]);
        let mut x = Vec::with_capacity(r.len());
        let mut y = Vec::with_capacity(r.len());
        for (&ri, &si) in r.iter().zip(s) {
            let l0 = -(ri + si) / 2.0;
            let l1 = (1.0 + ri) / 2.0;
            let l2 = (1.0 + si) / 2.0;
            x.push(l0 * x0 + l1 * x1 + l2 * x2);
            y.push(l0 * y0 + l1 * y1 + l2 * y2);
        }
        (x, y)
    }

    /// Centroid of element k.
    pub fn centroid(&self, k: usize) -> (f64, f64) {
        let [v0, v1, v2] = self.elements[k];
        (
            (self.vx[v0] + self.vx[v1] + self.vx[v2]) / 3.0,
            (self.vy[v0] + self.vy[v1] + self.vy[v2]) / 3.0,
        )
    }

    /// Midpoint of face f of element k.
    pub fn face_midpoint(&self, k: usize, f: usize) -> (f64, f64) {
        let (a, b) = self.face_vertices(k, f);
        ((self.vx[a] + self.vx[b]) / 2.0, (self.vy[a] + self.vy[b]) / 2.0)
    }

    /// Total mesh area.
    pub fn total_area(&self) -> f64 {
        self.jac.iter().map(|j| 2.0 * j).sum()
    }

    /// Locate the element containing (x,y); returns (element, r, s).
    /// Brute force scan, intended for sampling and diagnostics.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, f64, f64)> {
        let tol = 1e-9;
        for k in 0..self.k() {
            let [v0, v1, v2] = self.elements[k];
            let (x0, y0) = (self.vx[v0], self.vy[v0]);
            let (x1, y1) = (self.vx[v1], self.vy[v1]);
            let (x2, y2) = (self.vx[v2], self.vy[v2]);
            let det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
            let l1 = ((x - x0) * (y2 - y0) - (x2 - x0) * (y - y0)) / det;
            let l2 = ((x1 - x0) * (y - y0) - (x - x0) * (y1 - y0)) / det;
            let l0 = 1.0 - l1 - l2;
            if l0 >= -tol && l1 >= -tol && l2 >= -tol {
                let r = -l0 + l1 - l2;
                let s = -l0 - l1 + l2;
                return Some((k, r, s));
            }
        }
        None
    }
}
