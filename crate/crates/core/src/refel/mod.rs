//! Operators on the master triangle with vertices (-1,-1), (1,-1), (-1,1).

pub mod basis;
pub mod jacobi;
pub mod nodes;
pub mod quadrature;

use crate::linalg::Mat;
use crate::{Error, Result};
use basis::{basis_indices, grad_vandermonde_2d, vandermonde_2d};
use quadrature::{edge_rule, tri_rule, TriRule};

pub use nodes::MAX_ORDER;

/// Number of faces of a triangle.
pub const NFACES: usize = 3;

/// Quadrature strengths used when building a [`ReferenceElement`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Total degree integrated exactly by the volume cubature.
    pub cub_strength: usize,
    /// Gauss points per edge.
    pub ngauss: usize,
}

impl QuadratureSpec {
    /// Minimal strengths: cubature 2N, N+1 Gauss points per edge (exact
    /// through edge degree 2N+1).
    pub fn minimal(n: usize) -> Self {
        QuadratureSpec { cub_strength: 2 * n, ngauss: n + 1 }
    }

    /// Strengths that integrate the lake-at-rest balance exactly: cubature
    /// 3N-1 and edge rules exact through degree 3N. With these the volume
    /// and surface contributions of a steady free surface cancel to machine
    /// precision; the minimal rules leave an O(1) residual for N >= 2.
    pub fn balanced(n: usize) -> Self {
        QuadratureSpec { cub_strength: 3 * n - 1, ngauss: (3 * n + 2) / 2 }
    }
}

/// All order-dependent operators on the master triangle. Immutable after
/// construction and shareable across threads.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub n: usize,
    /// Interior node count (N+1)(N+2)/2.
    pub np: usize,
    /// Nodes per edge (N+1).
    pub nfp: usize,
    /// Interpolation nodes.
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// Indices of the three vertex nodes within (r, s).
    pub vertex_nodes: [usize; 3],
    /// Modal Vandermonde at the nodes and its inverse.
    pub vandermonde: Mat,
    pub inv_vandermonde: Mat,
    /// Nodal differentiation matrices.
    pub dr: Mat,
    pub ds: Mat,
    /// Mass matrix and inverse (reference element, J = 1).
    pub mass: Mat,
    pub inv_mass: Mat,
    /// Integration weights of the nodal basis functions (M * 1); dotting
    /// with nodal values integrates the polynomial over the master triangle.
    pub node_int_weights: Vec<f64>,
    /// Volume cubature.
    pub cub_r: Vec<f64>,
    pub cub_s: Vec<f64>,
    pub cub_w: Vec<f64>,
    pub cub_strength: usize,
    /// Edge Gauss rule (per edge; 3*ngauss trace points total).
    pub gauss_x: Vec<f64>,
    pub gauss_w: Vec<f64>,
    pub ngauss: usize,
    /// Nodes -> cubature values (Ncub x Np).
    pub interp_cub: Mat,
    /// Nodes -> edge Gauss values, face-major ((3*Ngauss) x Np).
    pub interp_gauss: Mat,
    /// Weighted projection operators (Np x Ncub): inv_mass * Ic^T * W and
    /// the derivative-weighted variants used by the volume kernel.
    pub proj_p: Mat,
    pub proj_pr: Mat,
    pub proj_ps: Mat,
    /// Surface lift (Np x 3*Ngauss): inv_mass * Ig^T * Wg.
    pub lift_gauss: Mat,
    /// L2 projection onto P1 in nodal form (Np x Np).
    pub proj_p1: Mat,
    /// Interpolation from the three vertex values of a linear function to
    /// all nodes (Np x 3).
    pub vertex_interp: Mat,
    /// Values of the nodal basis at the three reference edge midpoints
    /// (3 x Np).
    pub face_mid_interp: Mat,
    /// Total polynomial degree of each modal basis function.
    pub mode_degree: Vec<usize>,
}

impl ReferenceElement {
    /// Element with the minimal quadrature strengths.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_quadrature(n, QuadratureSpec::minimal(n))
    }

    /// Element with quadrature strong enough for exact well-balancing.
    pub fn balanced(n: usize) -> Result<Self> {
        Self::with_quadrature(n, QuadratureSpec::balanced(n))
    }

    pub fn with_quadrature(n: usize, quad: QuadratureSpec) -> Result<Self> {
        if n < 1 || n > MAX_ORDER {
            return Err(Error::config(format!(
                "polynomial order {n} outside supported range 1..={MAX_ORDER}"
            )));
        }
        if quad.cub_strength < 2 * n {
            return Err(Error::config(format!(
                "cubature strength {} below 2N = {}",
                quad.cub_strength,
                2 * n
            )));
        }
        let (r, s) = nodes::build_nodes(n)?;
        let np = r.len();
        let vertex_nodes = nodes::vertex_indices(&r, &s);

        let vandermonde = vandermonde_2d(n, &r, &s);
        let inv_vandermonde = vandermonde.inverse().map_err(|_| {
            Error::Construction("singular Vandermonde: degenerate node set".into())
        })?;
        let (vr, vs) = grad_vandermonde_2d(n, &r, &s);
        let dr = vr.matmul(&inv_vandermonde);
        let ds = vs.matmul(&inv_vandermonde);

        let mass = inv_vandermonde.transpose().matmul(&inv_vandermonde);
        let inv_mass = vandermonde.matmul(&vandermonde.transpose());
        let node_int_weights: Vec<f64> =
            (0..np).map(|i| mass.row(i).iter().sum()).collect();

        let cub: TriRule = tri_rule(quad.cub_strength);
        let interp_cub = vandermonde_2d(n, &cub.r, &cub.s).matmul(&inv_vandermonde);
        let (cvr, cvs) = grad_vandermonde_2d(n, &cub.r, &cub.s);
        let dcr = cvr.matmul(&inv_vandermonde);
        let dcs = cvs.matmul(&inv_vandermonde);

        let mut proj_p = inv_mass.matmul(&interp_cub.transpose());
        proj_p.scale_cols(&cub.w);
        let mut proj_pr = inv_mass.matmul(&dcr.transpose());
        proj_pr.scale_cols(&cub.w);
        let mut proj_ps = inv_mass.matmul(&dcs.transpose());
        proj_ps.scale_cols(&cub.w);

        let er = edge_rule(quad.ngauss);
        let ngauss = quad.ngauss;
        let (gr, gs) = gauss_trace_points(&er.x);
        let interp_gauss = vandermonde_2d(n, &gr, &gs).matmul(&inv_vandermonde);
        let mut lift_gauss = inv_mass.matmul(&interp_gauss.transpose());
        let wg_all: Vec<f64> = (0..NFACES).flat_map(|_| er.w.iter().copied()).collect();
        lift_gauss.scale_cols(&wg_all);

        let mode_degree: Vec<usize> = basis_indices(n).iter().map(|&(i, j)| i + j).collect();
        let trunc = Mat::from_fn(np, np, |i, j| {
            if i == j && mode_degree[i] <= 1 {
                1.0
            } else {
                0.0
            }
        });
        let proj_p1 = vandermonde.matmul(&trunc).matmul(&inv_vandermonde);

        // barycentric coordinates of each node give linear interpolation
        // from vertex values
        let vertex_interp = Mat::from_fn(np, 3, |i, v| match v {
            0 => -(r[i] + s[i]) / 2.0,
            1 => (1.0 + r[i]) / 2.0,
            _ => (1.0 + s[i]) / 2.0,
        });

        let mid_r = [0.0, 0.0, -1.0];
        let mid_s = [-1.0, 0.0, 0.0];
        let face_mid_interp =
            vandermonde_2d(n, &mid_r, &mid_s).matmul(&inv_vandermonde);

        Ok(ReferenceElement {
            n,
            np,
            nfp: n + 1,
            r,
            s,
            vertex_nodes,
            vandermonde,
            inv_vandermonde,
            dr,
            ds,
            mass,
            inv_mass,
            node_int_weights,
            cub_r: cub.r,
            cub_s: cub.s,
            cub_w: cub.w,
            cub_strength: cub.strength,
            gauss_x: er.x,
            gauss_w: er.w,
            ngauss,
            interp_cub,
            interp_gauss,
            proj_p,
            proj_pr,
            proj_ps,
            lift_gauss,
            proj_p1,
            vertex_interp,
            face_mid_interp,
            mode_degree,
        })
    }

    pub fn ncub(&self) -> usize {
        self.cub_w.len()
    }

    /// Total trace points (3 * ngauss).
    pub fn ngauss_total(&self) -> usize {
        NFACES * self.ngauss
    }

    /// Mean of a nodal polynomial over the master triangle (area 2).
    pub fn mean(&self, nodal: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (w, v) in self.node_int_weights.iter().zip(nodal) {
            acc += w * v;
        }
        acc / 2.0
    }

    /// Write every operator matrix as plain text (row-major, one row per
    /// line) for cross-implementation comparison.
    pub fn dump_operators(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        let mats: [(&str, &Mat); 9] = [
            ("vandermonde", &self.vandermonde),
            ("dr", &self.dr),
            ("ds", &self.ds),
            ("interp_cub", &self.interp_cub),
            ("interp_gauss", &self.interp_gauss),
            ("proj_p", &self.proj_p),
            ("proj_pr", &self.proj_pr),
            ("proj_ps", &self.proj_ps),
            ("lift_gauss", &self.lift_gauss),
        ];
        for (name, m) in mats {
            writeln!(out, "# {name} {}x{}", m.nrows(), m.ncols())?;
            for i in 0..m.nrows() {
                let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.17e}")).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Map the 1D Gauss points onto the three faces; face-major ordering.
/// Faces: 0 is s=-1, 1 is the hypotenuse r+s=0, 2 is r=-1, each traversed
/// counterclockwise (vertex 0 -> 1 -> 2 -> 0).
fn gauss_trace_points(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ng = x.len();
    let mut r = Vec::with_capacity(NFACES * ng);
    let mut s = Vec::with_capacity(NFACES * ng);
    for &xi in x {
        r.push(xi);
        s.push(-1.0);
    }
    for &xi in x {
        r.push(-xi);
        s.push(xi);
    }
    for &xi in x {
        r.push(-1.0);
        s.push(-xi);
    }
    (r, s)
}
