//! Structured mesh generators for the test cases and the convergence
//! harness: rectangles (uniform and graded) and a polygonal annulus.

use super::{BoundaryTag, MeshData};
use crate::Result;

/// Uniform triangulated rectangle: nx-by-ny cells, each split into two
/// triangles. All boundary faces carry `tag`.
pub fn rect_mesh(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    tag: BoundaryTag,
) -> Result<MeshData> {
    graded_rect_mesh(x0, x1, y0, y1, nx, ny, 1.0, tag)
}

/// Rectangle with geometric grading in x: cell widths grow by `ratio` from
/// left to right (ratio 1 gives the uniform mesh). Used to force multirate
/// level spreads on an otherwise plain domain.
pub fn graded_rect_mesh(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    ratio: f64,
    tag: BoundaryTag,
) -> Result<MeshData> {
    assert!(nx >= 1 && ny >= 1);
    // x breakpoints with geometric spacing
    let mut xs = Vec::with_capacity(nx + 1);
    if (ratio - 1.0).abs() < 1e-12 {
        for i in 0..=nx {
            xs.push(x0 + (x1 - x0) * i as f64 / nx as f64);
        }
    } else {
        let r = ratio.powf(1.0 / (nx as f64 - 1.0).max(1.0));
        let total: f64 = (0..nx).map(|i| r.powi(i as i32)).sum();
        let mut acc = 0.0;
        xs.push(x0);
        for i in 0..nx {
            acc += r.powi(i as i32) / total;
            xs.push(x0 + (x1 - x0) * acc);
        }
        xs[nx] = x1;
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vx = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut vy = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vx.push(xs[i]);
            vy.push(y0 + (y1 - y0) * j as f64 / ny as f64);
        }
    }
    let mut elements = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let a = vid(i, j);
            let b = vid(i + 1, j);
            let c = vid(i + 1, j + 1);
            let d = vid(i, j + 1);
            // alternate the diagonal for a less biased mesh
            if (i + j) % 2 == 0 {
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            } else {
                elements.push([a, b, d]);
                elements.push([b, c, d]);
            }
        }
    }
    let mut boundary = vec![];
    for i in 0..nx {
        boundary.push((vid(i, 0), vid(i + 1, 0), tag));
        boundary.push((vid(i, ny), vid(i + 1, ny), tag));
    }
    for j in 0..ny {
        boundary.push((vid(0, j), vid(0, j + 1), tag));
        boundary.push((vid(nx, j), vid(nx, j + 1), tag));
    }
    MeshData::from_topology(vx, vy, elements, boundary)
}

/// Polygonal annulus between radii r_inner and r_outer with `nr` radial and
/// `ntheta` azimuthal cells. The circles are approximated by straight
/// segments. Both boundaries carry `tag`.
pub fn annulus_mesh(
    r_inner: f64,
    r_outer: f64,
    nr: usize,
    ntheta: usize,
    tag: BoundaryTag,
) -> Result<MeshData> {
    assert!(nr >= 1 && ntheta >= 3 && r_inner > 0.0 && r_outer > r_inner);
    let vid = |i: usize, j: usize| j * ntheta + (i % ntheta);
    let mut vx = vec![];
    let mut vy = vec![];
    for j in 0..=nr {
        let r = r_inner + (r_outer - r_inner) * j as f64 / nr as f64;
        for i in 0..ntheta {
            let th = 2.0 * std::f64::consts::PI * i as f64 / ntheta as f64;
            vx.push(r * th.cos());
            vy.push(r * th.sin());
        }
    }
    let mut elements = vec![];
    for j in 0..nr {
        for i in 0..ntheta {
            let a = vid(i, j);
            let b = vid(i + 1, j);
            let c = vid(i + 1, j + 1);
            let d = vid(i, j + 1);
            if (i + j) % 2 == 0 {
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            } else {
                elements.push([a, b, d]);
                elements.push([b, c, d]);
            }
        }
    }
    let mut boundary = vec![];
    for i in 0..ntheta {
        boundary.push((vid(i, 0), vid(i + 1, 0), tag));
        boundary.push((vid(i, nr), vid(i + 1, nr), tag));
    }
    MeshData::from_topology(vx, vy, elements, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_counts_and_area() {
        let m = rect_mesh(0.0, 1.0, 0.0, 1.0, 4, 4, BoundaryTag::Wall).unwrap();
        assert_eq!(m.k(), 32);
        assert!((m.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn graded_mesh_spreads_element_sizes() {
        // a single tall row keeps the incircle driven by the graded widths
        let m = graded_rect_mesh(0.0, 1.0, 0.0, 0.3, 16, 1, 12.0, BoundaryTag::Wall).unwrap();
        let hmin = m.hk.iter().cloned().fold(f64::INFINITY, f64::min);
        let hmax = m.hk.iter().cloned().fold(0.0, f64::max);
        assert!(hmax / hmin > 4.0, "grading too weak: {}", hmax / hmin);
        assert!((m.total_area() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn annulus_closes() {
        let m = annulus_mesh(1.0, 4.0, 6, 24, BoundaryTag::Dirichlet).unwrap();
        assert_eq!(m.k(), 2 * 6 * 24);
        // area of the polygonal annulus is below the exact annulus area
        let exact = std::f64::consts::PI * (16.0 - 1.0);
        assert!(m.total_area() < exact);
        assert!(m.total_area() > 0.95 * exact);
        // all faces conforming: every interior face mutual
        for k in 0..m.k() {
            for f in 0..3 {
                if !m.is_boundary_face(k, f) {
                    let (k2, f2) = (m.etoe[k][f], m.etof[k][f]);
                    assert_eq!(m.etoe[k2][f2], k);
                }
            }
        }
    }
}
