//! Warp & Blend interpolation nodes on the master triangle.
//!
//! Equidistributed nodes on the equilateral triangle are warped edge-by-edge
//! toward the 1D Gauss-Lobatto distribution and blended into the interior,
//! then mapped to (r,s) coordinates on the master triangle. The per-order
//! blend parameter is the published optimized value.

use super::jacobi::{gauss_lobatto, jacobi_p};
use crate::linalg::Mat;
use crate::{Error, Result};

/// Optimized blend parameter per order (index = N-1).
const ALPHA_OPT: [f64; 15] = [
    0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959,
    1.5743, 1.5770, 1.6223, 1.6258,
];

pub const MAX_ORDER: usize = 8;

/// 1D warp from equidistributed to Gauss-Lobatto spacing, evaluated at the
/// projected coordinates `rout`.
fn warp_factor(n: usize, rout: &[f64]) -> Vec<f64> {
    let lgl = gauss_lobatto(n);
    let req: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();

    // Lagrange basis of the equispaced nodes evaluated at rout, obtained by
    // solving Veq^T L = P against the 1D modal basis.
    let veq_t = Mat::from_fn(n + 1, n + 1, |i, j| jacobi_p(req[i], 0, 0, j)).transpose();
    let pmat = Mat::from_fn(n + 1, rout.len(), |i, p| jacobi_p(rout[p], 0, 0, i));
    let lmat = veq_t.solve(&pmat).expect("equispaced 1D Vandermonde is nonsingular");

    let mut warp = vec![0.0; rout.len()];
    for (p, w) in warp.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=n {
            acc += lmat[(i, p)] * (lgl[i] - req[i]);
        }
        *w = acc;
    }
    // scale by the edge bubble so the warp vanishes at the endpoints
    for (p, w) in warp.iter_mut().enumerate() {
        let x = rout[p];
        if x.abs() < 1.0 - 1e-10 {
            *w /= 1.0 - x * x;
        } else {
            *w = 0.0;
        }
    }
    warp
}

/// Warp & Blend nodes for order `n`; returns (r, s) on the master triangle.
pub fn build_nodes(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 || n > MAX_ORDER {
        return Err(Error::config(format!(
            "polynomial order {n} outside supported range 1..={MAX_ORDER}"
        )));
    }
    let alpha = ALPHA_OPT[n - 1];
    let np = (n + 1) * (n + 2) / 2;

    // equidistributed barycentric coordinates
    let mut l1 = Vec::with_capacity(np);
    let mut l2 = Vec::with_capacity(np);
    let mut l3 = Vec::with_capacity(np);
    for i in 0..=n {
        for j in 0..=n - i {
            l1.push(i as f64 / n as f64);
            l3.push(j as f64 / n as f64);
            l2.push(1.0 - (i + j) as f64 / n as f64);
        }
    }

    // positions on the equilateral triangle
    let mut x: Vec<f64> = (0..np).map(|k| -l2[k] + l3[k]).collect();
    let mut y: Vec<f64> = (0..np).map(|k| (-l2[k] - l3[k] + 2.0 * l1[k]) / 3f64.sqrt()).collect();

    // edge warps blended into the interior
    let d1: Vec<f64> = (0..np).map(|k| l3[k] - l2[k]).collect();
    let d2: Vec<f64> = (0..np).map(|k| l1[k] - l3[k]).collect();
    let d3: Vec<f64> = (0..np).map(|k| l2[k] - l1[k]).collect();
    let w1 = warp_factor(n, &d1);
    let w2 = warp_factor(n, &d2);
    let w3 = warp_factor(n, &d3);

    for k in 0..np {
        let blend1 = 4.0 * l2[k] * l3[k];
        let blend2 = 4.0 * l1[k] * l3[k];
        let blend3 = 4.0 * l1[k] * l2[k];
        let warp1 = blend1 * w1[k] * (1.0 + (alpha * l1[k]).powi(2));
        let warp2 = blend2 * w2[k] * (1.0 + (alpha * l2[k]).powi(2));
        let warp3 = blend3 * w3[k] * (1.0 + (alpha * l3[k]).powi(2));
        x[k] += warp1 + (2.0 * std::f64::consts::PI / 3.0).cos() * warp2
            + (4.0 * std::f64::consts::PI / 3.0).cos() * warp3;
        y[k] += (2.0 * std::f64::consts::PI / 3.0).sin() * warp2
            + (4.0 * std::f64::consts::PI / 3.0).sin() * warp3;
    }

    // equilateral (x,y) -> master (r,s)
    let mut r = vec![0.0; np];
    let mut s = vec![0.0; np];
    for k in 0..np {
        let lam1 = (3f64.sqrt() * y[k] + 1.0) / 3.0;
        let lam2 = (-3.0 * x[k] - 3f64.sqrt() * y[k] + 2.0) / 6.0;
        let lam3 = (3.0 * x[k] - 3f64.sqrt() * y[k] + 2.0) / 6.0;
        r[k] = -lam2 + lam3 - lam1;
        s[k] = -lam2 - lam3 + lam1;
    }
    Ok((r, s))
}

/// Indices of the nodes sitting at the three master-triangle vertices,
/// ordered ((-1,-1), (1,-1), (-1,1)).
pub fn vertex_indices(r: &[f64], s: &[f64]) -> [usize; 3] {
    let find = |vr: f64, vs: f64| {
        r.iter()
            .zip(s)
            .position(|(&ri, &si)| (ri - vr).abs() < 1e-10 && (si - vs).abs() < 1e-10)
            .expect("vertex node present in Warp & Blend set")
    };
    [find(-1.0, -1.0), find(1.0, -1.0), find(-1.0, 1.0)]
}

/// Indices of nodes lying on face f (within tol), ordered along the face.
/// Faces: 0 is s=-1 from (-1,-1) to (1,-1); 1 is r+s=0 from (1,-1) to
/// (-1,1); 2 is r=-1 from (-1,1) to (-1,-1).
pub fn face_node_indices(r: &[f64], s: &[f64], face: usize) -> Vec<usize> {
    let on_face: Vec<usize> = (0..r.len())
        .filter(|&k| match face {
            0 => (s[k] + 1.0).abs() < 1e-12,
            1 => (r[k] + s[k]).abs() < 1e-12,
            2 => (r[k] + 1.0).abs() < 1e-12,
            _ => panic!("face index out of range"),
        })
        .collect();
    let mut sorted = on_face;
    sorted.sort_by(|&a, &b| match face {
        0 => r[a].total_cmp(&r[b]),
        1 => s[a].total_cmp(&s[b]),
        2 => s[b].total_cmp(&s[a]),
        _ => unreachable!(),
    });
    sorted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_is_vertices() {
        let (r, s) = build_nodes(1).unwrap();
        assert_eq!(r.len(), 3);
        let expect = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
        for &(er, es) in &expect {
            assert!(
                r.iter().zip(&s).any(|(&ri, &si)| (ri - er).abs() < 1e-14
                    && (si - es).abs() < 1e-14),
                "vertex ({er},{es}) missing"
            );
        }
    }

    #[test]
    fn order_two_adds_edge_midpoints() {
        // the warp vanishes at edge midpoints, so N=2 gives vertices plus
        // the three midpoints
        let (r, s) = build_nodes(2).unwrap();
        assert_eq!(r.len(), 6);
        let expect =
            [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (0.0, -1.0), (0.0, 0.0), (-1.0, 0.0)];
        for &(er, es) in &expect {
            assert!(
                r.iter().zip(&s).any(|(&ri, &si)| (ri - er).abs() < 1e-12
                    && (si - es).abs() < 1e-12),
                "node ({er},{es}) missing"
            );
        }
    }

    #[test]
    fn order_five_counts() {
        let (r, s) = build_nodes(5).unwrap();
        assert_eq!(r.len(), 21);
        for f in 0..3 {
            assert_eq!(face_node_indices(&r, &s, f).len(), 6, "face {f}");
        }
    }

    #[test]
    fn nodes_symmetric_under_triangle_group() {
        for n in 1..=MAX_ORDER {
            let (r, s) = build_nodes(n).unwrap();
            let key = |ri: f64, si: f64| {
                let mut l = [-(ri + si) / 2.0, (1.0 + ri) / 2.0, (1.0 + si) / 2.0];
                l.sort_by(f64::total_cmp);
                [
                    (l[0] * 1e12).round() as i64,
                    (l[1] * 1e12).round() as i64,
                    (l[2] * 1e12).round() as i64,
                ]
            };
            let mut orig: Vec<_> = r.iter().zip(&s).map(|(&a, &b)| key(a, b)).collect();
            // rotation: cyclic permutation of barycentric coordinates maps the
            // sorted key to itself, so symmetry reduces to multiset equality of
            // sorted keys counted with multiplicity
            let mut counts = std::collections::HashMap::new();
            for k in &orig {
                *counts.entry(*k).or_insert(0usize) += 1;
            }
            // each orbit size must divide 6 and fill the node set
            let total: usize = counts.values().sum();
            assert_eq!(total, r.len());
            orig.sort();
            // reflected set equals original set
            let mut refl: Vec<_> = r.iter().zip(&s).map(|(&a, &b)| key(b, a)).collect();
            refl.sort();
            assert_eq!(orig, refl, "order {n}");
        }
    }

    #[test]
    fn each_edge_has_nfp_nodes() {
        for n in 1..=MAX_ORDER {
            let (r, s) = build_nodes(n).unwrap();
            for f in 0..3 {
                assert_eq!(face_node_indices(&r, &s, f).len(), n + 1, "order {n} face {f}");
            }
        }
    }

    #[test]
    fn out_of_range_order_rejected() {
        assert!(build_nodes(0).is_err());
        assert!(build_nodes(9).is_err());
    }
}
