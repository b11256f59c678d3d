//! Orthonormal polynomial basis on the master triangle and Vandermonde
//! matrices built from it.
//!
//! The master triangle has vertices (-1,-1), (1,-1), (-1,1). The basis is
//! the usual tensor construction on the collapsed square: it is orthonormal
//! in L2 over the master triangle, which makes the mass matrix (V V^T)^{-1}.

use super::jacobi::{grad_jacobi_p, jacobi_p};
use crate::linalg::Mat;

/// Map (r,s) on the triangle to collapsed coordinates (a,b).
/// The top vertex s=1 maps to a=-1 (the standard guarded limit).
#[inline]
fn rs_to_ab(r: f64, s: f64) -> (f64, f64) {
    let a = if (1.0 - s).abs() > 1e-13 { 2.0 * (1.0 + r) / (1.0 - s) - 1.0 } else { -1.0 };
    (a, s)
}

/// Mode (i,j) of the orthonormal basis evaluated at (r,s).
pub fn simplex_2d(r: f64, s: f64, i: usize, j: usize) -> f64 {
    let (a, b) = rs_to_ab(r, s);
    2f64.sqrt()
        * jacobi_p(a, 0, 0, i)
        * jacobi_p(b, 2 * i + 1, 0, j)
        * (1.0 - b).powi(i as i32)
}

/// Gradient (d/dr, d/ds) of mode (i,j) at (r,s).
pub fn grad_simplex_2d(r: f64, s: f64, i: usize, j: usize) -> (f64, f64) {
    let (a, b) = rs_to_ab(r, s);
    let fa = jacobi_p(a, 0, 0, i);
    let dfa = grad_jacobi_p(a, 0, 0, i);
    let gb = jacobi_p(b, 2 * i + 1, 0, j);
    let dgb = grad_jacobi_p(b, 2 * i + 1, 0, j);

    let half1mb = 0.5 * (1.0 - b);
    let pow_im1 = if i >= 1 { half1mb.powi(i as i32 - 1) } else { 1.0 };

    let mut dmodedr = dfa * gb;
    if i >= 1 {
        dmodedr *= pow_im1;
    }

    let mut dmodeds = dfa * (gb * 0.5 * (1.0 + a));
    if i >= 1 {
        dmodeds *= pow_im1;
    }
    let mut tmp = dgb * half1mb.powi(i as i32);
    if i >= 1 {
        tmp -= 0.5 * i as f64 * gb * pow_im1;
    }
    dmodeds += fa * tmp;

    let norm = 2f64.powf(i as f64 + 0.5);
    (dmodedr * norm, dmodeds * norm)
}

/// Mode index pairs (i,j) with i+j <= n, in the conventional ordering.
pub fn basis_indices(n: usize) -> Vec<(usize, usize)> {
    let mut idx = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in 0..=n {
        for j in 0..=n - i {
            idx.push((i, j));
        }
    }
    idx
}

/// Vandermonde matrix: V[p][m] = basis mode m at point p.
pub fn vandermonde_2d(n: usize, r: &[f64], s: &[f64]) -> Mat {
    let idx = basis_indices(n);
    Mat::from_fn(r.len(), idx.len(), |p, m| {
        let (i, j) = idx[m];
        simplex_2d(r[p], s[p], i, j)
    })
}

/// Derivative Vandermonde matrices (d/dr and d/ds of each mode at each point).
pub fn grad_vandermonde_2d(n: usize, r: &[f64], s: &[f64]) -> (Mat, Mat) {
    let idx = basis_indices(n);
    let mut vr = Mat::zeros(r.len(), idx.len());
    let mut vs = Mat::zeros(r.len(), idx.len());
    for p in 0..r.len() {
        for (m, &(i, j)) in idx.iter().enumerate() {
            let (dr, ds) = grad_simplex_2d(r[p], s[p], i, j);
            vr[(p, m)] = dr;
            vs[(p, m)] = ds;
        }
    }
    (vr, vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refel::quadrature::collapsed_rule;

    #[test]
    fn basis_orthonormal_on_triangle() {
        let n = 4;
        let rule = collapsed_rule(2 * n + 2);
        let idx = basis_indices(n);
        for (mi, &(i1, j1)) in idx.iter().enumerate() {
            for (mj, &(i2, j2)) in idx.iter().enumerate() {
                let dot: f64 = rule
                    .iter()
                    .map(|(r, s, w)| w * simplex_2d(r, s, i1, j1) * simplex_2d(r, s, i2, j2))
                    .sum();
                let expect = if mi == mj { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "modes {mi},{mj}: {dot}");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences_inside() {
        let eps = 1e-6;
        for &(r, s) in &[(-0.3, -0.4), (0.1, -0.7), (-0.8, 0.2)] {
            for &(i, j) in &[(0, 0), (1, 0), (0, 1), (2, 1), (1, 2)] {
                let (dr, ds) = grad_simplex_2d(r, s, i, j);
                let fdr = (simplex_2d(r + eps, s, i, j) - simplex_2d(r - eps, s, i, j))
                    / (2.0 * eps);
                let fds = (simplex_2d(r, s + eps, i, j) - simplex_2d(r, s - eps, i, j))
                    / (2.0 * eps);
                assert!((dr - fdr).abs() < 1e-6, "({i},{j}) at ({r},{s}): {dr} vs {fdr}");
                assert!((ds - fds).abs() < 1e-6, "({i},{j}) at ({r},{s}): {ds} vs {fds}");
            }
        }
    }
}
