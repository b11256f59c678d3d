//! Normalized Jacobi polynomials and Gauss-type quadrature on [-1, 1].

use crate::linalg::sym_tridiag_eigen;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Gamma function restricted to positive integer arguments.
fn gamma_int(n: usize) -> f64 {
    assert!(n >= 1);
    factorial(n - 1)
}

/// Evaluate the orthonormal Jacobi polynomial P_n^{(alpha,beta)} at x.
///
/// Normalized so that the polynomials are orthonormal on [-1,1] with weight
/// (1-x)^alpha (1+x)^beta. alpha and beta are non-negative integers here.
pub fn jacobi_p(x: f64, alpha: usize, beta: usize, n: usize) -> f64 {
    let (a, b) = (alpha as f64, beta as f64);
    let gamma0 = 2f64.powf(a + b + 1.0) / (a + b + 1.0) * gamma_int(alpha + 1)
        * gamma_int(beta + 1)
        / gamma_int(alpha + beta + 1);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * gamma0;
    let p1 = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut aold = 2.0 / (2.0 + a + b) * ((a + 1.0) * (b + 1.0) / (a + b + 3.0)).sqrt();
    let mut pm2 = p0;
    let mut pm1 = p1;
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + a + b;
        let anew = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + a + b) * (i + 1.0 + a) * (i + 1.0 + b)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let bnew = -(a * a - b * b) / h1 / (h1 + 2.0);
        let p = (-aold * pm2 + (x - bnew) * pm1) / anew;
        pm2 = pm1;
        pm1 = p;
        aold = anew;
    }
    pm1
}

/// Derivative of the orthonormal Jacobi polynomial.
pub fn grad_jacobi_p(x: f64, alpha: usize, beta: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let nf = n as f64;
        (nf * (nf + alpha as f64 + beta as f64 + 1.0)).sqrt()
            * jacobi_p(x, alpha + 1, beta + 1, n - 1)
    }
}

/// Gauss quadrature for the Jacobi weight (1-x)^alpha (1+x)^beta: returns
/// n+1 nodes and weights, exact for polynomials of degree 2n+1 against the
/// weight. Golub-Welsch on the symmetric recurrence matrix.
pub fn jacobi_gq(alpha: usize, beta: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (alpha as f64, beta as f64);
    let mu0 = 2f64.powf(a + b + 1.0) / (a + b + 1.0) * gamma_int(alpha + 1)
        * gamma_int(beta + 1)
        / gamma_int(alpha + beta + 1);
    if n == 0 {
        return (vec![-(a - b) / (a + b + 2.0)], vec![mu0]);
    }
    let mut diag = vec![0.0; n + 1];
    diag[0] = (b - a) / (a + b + 2.0);
    for (k, d) in diag.iter_mut().enumerate().skip(1) {
        let k = k as f64;
        *d = (b * b - a * a) / ((2.0 * k + a + b) * (2.0 * k + a + b + 2.0));
    }
    let mut off = vec![0.0; n];
    for (k, e) in off.iter_mut().enumerate() {
        let k = (k + 1) as f64;
        *e = 2.0 / (2.0 * k + a + b)
            * (k * (k + a + b) * (k + a) * (k + b)
                / ((2.0 * k + a + b - 1.0) * (2.0 * k + a + b + 1.0)))
                .sqrt();
    }
    let (nodes, firsts) = sym_tridiag_eigen(&diag, &off);
    let weights = firsts.iter().map(|v| v * v * mu0).collect();
    (nodes, weights)
}

/// Gauss-Legendre rule with `npts` points, exact through degree 2*npts-1.
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1);
    jacobi_gq(0, 0, npts - 1)
}

/// Gauss-Lobatto-Legendre nodes (n+1 points including the endpoints).
pub fn gauss_lobatto(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![-1.0, 1.0];
    }
    let (interior, _) = jacobi_gq(1, 1, n - 2);
    let mut x = Vec::with_capacity(n + 1);
    x.push(-1.0);
    x.extend(interior);
    x.push(1.0);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_orthonormal() {
        let (x, w) = gauss_legendre(10);
        for m in 0..6 {
            for n in 0..6 {
                let dot: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| wi * jacobi_p(xi, 0, 0, m) * jacobi_p(xi, 0, 0, n))
                    .sum();
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-13, "m={m} n={n} dot={dot}");
            }
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        // spec example: integral of x^2 over [-1,1] = 2/3 with any rule >= 2 pts
        let (x, w) = gauss_legendre(2);
        let v: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi * xi).sum();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);

        // degree 2n-1 exactness: monomials against npts = 4
        let (x, w) = gauss_legendre(4);
        for p in 0..=7usize {
            let v: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(p as i32)).sum();
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert!((v - exact).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn jacobi_gq_weight_sums() {
        // total weight = integral of (1-x) over [-1,1] = 2
        let (_, w) = jacobi_gq(1, 0, 3);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn lobatto_endpoints_and_symmetry() {
        for n in 1..=8 {
            let x = gauss_lobatto(n);
            assert_eq!(x.len(), n + 1);
            assert!((x[0] + 1.0).abs() < 1e-15);
            assert!((x[n] - 1.0).abs() < 1e-15);
            for i in 0..=n {
                assert!((x[i] + x[n - i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn grad_jacobi_matches_finite_difference() {
        let eps = 1e-6;
        for n in 0..6 {
            for &x in &[-0.7, -0.1, 0.3, 0.9] {
                let fd = (jacobi_p(x + eps, 0, 0, n) - jacobi_p(x - eps, 0, 0, n)) / (2.0 * eps);
                let an = grad_jacobi_p(x, 0, 0, n);
                assert!((fd - an).abs() < 1e-6, "n={n} x={x}");
            }
        }
    }
}
