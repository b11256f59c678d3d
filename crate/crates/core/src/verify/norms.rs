//! L2 error norms against exact solutions, least-squares convergence fits
//! and pointwise EOC fields.

use super::TestCase;
use crate::kernels::FieldLayout;
use crate::linalg::Mat;
use crate::mesh::MeshData;
use crate::refel::basis::vandermonde_2d;
use crate::refel::quadrature::collapsed_rule;
use crate::refel::ReferenceElement;
use crate::{Error, Result};

/// L2 errors of (h, hu, hv) against the exact solution at absolute time t,
/// via overintegration (strength 2N+2). With a region predicate, only
/// elements whose centroid satisfies it contribute; an empty region gives
/// zero errors.
pub fn l2_error(
    re: &ReferenceElement,
    mesh: &MeshData,
    layout: &FieldLayout,
    case: &TestCase,
    t_abs: f64,
    region: Option<&dyn Fn(f64, f64) -> bool>,
) -> [f64; 3] {
    let rule = collapsed_rule(2 * re.n + 2);
    let interp = vandermonde_2d(re.n, &rule.r, &rule.s).matmul(&re.inv_vandermonde);
    let nq = rule.len();
    let mut acc = [0.0f64; 3];
    let mut num = [vec![0.0; nq], vec![0.0; nq], vec![0.0; nq]];
    for e in 0..mesh.k() {
        if let Some(f) = region {
            let (cx, cy) = mesh.centroid(e);
            if !f(cx, cy) {
                continue;
            }
        }
        let r = layout.nodal(e);
        interp.matvec(&layout.fields.h[r.clone()], &mut num[0]);
        interp.matvec(&layout.fields.hu[r.clone()], &mut num[1]);
        interp.matvec(&layout.fields.hv[r], &mut num[2]);
        let (x, y) = mesh.map_to_physical(e, &rule.r, &rule.s);
        for q in 0..nq {
            let (h, u, v) = case.exact(x[q], y[q], t_abs);
            let wj = rule.w[q] * mesh.jac[e];
            acc[0] += wj * (num[0][q] - h).powi(2);
            acc[1] += wj * (num[1][q] - h * u).powi(2);
            acc[2] += wj * (num[2][q] - h * v).powi(2);
        }
    }
    [acc[0].sqrt(), acc[1].sqrt(), acc[2].sqrt()]
}

/// L2 norm of the exact depth over the region (companion to [`l2_error`]
/// for relative comparisons).
pub fn l2_exact_depth(
    re: &ReferenceElement,
    mesh: &MeshData,
    case: &TestCase,
    t_abs: f64,
    region: Option<&dyn Fn(f64, f64) -> bool>,
) -> f64 {
    let rule = collapsed_rule(2 * re.n + 2);
    let mut acc = 0.0;
    for e in 0..mesh.k() {
        if let Some(f) = region {
            let (cx, cy) = mesh.centroid(e);
            if !f(cx, cy) {
                continue;
            }
        }
        let (x, y) = mesh.map_to_physical(e, &rule.r, &rule.s);
        for q in 0..rule.len() {
            let (h, _, _) = case.exact(x[q], y[q], t_abs);
            acc += rule.w[q] * mesh.jac[e] * h * h;
        }
    }
    acc.sqrt()
}

/// Least-squares slope of log e against log H.
pub fn eoc_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Usage("EOC fit needs at least two points".into()));
    }
    for &(h, e) in points {
        if !(h > 0.0) || !(e > 0.0) {
            return Err(Error::Usage(format!("nonpositive EOC point (H={h}, e={e})")));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::Usage("EOC fit needs distinct H values".into()));
    }
    Ok((n * sxy - sx * sy) / denom)
}

/// Pointwise EOC from errors at two resolutions on a common sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointEoc {
    Value(f64),
    /// Both errors at machine zero; excluded from statistics.
    Exact,
}

pub fn pointwise_eoc(
    err_coarse: &[f64],
    err_fine: &[f64],
    h_coarse: f64,
    h_fine: f64,
) -> Result<Vec<PointEoc>> {
    if err_coarse.len() != err_fine.len() {
        return Err(Error::Usage("mismatched sample grids in pointwise EOC".into()));
    }
    if !(h_coarse > h_fine) {
        return Err(Error::Usage("pointwise EOC needs h_coarse > h_fine".into()));
    }
    let scale = (h_coarse / h_fine).ln();
    Ok(err_coarse
        .iter()
        .zip(err_fine)
        .map(|(&ec, &ef)| {
            if ec < 1e-13 && ef < 1e-13 {
                PointEoc::Exact
            } else {
                PointEoc::Value((ec.max(1e-300) / ef.max(1e-300)).ln() / scale)
            }
        })
        .collect())
}

/// Evaluate the numerical fields at an arbitrary physical point.
pub fn evaluate_at(
    re: &ReferenceElement,
    mesh: &MeshData,
    layout: &FieldLayout,
    x: f64,
    y: f64,
) -> Option<(f64, f64, f64)> {
    let (e, r, s) = mesh.locate(x, y)?;
    let row = vandermonde_2d(re.n, &[r], &[s]).matmul(&re.inv_vandermonde);
    let dot = |field: &[f64]| -> f64 {
        let rng = layout.nodal(e);
        row.row(0).iter().zip(&field[rng]).map(|(a, b)| a * b).sum()
    };
    Some((dot(&layout.fields.h), dot(&layout.fields.hu), dot(&layout.fields.hv)))
}

/// Interpolation matrix evaluating nodal data at given reference points;
/// shared by samplers that reuse one point set across many elements.
pub fn interp_to(re: &ReferenceElement, r: &[f64], s: &[f64]) -> Mat {
    vandermonde_2d(re.n, r, s).matmul(&re.inv_vandermonde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Executor;
    use crate::mesh::{generators, BoundaryTag};

    #[test]
    fn eoc_fit_examples() {
        let slope = eoc_fit(&[(1.0, 1e-2), (0.5, 2.5e-3)]).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);

        let pts: Vec<(f64, f64)> =
            [1.0f64, 0.5, 0.25].iter().map(|&h| (h, 7.3 * h.powf(3.5))).collect();
        assert!((eoc_fit(&pts).unwrap() - 3.5).abs() < 1e-12);

        // noisy points recover the closed-form least squares slope
        let noisy = vec![(1.0, 1.1e-1), (0.5, 3.4e-2), (0.25, 1.3e-2)];
        let slope = eoc_fit(&noisy).unwrap();
        // independent normal-equation evaluation
        let (x, y): (Vec<f64>, Vec<f64>) =
            noisy.iter().map(|&(h, e)| (h.ln(), e.ln())).unzip();
        let xm = x.iter().sum::<f64>() / 3.0;
        let ym = y.iter().sum::<f64>() / 3.0;
        let beta = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - xm) * (b - ym))
            .sum::<f64>()
            / x.iter().map(|a| (a - xm) * (a - xm)).sum::<f64>();
        assert!((slope - beta).abs() < 1e-12);

        assert!(eoc_fit(&[(1.0, 0.0), (0.5, 1.0)]).is_err());
        assert!(eoc_fit(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn pointwise_eoc_conventions() {
        let out = pointwise_eoc(&[1e-2, 1e-2, 1e-15], &[1.25e-3, 1e-2, 1e-15], 2.0, 1.0).unwrap();
        match out[0] {
            PointEoc::Value(v) => assert!((v - 3.0).abs() < 1e-12),
            _ => panic!(),
        }
        match out[1] {
            PointEoc::Value(v) => assert!(v.abs() < 1e-12), // limiter-dominated plateau
            _ => panic!(),
        }
        assert_eq!(out[2], PointEoc::Exact);
        assert!(pointwise_eoc(&[1.0], &[1.0, 2.0], 2.0, 1.0).is_err());
    }

    #[test]
    fn l2_error_of_projected_exact_solution() {
        // sampling the exact constant-depth case leaves machine-zero error
        let case = TestCase::from_name("couette").unwrap();
        let re = ReferenceElement::balanced(3).unwrap();
        let mesh = case.build_mesh(4).unwrap();
        let mut layout = FieldLayout::new(&re, &mesh);
        let exec = Executor::new(1);
        let c2 = case.clone();
        layout.set_initial(
            &re,
            &mesh,
            &exec,
            move |x, y| c2.exact(x, y, 0.0),
            |x, y| case.bathymetry(x, y),
        );
        let errs = l2_error(&re, &mesh, &layout, &case, 0.0, None);
        // depth is exactly constant; momenta carry interpolation error only
        assert!(errs[0] < 1e-13, "h error {}", errs[0]);
        assert!(errs[1] < 1e-2 && errs[1] > 0.0, "hu error {}", errs[1]);
    }

    #[test]
    fn empty_region_gives_zero() {
        let case = TestCase::from_name("vortex").unwrap();
        let re = ReferenceElement::new(1).unwrap();
        let mesh = case.build_mesh(1).unwrap();
        let layout = FieldLayout::new(&re, &mesh);
        let errs = l2_error(&re, &mesh, &layout, &case, 0.0, Some(&|_, _| false));
        assert_eq!(errs, [0.0; 3]);
    }

    #[test]
    fn constant_offset_error_is_scaled_area() {
        // flat-bed still case: exact depth is a constant, so a numerical
        // state offset by c gives error exactly c * sqrt(area)
        let case = TestCase::LakeAtRest { g: 9.81, eta: 1.0, bump_amp: 0.0, bump_width: 1.0 };
        let re = ReferenceElement::new(2).unwrap();
        let mesh = generators::rect_mesh(0.0, 1.0, 0.0, 2.0, 1, 1, BoundaryTag::Wall).unwrap();
        let mut layout = FieldLayout::new(&re, &mesh);
        let exec = Executor::new(1);
        let c = 0.37;
        layout.set_initial(&re, &mesh, &exec, move |_, _| (1.0 + c, 0.0, 0.0), |_, _| 0.0);
        let errs = l2_error(&re, &mesh, &layout, &case, 0.0, None);
        assert!((errs[0] - c * 2f64.sqrt()).abs() < 1e-13, "err {}", errs[0]);
    }

    #[test]
    fn evaluate_at_reproduces_polynomials() {
        let case = TestCase::from_name("vortex").unwrap();
        let re = ReferenceElement::new(2).unwrap();
        let mesh = case.build_mesh(2).unwrap();
        let mut layout = FieldLayout::new(&re, &mesh);
        let exec = Executor::new(1);
        layout.set_initial(
            &re,
            &mesh,
            &exec,
            |x, y| (1.0 + 0.5 * x + 0.25 * y * y, 0.0, 0.0),
            |_, _| 0.0,
        );
        let (h, _, _) = evaluate_at(&re, &mesh, &layout, 0.3, -1.2).unwrap();
        assert!((h - (1.0 + 0.15 + 0.25 * 1.44)).abs() < 1e-12);
        assert!(evaluate_at(&re, &mesh, &layout, 100.0, 0.0).is_none());
    }
}
