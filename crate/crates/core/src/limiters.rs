//! Positivity-preserving limiter for arbitrary order and the
//! positivity-modified characteristic TVB slope limiter, with dry-element
//! masking that keeps the two from activating each other.

use crate::mesh::MeshData;
use crate::physics::{velocity, Conserved, PhysicsConfig};
use crate::refel::ReferenceElement;

/// Limiter thresholds.
#[derive(Debug, Clone, Copy)]
pub struct LimiterConfig {
    /// Dry threshold: elements with mean depth below this are parked.
    pub h0: f64,
    /// Positivity trigger: the limiter engages when the minimum nodal depth
    /// drops to this value. Defaults to h0.
    pub eps: f64,
    /// TVB constant M (threshold M*H^2 permits smooth extrema).
    pub tvb_m: f64,
    /// Whether the slope limiter runs at all.
    pub apply_tvb: bool,
}

impl LimiterConfig {
    pub fn new(h0: f64) -> Self {
        LimiterConfig { h0, eps: h0, tvb_m: 0.0, apply_tvb: true }
    }
}

/// Per-element wetness classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wetness {
    Dry,
    /// Wet element with at least one dry face neighbor.
    NearDry,
    Wet,
}

/// What the positivity limiter did to an element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityOutcome {
    Untouched,
    /// Projected to P1 and scaled about the mean by theta.
    Scaled { theta: f64 },
    /// Parked as dry: depth set to h0, momenta zeroed. Carries the mean
    /// depth before parking so the caller can account the injected mass.
    Dried { mean_before: f64 },
}

/// Positivity limiter on one element's nodal fields.
///
/// Untouched when every nodal depth exceeds eps. Otherwise all three fields
/// are projected to linears; a dry mean parks the element, a wet mean
/// scales the linear about its (preserved) mean so the vertex depths stay
/// at or above h0.
pub fn positivity_limit(
    re: &ReferenceElement,
    h: &mut [f64],
    hu: &mut [f64],
    hv: &mut [f64],
    cfg: &LimiterConfig,
) -> PositivityOutcome {
    let np = re.np;
    let h_min = h[..np].iter().cloned().fold(f64::INFINITY, f64::min);
    // the trigger admits equality so a limited element (parked at h0, or
    // scaled to touch it) passes through unchanged on repeat application
    if h_min >= cfg.eps {
        return PositivityOutcome::Untouched;
    }

    let mut lin = vec![0.0; np];
    re.proj_p1.matvec(&h[..np], &mut lin);
    let mean_h = re.mean(&lin);
    if mean_h < cfg.h0 {
        let before = re.mean(&h[..np]);
        h[..np].fill(cfg.h0);
        hu[..np].fill(0.0);
        hv[..np].fill(0.0);
        return PositivityOutcome::Dried { mean_before: before };
    }

    let h_min_vertex =
        re.vertex_nodes.iter().map(|&i| lin[i]).fold(f64::INFINITY, f64::min);
    let theta = if mean_h - h_min_vertex > 0.0 {
        ((mean_h - cfg.h0) / (mean_h - h_min_vertex)).min(1.0)
    } else {
        1.0
    };
    for (dst, &l) in h[..np].iter_mut().zip(&lin) {
        *dst = (mean_h + theta * (l - mean_h)).max(cfg.h0);
    }
    for field in [&mut *hu, &mut *hv] {
        re.proj_p1.matvec(&field[..np], &mut lin);
        let mean = re.mean(&lin);
        for (dst, &l) in field[..np].iter_mut().zip(&lin) {
            *dst = mean + theta * (l - mean);
        }
    }
    PositivityOutcome::Scaled { theta }
}

/// Wetness flags from element mean depths. An element parked at exactly h0
/// by the positivity limiter counts as dry.
pub fn build_dry_mask(mean_h: &[f64], mesh: &MeshData, h0: f64) -> Vec<Wetness> {
    let dry_cut = h0 * (1.0 + 1e-12);
    let mut mask: Vec<Wetness> = mean_h
        .iter()
        .map(|&m| if m <= dry_cut { Wetness::Dry } else { Wetness::Wet })
        .collect();
    for k in 0..mesh.k() {
        if mask[k] != Wetness::Wet {
            continue;
        }
        for f in 0..3 {
            let nb = mesh.etoe[k][f];
            if nb != k && mask[nb] == Wetness::Dry {
                mask[k] = Wetness::NearDry;
                break;
            }
        }
    }
    mask
}

/// Rescale midpoint deviations about their average so every implied vertex
/// depth stays at or above h0, without changing the average.
///
/// Vertex values are h_bar + (-d_i + d_j + d_k) over the index
/// permutations; when the smallest is below h0 the deviations contract
/// toward the average by theta in [0, 1].
pub fn vertex_positivity_fix(deltas: [f64; 3], h_bar: f64, h0: f64) -> [f64; 3] {
    let combo = |i: usize| -> f64 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        -deltas[i] + deltas[j] + deltas[k]
    };
    let min_combo = combo(0).min(combo(1)).min(combo(2));
    if h_bar + min_combo >= h0 {
        return deltas;
    }
    let d_bar = (deltas[0] + deltas[1] + deltas[2]) / 3.0;
    let denom = d_bar - min_combo;
    let theta = if denom > 0.0 { ((h_bar + d_bar - h0) / denom).clamp(0.0, 1.0) } else { 0.0 };
    [
        d_bar + theta * (deltas[0] - d_bar),
        d_bar + theta * (deltas[1] - d_bar),
        d_bar + theta * (deltas[2] - d_bar),
    ]
}

/// Static geometry used by the TVB limiter: for every face midpoint, the
/// pair of (possibly mirrored) neighbor centroids and the coefficients that
/// express the midpoint offset in terms of centroid offsets.
#[derive(Debug, Clone)]
pub struct TvbGeometry {
    /// Per element, per face: (nb_a, nb_b, alpha_a, alpha_b). A neighbor
    /// index equal to the element itself denotes the mirrored ghost whose
    /// mean equals the element mean.
    pairs: Vec<[(usize, usize, f64, f64); 3]>,
    /// Unit direction from the centroid to each face midpoint.
    dirs: Vec<[(f64, f64); 3]>,
}

impl TvbGeometry {
    pub fn build(mesh: &MeshData) -> Self {
        let k = mesh.k();
        let mut pairs = Vec::with_capacity(k);
        let mut dirs = Vec::with_capacity(k);
        for e in 0..k {
            let c0 = mesh.centroid(e);
            // candidate neighbor centroids; boundaries mirror the centroid
            // across the face
            let mut cands = [(0usize, (0.0, 0.0)); 3];
            for f in 0..3 {
                let nb = mesh.etoe[e][f];
                if nb == e {
                    let m = mesh.face_midpoint(e, f);
                    let n = (mesh.nx[e][f], mesh.ny[e][f]);
                    let d = (c0.0 - m.0) * n.0 + (c0.1 - m.1) * n.1;
                    cands[f] = (e, (c0.0 - 2.0 * d * n.0, c0.1 - 2.0 * d * n.1));
                } else {
                    cands[f] = (nb, mesh.centroid(nb));
                }
            }
            let mut face_pairs = [(0usize, 0usize, 0.0, 0.0); 3];
            let mut face_dirs = [(0.0, 0.0); 3];
            for f in 0..3 {
                let b = mesh.face_midpoint(e, f);
                let (bx, by) = (b.0 - c0.0, b.1 - c0.1);
                let len = (bx * bx + by * by).sqrt();
                face_dirs[f] = (bx / len, by / len);
                // pick the neighbor pair giving nonnegative coefficients
                let mut best: Option<(usize, usize, f64, f64)> = None;
                let mut best_neg = f64::INFINITY;
                for (ia, ib) in [(0usize, 1usize), (1, 2), (0, 2)] {
                    let (na, ca) = cands[ia];
                    let (nb, cb) = cands[ib];
                    let a11 = ca.0 - c0.0;
                    let a21 = ca.1 - c0.1;
                    let a12 = cb.0 - c0.0;
                    let a22 = cb.1 - c0.1;
                    let det = a11 * a22 - a12 * a21;
                    if det.abs() < 1e-14 * len * len {
                        continue;
                    }
                    let al = (bx * a22 - by * a12) / det;
                    let be = (a11 * by - a21 * bx) / det;
                    let neg = (-al).max(-be).max(0.0);
                    if neg < best_neg {
                        best_neg = neg;
                        best = Some((na, nb, al, be));
                    }
                    if neg == 0.0 {
                        break;
                    }
                }
                face_pairs[f] = best.expect("face midpoint expressible by neighbor centroids");
            }
            pairs.push(face_pairs);
            dirs.push(face_dirs);
        }
        TvbGeometry { pairs, dirs }
    }
}

/// TVB-modified minmod: keeps the first argument below the M*H^2 threshold,
/// otherwise the usual minmod. Returns the value and whether it differs from
/// the first argument.
fn minmod_tvb(a1: f64, a2: f64, threshold: f64) -> (f64, bool) {
    if a1.abs() <= threshold {
        return (a1, false);
    }
    if a1 == 0.0 || a2 == 0.0 || a1.signum() != a2.signum() {
        (0.0, a1 != 0.0)
    } else if a1.abs() <= a2.abs() {
        (a1, false)
    } else {
        (a2, true)
    }
}

/// Left/right eigenvector matrices of the normal-direction flux Jacobian at
/// a mean state. Rows of `l` are left eigenvectors; columns of `r` right.
fn characteristic_matrices(
    mean: Conserved,
    n: (f64, f64),
    phys: &PhysicsConfig,
) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let (u, v) = velocity(mean, phys);
    let c = (phys.g * mean.h.max(phys.h_dry)).sqrt();
    let (nx, ny) = n;
    let un = u * nx + v * ny;
    let ut = -u * ny + v * nx;
    let l = [
        [(un + c) / (2.0 * c), -nx / (2.0 * c), -ny / (2.0 * c)],
        [-ut, -ny, nx],
        [(c - un) / (2.0 * c), nx / (2.0 * c), ny / (2.0 * c)],
    ];
    let r = [
        [1.0, 0.0, 1.0],
        [u - c * nx, -ny, u + c * nx],
        [v - c * ny, nx, v + c * ny],
    ];
    (l, r)
}

fn mat3_vec(m: &[[f64; 3]; 3], x: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
        m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
        m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
    ]
}

/// Relaxation factor on the neighbor mean differences in the minmod.
const TVB_NU: f64 = 1.5;

/// Characteristic TVB limiter on one element.
///
/// Face-midpoint deviations of the P1 part are compared (in characteristic
/// variables of the cell mean) against relaxed neighbor mean differences.
/// If any component limits, the element is replaced by the limited linear
/// rebuilt from midpoint deviations: sum corrected to zero to preserve the
/// means, then contracted by the vertex positivity fix. Returns true when
/// the element was modified.
#[allow(clippy::too_many_arguments)]
pub fn tvb_limit_element(
    re: &ReferenceElement,
    mesh: &MeshData,
    geom: &TvbGeometry,
    k: usize,
    means: &[Conserved],
    h: &mut [f64],
    hu: &mut [f64],
    hv: &mut [f64],
    cfg: &LimiterConfig,
    phys: &PhysicsConfig,
) -> bool {
    let np = re.np;
    let mean = means[k];
    let threshold = cfg.tvb_m * mesh.hk[k] * mesh.hk[k];

    // midpoint values of the P1 part of each field
    let mut lin_h = vec![0.0; np];
    let mut lin_hu = vec![0.0; np];
    let mut lin_hv = vec![0.0; np];
    re.proj_p1.matvec(&h[..np], &mut lin_h);
    re.proj_p1.matvec(&hu[..np], &mut lin_hu);
    re.proj_p1.matvec(&hv[..np], &mut lin_hv);

    let mut deltas = [[0.0f64; 3]; 3]; // [face][component]
    let mut any_changed = false;
    for f in 0..3 {
        let row = re.face_mid_interp.row(f);
        let mid = |lin: &[f64]| -> f64 { row.iter().zip(lin).map(|(a, b)| a * b).sum() };
        let du = [
            mid(&lin_h) - mean.h,
            mid(&lin_hu) - mean.hu,
            mid(&lin_hv) - mean.hv,
        ];
        let (na, nb, al, be) = geom.pairs[k][f];
        let ma = means[na];
        let mb = means[nb];
        let dbar = [
            al * (ma.h - mean.h) + be * (mb.h - mean.h),
            al * (ma.hu - mean.hu) + be * (mb.hu - mean.hu),
            al * (ma.hv - mean.hv) + be * (mb.hv - mean.hv),
        ];
        let (l, r) = characteristic_matrices(mean, geom.dirs[k][f], phys);
        let wu = mat3_vec(&l, du);
        let wbar = mat3_vec(&l, dbar);
        let mut wlim = [0.0f64; 3];
        let mut changed = false;
        for c in 0..3 {
            let (val, ch) = minmod_tvb(wu[c], TVB_NU * wbar[c], threshold);
            wlim[c] = val;
            changed |= ch;
        }
        deltas[f] = if changed { mat3_vec(&r, wlim) } else { du };
        any_changed |= changed;
    }
    if !any_changed {
        return false;
    }

    // per component: force zero sum (mean preservation), then the h deltas
    // get the vertex positivity contraction
    let mut comp = [[0.0f64; 3]; 3]; // [component][face]
    for f in 0..3 {
        for c in 0..3 {
            comp[c][f] = deltas[f][c];
        }
    }
    for c in 0..3 {
        let pos: f64 = comp[c].iter().map(|d| d.max(0.0)).sum();
        let neg: f64 = comp[c].iter().map(|d| (-d).max(0.0)).sum();
        if pos > 0.0 && neg > 0.0 {
            let th_p = (neg / pos).min(1.0);
            let th_m = (pos / neg).min(1.0);
            for d in comp[c].iter_mut() {
                *d = th_p * d.max(0.0) - th_m * (-*d).max(0.0);
            }
        } else if pos > 0.0 || neg > 0.0 {
            // single-signed deviations cannot keep the mean; flatten
            comp[c] = [0.0; 3];
        }
    }
    comp[0] = vertex_positivity_fix(comp[0], mean.h, cfg.h0);

    // rebuild linears from vertex values: vertex v is opposite face (v+1)%3
    let rebuild = |field: &mut [f64], mean_c: f64, d: &[f64; 3]| {
        let mut vert = [0.0f64; 3];
        for v in 0..3 {
            let fo = (v + 1) % 3;
            let f1 = (v + 2) % 3;
            let f2 = v;
            vert[v] = mean_c - d[fo] + d[f1] + d[f2];
        }
        for i in 0..np {
            let row = re.vertex_interp.row(i);
            field[i] = row[0] * vert[0] + row[1] * vert[1] + row[2] * vert[2];
        }
    };
    rebuild(h, mean.h, &comp[0]);
    rebuild(hu, mean.hu, &comp[1]);
    rebuild(hv, mean.hv, &comp[2]);
    true
}
