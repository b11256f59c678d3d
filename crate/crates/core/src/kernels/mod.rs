//! Data-parallel volume / surface / update passes over a padded
//! structure-of-arrays layout.
//!
//! Each pass processes chunks of elements as independent jobs (the work
//! group analogue); inside an element the arithmetic order is fixed, so
//! results are bit-identical for any chunk size or thread count. All
//! per-element state lives in contiguous np_pad-strided slots; padding
//! lanes are written once at allocation and never touched again.

pub mod bench;
mod executor;

pub use executor::Executor;
use executor::{chunk_count, chunk_range, SharedMut};

use crate::mesh::MeshData;
use crate::physics::{self, Conserved, PhysicsConfig};
use crate::refel::ReferenceElement;
use crate::Result;

/// One nodal or trace variable set in structure-of-arrays form.
#[derive(Debug, Clone)]
pub struct FieldSet {
    pub h: Vec<f64>,
    pub hu: Vec<f64>,
    pub hv: Vec<f64>,
}

impl FieldSet {
    pub fn zeros(len: usize) -> Self {
        FieldSet { h: vec![0.0; len], hu: vec![0.0; len], hv: vec![0.0; len] }
    }
}

/// Chunk sizes (elements per work group) and operator staging mode.
#[derive(Debug, Clone, Copy)]
pub struct KernelConfig {
    pub chunk_volume: usize,
    pub chunk_surface: usize,
    pub chunk_update: usize,
    /// Copy the operator matrices into job-local scratch before use,
    /// mirroring shared-memory staging of the operators.
    pub cache_operators: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { chunk_volume: 8, chunk_surface: 8, chunk_update: 16, cache_operators: true }
    }
}

/// Padded SoA storage for the solution, bathymetry, traces and the AB3
/// right-hand-side history.
#[derive(Debug, Clone)]
pub struct FieldLayout {
    pub k: usize,
    pub np: usize,
    /// Node count rounded up to a multiple of 4 (alignment padding).
    pub np_pad: usize,
    pub ncub: usize,
    /// Trace points per element (3 * ngauss).
    pub ngt: usize,
    /// Nodal conserved fields, length k * np_pad.
    pub fields: FieldSet,
    /// Nodal bathymetry and its physical gradient.
    pub bathy: Vec<f64>,
    pub bathy_dx: Vec<f64>,
    pub bathy_dy: Vec<f64>,
    /// Bathymetry gradient sampled at cubature points (k * ncub).
    pub cub_bdx: Vec<f64>,
    pub cub_bdy: Vec<f64>,
    /// Bathymetry and coordinates at trace points (k * ngt).
    pub gauss_b: Vec<f64>,
    pub gauss_x: Vec<f64>,
    pub gauss_y: Vec<f64>,
    /// Conserved fields at trace points (k * ngt).
    pub traces: FieldSet,
    /// Right-hand-side history ring.
    pub rhs: [FieldSet; 3],
}

impl FieldLayout {
    pub fn new(re: &ReferenceElement, mesh: &MeshData) -> Self {
        let k = mesh.k();
        let np = re.np;
        let np_pad = np.div_ceil(4) * 4;
        let ncub = re.ncub();
        let ngt = re.ngauss_total();
        let nodal = k * np_pad;
        let trace = k * ngt;
        let mut layout = FieldLayout {
            k,
            np,
            np_pad,
            ncub,
            ngt,
            fields: FieldSet::zeros(nodal),
            bathy: vec![0.0; nodal],
            bathy_dx: vec![0.0; nodal],
            bathy_dy: vec![0.0; nodal],
            cub_bdx: vec![0.0; k * ncub],
            cub_bdy: vec![0.0; k * ncub],
            gauss_b: vec![0.0; trace],
            gauss_x: vec![0.0; trace],
            gauss_y: vec![0.0; trace],
            traces: FieldSet::zeros(trace),
            rhs: [FieldSet::zeros(nodal), FieldSet::zeros(nodal), FieldSet::zeros(nodal)],
        };
        let (gr, gs) = trace_ref_points(re);
        for e in 0..k {
            let (x, y) = mesh.map_to_physical(e, &gr, &gs);
            layout.gauss_x[e * ngt..(e + 1) * ngt].copy_from_slice(&x);
            layout.gauss_y[e * ngt..(e + 1) * ngt].copy_from_slice(&y);
        }
        layout
    }

    /// Nodal slot range of element e.
    #[inline]
    pub fn nodal(&self, e: usize) -> std::ops::Range<usize> {
        e * self.np_pad..e * self.np_pad + self.np
    }

    /// Trace slot range of element e.
    #[inline]
    pub fn trace(&self, e: usize) -> std::ops::Range<usize> {
        e * self.ngt..(e + 1) * self.ngt
    }

    /// Interpolate initial fields and bathymetry at the nodes, precompute
    /// the bathymetry gradients, and fill the trace buffers.
    pub fn set_initial(
        &mut self,
        re: &ReferenceElement,
        mesh: &MeshData,
        exec: &Executor,
        init: impl Fn(f64, f64) -> (f64, f64, f64),
        bathy: impl Fn(f64, f64) -> f64,
    ) {
        for e in 0..self.k {
            let (x, y) = mesh.map_to_physical(e, &re.r, &re.s);
            let range = self.nodal(e);
            for i in 0..self.np {
                let (h, u, v) = init(x[i], y[i]);
                self.fields.h[range.start + i] = h;
                self.fields.hu[range.start + i] = h * u;
                self.fields.hv[range.start + i] = h * v;
                self.bathy[range.start + i] = bathy(x[i], y[i]);
            }
            // physical gradient via the chain rule, then sampled at the
            // cubature and trace points
            let b = &self.bathy[range.clone()];
            let mut br = vec![0.0; self.np];
            let mut bs = vec![0.0; self.np];
            re.dr.matvec(b, &mut br);
            re.ds.matvec(b, &mut bs);
            let (rx, ry, sx, sy) = (mesh.rx[e], mesh.ry[e], mesh.sx[e], mesh.sy[e]);
            let mut bdx = vec![0.0; self.np];
            let mut bdy = vec![0.0; self.np];
            for i in 0..self.np {
                bdx[i] = rx * br[i] + sx * bs[i];
                bdy[i] = ry * br[i] + sy * bs[i];
            }
            self.bathy_dx[range.clone()].copy_from_slice(&bdx);
            self.bathy_dy[range.clone()].copy_from_slice(&bdy);
            re.interp_cub.matvec(&bdx, &mut self.cub_bdx[e * self.ncub..(e + 1) * self.ncub]);
            re.interp_cub.matvec(&bdy, &mut self.cub_bdy[e * self.ncub..(e + 1) * self.ncub]);
            let tr = e * self.ngt..(e + 1) * self.ngt;
            re.interp_gauss.matvec(b, &mut self.gauss_b[tr]);
        }
        let all: Vec<u32> = (0..self.k as u32).collect();
        refresh_traces(self, re, &all, exec, &KernelConfig::default());
    }

    /// Element means of the conserved fields.
    pub fn element_means(&self, re: &ReferenceElement) -> Vec<Conserved> {
        (0..self.k)
            .map(|e| {
                let r = self.nodal(e);
                Conserved::new(
                    re.mean(&self.fields.h[r.clone()]),
                    re.mean(&self.fields.hu[r.clone()]),
                    re.mean(&self.fields.hv[r]),
                )
            })
            .collect()
    }

    /// Total water volume.
    pub fn total_mass(&self, re: &ReferenceElement, mesh: &MeshData) -> f64 {
        (0..self.k)
            .map(|e| {
                let r = self.nodal(e);
                let mut acc = 0.0;
                for (w, h) in re.node_int_weights.iter().zip(&self.fields.h[r]) {
                    acc += w * h;
                }
                mesh.jac[e] * acc
            })
            .sum()
    }

    /// Debug check: padding lanes still zero.
    pub fn padding_clean(&self) -> bool {
        let pad = |v: &Vec<f64>| {
            (0..self.k).all(|e| {
                v[e * self.np_pad + self.np..(e + 1) * self.np_pad].iter().all(|&x| x == 0.0)
            })
        };
        pad(&self.fields.h)
            && pad(&self.fields.hu)
            && pad(&self.fields.hv)
            && self.rhs.iter().all(|s| pad(&s.h) && pad(&s.hu) && pad(&s.hv))
    }
}

/// Reference coordinates of the trace points, face-major (same layout as
/// `ReferenceElement::interp_gauss` rows).
fn trace_ref_points(re: &ReferenceElement) -> (Vec<f64>, Vec<f64>) {
    let ng = re.ngauss;
    let mut r = Vec::with_capacity(3 * ng);
    let mut s = Vec::with_capacity(3 * ng);
    for &x in &re.gauss_x {
        r.push(x);
        s.push(-1.0);
    }
    for &x in &re.gauss_x {
        r.push(-x);
        s.push(x);
    }
    for &x in &re.gauss_x {
        r.push(-1.0);
        s.push(-x);
    }
    (r, s)
}

/// Flops per cubature point of the volume flux/source evaluation.
pub const VOLUME_POINT_FLOPS: u64 = 39;
/// Flops per Gauss point of the interface flux evaluation.
pub const SURFACE_POINT_FLOPS: u64 = 85;

/// Analytic flop count of one element's volume pass: three interpolations,
/// the pointwise flux/source evaluation and eight weighted projections.
pub fn volume_flops(re: &ReferenceElement) -> u64 {
    let np = re.np as u64;
    let ncub = re.ncub() as u64;
    2 * 3 * ncub * np + VOLUME_POINT_FLOPS * ncub + 2 * 8 * np * ncub
}

/// Analytic flop count of one element's surface pass: the pointwise
/// numerical flux and three lift products.
pub fn surface_flops(re: &ReferenceElement) -> u64 {
    let np = re.np as u64;
    let ngt = re.ngauss_total() as u64;
    SURFACE_POINT_FLOPS * ngt + 2 * 3 * np * ngt
}

/// Analytic flop count of one element's update pass: the weighted history
/// combination plus the trace interpolation.
pub fn update_flops(re: &ReferenceElement) -> u64 {
    let np = re.np as u64;
    let ngt = re.ngauss_total() as u64;
    8 * 3 * np + 2 * 3 * ngt * np
}

/// Volume pass: interpolate to cubature points, evaluate fluxes rotated
/// into reference directions and the bathymetry source, project back.
/// Overwrites the RHS slot of each active element.
pub fn volume_kernel(
    layout: &mut FieldLayout,
    mesh: &MeshData,
    re: &ReferenceElement,
    phys: &PhysicsConfig,
    elems: &[u32],
    slot: usize,
    exec: &Executor,
    kcfg: &KernelConfig,
) {
    let np = layout.np;
    let ncub = layout.ncub;
    let [ref mut s0, ref mut s1, ref mut s2] = layout.rhs;
    let slot_fields = match slot {
        0 => s0,
        1 => s1,
        _ => s2,
    };
    let out_h = SharedMut::new(&mut slot_fields.h);
    let out_hu = SharedMut::new(&mut slot_fields.hu);
    let out_hv = SharedMut::new(&mut slot_fields.hv);
    let fields = &layout.fields;
    let np_pad = layout.np_pad;
    let chunk = kcfg.chunk_volume;
    let cache = kcfg.cache_operators;

    exec.run(chunk_count(elems.len(), chunk), |job| {
        // operators optionally staged into job-local scratch
        let (ic_local, pr_local, ps_local, pp_local);
        let (ic, pr, ps, pp) = if cache {
            ic_local = re.interp_cub.clone();
            pr_local = re.proj_pr.clone();
            ps_local = re.proj_ps.clone();
            pp_local = re.proj_p.clone();
            (&ic_local, &pr_local, &ps_local, &pp_local)
        } else {
            (&re.interp_cub, &re.proj_pr, &re.proj_ps, &re.proj_p)
        };
        let mut ch = vec![0.0; ncub];
        let mut chu = vec![0.0; ncub];
        let mut chv = vec![0.0; ncub];
        let mut cf1 = FieldSet::zeros(ncub);
        let mut cf2 = FieldSet::zeros(ncub);
        let mut cs_hu = vec![0.0; ncub];
        let mut cs_hv = vec![0.0; ncub];
        for idx in chunk_range(elems.len(), chunk, job) {
            let e = elems[idx] as usize;
            let base = e * np_pad;
            ic.matvec(&fields.h[base..base + np], &mut ch);
            ic.matvec(&fields.hu[base..base + np], &mut chu);
            ic.matvec(&fields.hv[base..base + np], &mut chv);
            let (rx, ry, sx, sy) = (mesh.rx[e], mesh.ry[e], mesh.sx[e], mesh.sy[e]);
            let bdx = &layout.cub_bdx[e * ncub..(e + 1) * ncub];
            let bdy = &layout.cub_bdy[e * ncub..(e + 1) * ncub];
            for c in 0..ncub {
                let q = Conserved::new(ch[c], chu[c], chv[c]);
                let (f, g, s) = physics::flux_source(q, (bdx[c], bdy[c]), phys);
                cf1.h[c] = rx * f.h + ry * g.h;
                cf1.hu[c] = rx * f.hu + ry * g.hu;
                cf1.hv[c] = rx * f.hv + ry * g.hv;
                cf2.h[c] = sx * f.h + sy * g.h;
                cf2.hu[c] = sx * f.hu + sy * g.hu;
                cf2.hv[c] = sx * f.hv + sy * g.hv;
                cs_hu[c] = s.hu;
                cs_hv[c] = s.hv;
            }
            // Safety: element slots are written by exactly this job.
            let rh = unsafe { out_h.slice_mut(base, np) };
            let rhu = unsafe { out_hu.slice_mut(base, np) };
            let rhv = unsafe { out_hv.slice_mut(base, np) };
            pr.matvec(&cf1.h, rh);
            ps.matvec_acc(&cf2.h, rh);
            pr.matvec(&cf1.hu, rhu);
            ps.matvec_acc(&cf2.hu, rhu);
            pp.matvec_acc(&cs_hu, rhu);
            pr.matvec(&cf1.hv, rhv);
            ps.matvec_acc(&cf2.hv, rhv);
            pp.matvec_acc(&cs_hv, rhv);
        }
    });
}

/// Surface pass: per Gauss point, gather the two traces (ghost states on
/// boundaries), evaluate the well-balanced flux and lift. Accumulates into
/// the RHS slot written by the volume pass.
#[allow(clippy::too_many_arguments)]
pub fn surface_kernel(
    layout: &mut FieldLayout,
    mesh: &MeshData,
    re: &ReferenceElement,
    phys: &PhysicsConfig,
    exact: Option<physics::ExactFn>,
    t: f64,
    elems: &[u32],
    slot: usize,
    exec: &Executor,
    kcfg: &KernelConfig,
) -> Result<()> {
    let np = layout.np;
    let ngt = layout.ngt;
    let ng = ngt / 3;
    let [ref mut s0, ref mut s1, ref mut s2] = layout.rhs;
    let slot_fields = match slot {
        0 => s0,
        1 => s1,
        _ => s2,
    };
    let out_h = SharedMut::new(&mut slot_fields.h);
    let out_hu = SharedMut::new(&mut slot_fields.hu);
    let out_hv = SharedMut::new(&mut slot_fields.hv);
    let traces = &layout.traces;
    let np_pad = layout.np_pad;
    let chunk = kcfg.chunk_surface;
    let cache = kcfg.cache_operators;
    let err = std::sync::Mutex::new(None::<crate::Error>);

    exec.run(chunk_count(elems.len(), chunk), |job| {
        let lift_local;
        let lift = if cache {
            lift_local = re.lift_gauss.clone();
            &lift_local
        } else {
            &re.lift_gauss
        };
        let mut flux = FieldSet::zeros(ngt);
        for idx in chunk_range(elems.len(), chunk, job) {
            let e = elems[idx] as usize;
            let tbase = e * ngt;
            for f in 0..3 {
                let n = (mesh.nx[e][f], mesh.ny[e][f]);
                let fscale = mesh.s_jac[e][f] / mesh.jac[e];
                let nb = mesh.etoe[e][f];
                let fb = mesh.etof[e][f];
                let interior = nb != e || fb != f;
                for g in 0..ng {
                    let i = tbase + f * ng + g;
                    let q_m = Conserved::new(traces.h[i], traces.hu[i], traces.hv[i]);
                    let b_m = layout.gauss_b[i];
                    let (q_p, b_p) = if interior {
                        let j = nb * ngt + fb * ng + (ng - 1 - g);
                        (
                            Conserved::new(traces.h[j], traces.hu[j], traces.hv[j]),
                            layout.gauss_b[j],
                        )
                    } else {
                        let tag = mesh.face_tag[e][f].unwrap_or(crate::mesh::BoundaryTag::Wall);
                        let ghost = match physics::boundary_state(
                            q_m,
                            tag,
                            n,
                            exact,
                            layout.gauss_x[i],
                            layout.gauss_y[i],
                            t,
                        ) {
                            Ok(ghost) => ghost,
                            Err(e) => {
                                *err.lock().unwrap() = Some(e);
                                Conserved::ZERO
                            }
                        };
                        (ghost, b_m)
                    };
                    let fx = physics::well_balanced_flux(q_m, b_m, q_p, b_p, n, phys);
                    // lift of -(surface flux), folded here
                    flux.h[f * ng + g] = -fscale * fx.h;
                    flux.hu[f * ng + g] = -fscale * fx.hu;
                    flux.hv[f * ng + g] = -fscale * fx.hv;
                }
            }
            let base = e * np_pad;
            // Safety: element slots are written by exactly this job.
            let rh = unsafe { out_h.slice_mut(base, np) };
            let rhu = unsafe { out_hu.slice_mut(base, np) };
            let rhv = unsafe { out_hv.slice_mut(base, np) };
            lift.matvec_acc(&flux.h, rh);
            lift.matvec_acc(&flux.hu, rhu);
            lift.matvec_acc(&flux.hv, rhv);
        }
    });
    match err.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Update pass, first part: advance the nodal fields of the active elements
/// with the weighted RHS history.
pub fn update_kernel(
    layout: &mut FieldLayout,
    elems: &[u32],
    dt: f64,
    weights: [f64; 3],
    slots: [usize; 3],
    exec: &Executor,
    kcfg: &KernelConfig,
) {
    let np = layout.np;
    let np_pad = layout.np_pad;
    let f_h = SharedMut::new(&mut layout.fields.h);
    let f_hu = SharedMut::new(&mut layout.fields.hu);
    let f_hv = SharedMut::new(&mut layout.fields.hv);
    let rhs = &layout.rhs;
    let chunk = kcfg.chunk_update;

    exec.run(chunk_count(elems.len(), chunk), |job| {
        for idx in chunk_range(elems.len(), chunk, job) {
            let e = elems[idx] as usize;
            let base = e * np_pad;
            // Safety: element slots are written by exactly this job.
            let h = unsafe { f_h.slice_mut(base, np) };
            let hu = unsafe { f_hu.slice_mut(base, np) };
            let hv = unsafe { f_hv.slice_mut(base, np) };
            for i in 0..np {
                let j = base + i;
                h[i] += dt
                    * (weights[0] * rhs[slots[0]].h[j]
                        + weights[1] * rhs[slots[1]].h[j]
                        + weights[2] * rhs[slots[2]].h[j]);
                hu[i] += dt
                    * (weights[0] * rhs[slots[0]].hu[j]
                        + weights[1] * rhs[slots[1]].hu[j]
                        + weights[2] * rhs[slots[2]].hu[j]);
                hv[i] += dt
                    * (weights[0] * rhs[slots[0]].hv[j]
                        + weights[1] * rhs[slots[1]].hv[j]
                        + weights[2] * rhs[slots[2]].hv[j]);
            }
        }
    });
}

/// Update pass, second part (a separate kernel, run after limiting):
/// refresh the Gauss traces of the active elements from their nodal fields.
pub fn refresh_traces(
    layout: &mut FieldLayout,
    re: &ReferenceElement,
    elems: &[u32],
    exec: &Executor,
    kcfg: &KernelConfig,
) {
    let np = layout.np;
    let np_pad = layout.np_pad;
    let ngt = layout.ngt;
    let t_h = SharedMut::new(&mut layout.traces.h);
    let t_hu = SharedMut::new(&mut layout.traces.hu);
    let t_hv = SharedMut::new(&mut layout.traces.hv);
    let fields = &layout.fields;
    let chunk = kcfg.chunk_update;
    let cache = kcfg.cache_operators;

    exec.run(chunk_count(elems.len(), chunk), |job| {
        let ig_local;
        let ig = if cache {
            ig_local = re.interp_gauss.clone();
            &ig_local
        } else {
            &re.interp_gauss
        };
        for idx in chunk_range(elems.len(), chunk, job) {
            let e = elems[idx] as usize;
            let base = e * np_pad;
            let tb = e * ngt;
            // Safety: element slots are written by exactly this job.
            ig.matvec(&fields.h[base..base + np], unsafe { t_h.slice_mut(tb, ngt) });
            ig.matvec(&fields.hu[base..base + np], unsafe { t_hu.slice_mut(tb, ngt) });
            ig.matvec(&fields.hv[base..base + np], unsafe { t_hv.slice_mut(tb, ngt) });
        }
    });
}
