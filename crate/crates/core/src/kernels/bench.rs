//! Kernel benchmark sweep over polynomial order, chunk size and thread
//! count, with analytic flop accounting and a correctness check of every
//! configuration against the serial reference.

use super::{
    refresh_traces, surface_kernel, surface_flops, update_flops, update_kernel, volume_flops,
    volume_kernel, Executor, FieldLayout, KernelConfig,
};
use crate::mesh::{generators, BoundaryTag, MeshData};
use crate::physics::PhysicsConfig;
use crate::refel::ReferenceElement;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub orders: Vec<usize>,
    /// Requested element count; the generated mesh rounds it.
    pub k: usize,
    pub chunks: Vec<usize>,
    pub threads: Vec<usize>,
    /// Timed repetitions per configuration.
    pub reps: usize,
    pub seed: u64,
    /// Also run the series with operators read from shared storage instead
    /// of job-local copies.
    pub include_uncached: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            orders: (1..=5).collect(),
            k: 2048,
            chunks: vec![1, 2, 4, 8, 16],
            threads: vec![1, 2, 8],
            reps: 5,
            seed: 7,
            include_uncached: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub kernel: String,
    pub n: usize,
    pub k: usize,
    pub elements_per_group: usize,
    pub threads: usize,
    pub flops: u64,
    pub seconds: f64,
    pub gflops: f64,
}

pub fn write_csv(records: &[BenchRecord], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "kernel,N,K,elementsPerGroup,threads,flops,seconds,gflops")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6e},{:.4}",
            r.kernel, r.n, r.k, r.elements_per_group, r.threads, r.flops, r.seconds, r.gflops
        )?;
    }
    Ok(())
}

fn synthetic_state(layout: &mut FieldLayout, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in 0..layout.k {
        for i in layout.nodal(e) {
            layout.fields.h[i] = 0.5 + rng.gen::<f64>();
            layout.fields.hu[i] = rng.gen::<f64>() - 0.5;
            layout.fields.hv[i] = rng.gen::<f64>() - 0.5;
        }
    }
}

struct Workbench {
    re: ReferenceElement,
    mesh: MeshData,
    layout: FieldLayout,
    elems: Vec<u32>,
    phys: PhysicsConfig,
}

fn workbench(n: usize, k: usize, seed: u64) -> Result<Workbench> {
    let re = ReferenceElement::balanced(n)?;
    let nx = ((k as f64 / 2.0).sqrt().round() as usize).max(1);
    let ny = (k / (2 * nx)).max(1);
    let mesh = generators::rect_mesh(0.0, 1.0, 0.0, 1.0, nx, ny, BoundaryTag::Wall)?;
    let mut layout = FieldLayout::new(&re, &mesh);
    let exec = Executor::new(1);
    layout.set_initial(&re, &mesh, &exec, |_, _| (1.0, 0.0, 0.0), |_, _| 0.0);
    synthetic_state(&mut layout, seed);
    let elems: Vec<u32> = (0..layout.k as u32).collect();
    refresh_traces(&mut layout, &re, &elems, &exec, &KernelConfig::default());
    Ok(Workbench { re, mesh, layout, elems, phys: PhysicsConfig::new(9.81, 1e-8) })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Run the sweep. Every configuration's output is checked against the
/// serial single-chunk reference to 1e-14 before its timing is recorded.
pub fn bench_sweep(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.chunks.iter().any(|&c| c == 0) {
        return Err(Error::config("chunk size 0 in bench sweep"));
    }
    if cfg.reps == 0 {
        return Err(Error::config("bench repetitions must be positive"));
    }
    let mut records = vec![];
    for &n in &cfg.orders {
        let mut wb = workbench(n, cfg.k, cfg.seed)?;
        let k = wb.layout.k;

        // serial reference for correctness checks
        let serial = Executor::new(1);
        let ref_cfg = KernelConfig {
            chunk_volume: 1,
            chunk_surface: 1,
            chunk_update: 1,
            cache_operators: true,
        };
        volume_kernel(&mut wb.layout, &wb.mesh, &wb.re, &wb.phys, &wb.elems, 2, &serial, &ref_cfg);
        let ref_vol = wb.layout.rhs[2].clone();
        volume_kernel(&mut wb.layout, &wb.mesh, &wb.re, &wb.phys, &wb.elems, 0, &serial, &ref_cfg);
        surface_kernel(
            &mut wb.layout, &wb.mesh, &wb.re, &wb.phys, None, 0.0, &wb.elems, 0, &serial, &ref_cfg,
        )?;
        let ref_rhs = wb.layout.rhs[0].clone();

        let caches: &[bool] = if cfg.include_uncached { &[true, false] } else { &[true] };
        for &cached in caches {
            for &chunk in &cfg.chunks {
                for &threads in &cfg.threads {
                    let exec = Executor::new(threads);
                    let kcfg = KernelConfig {
                        chunk_volume: chunk,
                        chunk_surface: chunk,
                        chunk_update: chunk,
                        cache_operators: cached,
                    };
                    let suffix = if cached { "" } else { "-nocache" };

                    // volume
                    volume_kernel(
                        &mut wb.layout, &wb.mesh, &wb.re, &wb.phys, &wb.elems, 1, &exec, &kcfg,
                    );
                    let d = max_abs_diff(&wb.layout.rhs[1].hu, &ref_vol.hu);
                    if d > 1e-14 {
                        return Err(Error::State(format!(
                            "volume kernel config mismatch {d} at N={n} chunk={chunk} threads={threads}"
                        )));
                    }
                    let t0 = Instant::now();
                    for _ in 0..cfg.reps {
                        volume_kernel(
                            &mut wb.layout, &wb.mesh, &wb.re, &wb.phys, &wb.elems, 1, &exec, &kcfg,
                        );
                    }
                    let secs = t0.elapsed().as_secs_f64() / cfg.reps as f64;
                    let flops = volume_flops(&wb.re) * k as u64;
                    records.push(BenchRecord {
                        kernel: format!("volume{suffix}"),
                        n,
                        k,
                        elements_per_group: chunk,
                        threads,
                        flops,
                        seconds: secs,
                        gflops: flops as f64 / secs / 1e9,
                    });

                    // surface (on top of the volume slot, as in production)
                    let t0 = Instant::now();
                    for _ in 0..cfg.reps {
                        surface_kernel(
                            &mut wb.layout, &wb.mesh, &wb.re, &wb.phys, None, 0.0, &wb.elems, 1,
                            &exec, &kcfg,
                        )?;
                    }
                    let secs = t0.elapsed().as_secs_f64() / cfg.reps as f64;
                    let flops = surface_flops(&wb.re) * k as u64;
                    records.push(BenchRecord {
                        kernel: format!("surface{suffix}"),
                        n,
                        k,
                        elements_per_group: chunk,
                        threads,
                        flops,
                        seconds: secs,
                        gflops: flops as f64 / secs / 1e9,
                    });

                    // full rhs correctness for this configuration
                    volume_kernel(
                        &mut wb.layout, &wb.mesh, &wb.re, &wb.phys, &wb.elems, 1, &exec, &kcfg,
                    );
                    surface_kernel(
                        &mut wb.layout, &wb.mesh, &wb.re, &wb.phys, None, 0.0, &wb.elems, 1, &exec,
                        &kcfg,
                    )?;
                    for (a, b) in [
                        (&wb.layout.rhs[1].h, &ref_rhs.h),
                        (&wb.layout.rhs[1].hu, &ref_rhs.hu),
                        (&wb.layout.rhs[1].hv, &ref_rhs.hv),
                    ] {
                        let d = max_abs_diff(a, b);
                        if d > 1e-14 {
                            return Err(Error::State(format!(
                                "kernel config mismatch {d} at N={n} chunk={chunk} threads={threads}"
                            )));
                        }
                    }

                    // update + trace refresh
                    let snapshot = wb.layout.fields.clone();
                    let trace_snapshot = wb.layout.traces.clone();
                    let t0 = Instant::now();
                    for _ in 0..cfg.reps {
                        update_kernel(
                            &mut wb.layout,
                            &wb.elems,
                            1e-9,
                            [23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
                            [1, 0, 2],
                            &exec,
                            &kcfg,
                        );
                        refresh_traces(&mut wb.layout, &wb.re, &wb.elems, &exec, &kcfg);
                    }
                    let secs = t0.elapsed().as_secs_f64() / cfg.reps as f64;
                    let flops = update_flops(&wb.re) * k as u64;
                    records.push(BenchRecord {
                        kernel: format!("update{suffix}"),
                        n,
                        k,
                        elements_per_group: chunk,
                        threads,
                        flops,
                        seconds: secs,
                        gflops: flops as f64 / secs / 1e9,
                    });
                    wb.layout.fields = snapshot;
                    wb.layout.traces = trace_snapshot;
                }
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sweep_produces_rows() {
        let cfg = BenchConfig {
            orders: vec![1, 2],
            k: 32,
            chunks: vec![1, 4],
            threads: vec![1, 2],
            reps: 1,
            seed: 3,
            include_uncached: true,
        };
        let records = bench_sweep(&cfg).unwrap();
        // 2 orders x 2 cache modes x 2 chunks x 2 threads x 3 kernels
        assert_eq!(records.len(), 2 * 2 * 2 * 2 * 3);
        assert!(records.iter().all(|r| r.flops > 0 && r.gflops > 0.0));
        let mut out = vec![];
        write_csv(&records, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("kernel,N,K,elementsPerGroup,threads,flops,seconds,gflops"));
        assert_eq!(text.lines().count(), records.len() + 1);
    }

    #[test]
    fn zero_chunk_rejected() {
        let cfg = BenchConfig { chunks: vec![0], ..Default::default() };
        assert!(bench_sweep(&cfg).is_err());
    }
}
