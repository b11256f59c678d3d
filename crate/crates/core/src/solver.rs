//! End-to-end simulation assembly: fields + kernels + limiters under the
//! multirate driver, with per-step statistics.

use crate::kernels::{
    refresh_traces, surface_kernel, update_kernel, volume_kernel, Executor, FieldLayout,
    KernelConfig,
};
use crate::limiters::{
    build_dry_mask, positivity_limit, tvb_limit_element, LimiterConfig, PositivityOutcome,
    TvbGeometry, Wetness,
};
use crate::mesh::MeshData;
use crate::physics::{self, Conserved, PhysicsConfig};
use crate::refel::ReferenceElement;
use crate::timestep::{compute_element_dt, LevelSchedule, LevelSystem, MultirateDriver};
use crate::{Error, Result};

/// Per-macro-step statistics line.
#[derive(Debug, Clone)]
pub struct StepStats {
    pub t: f64,
    /// Step size per level (level 1 first).
    pub dt_levels: Vec<f64>,
    pub pp_scaled: usize,
    pub pp_dried: usize,
    pub tvb_limited: usize,
    pub dry_elements: usize,
    pub min_h: f64,
    pub min_vertex_h: f64,
    pub mass: f64,
    /// Cumulative mass added by the dry-element parking branch.
    pub mass_injected: f64,
}

/// Exact-solution closure shared with boundary conditions.
pub type ExactSolution = Box<dyn Fn(f64, f64, f64) -> (f64, f64, f64) + Sync>;

/// The shallow water system the multirate driver advances.
pub struct SweSystem {
    pub re: ReferenceElement,
    pub mesh: MeshData,
    pub layout: FieldLayout,
    pub phys: PhysicsConfig,
    pub lim: LimiterConfig,
    pub exec: Executor,
    pub kcfg: KernelConfig,
    pub exact: Option<ExactSolution>,
    schedule: LevelSchedule,
    tvb_geom: TvbGeometry,
    means: Vec<Conserved>,
    /// Running totals exposed through [`StepStats`].
    pub mass_injected: f64,
    pub min_vertex_h_ever: f64,
    pp_scaled: usize,
    pp_dried: usize,
    tvb_limited: usize,
}

impl SweSystem {
    /// Limit the elements of one level and refresh the wetness mask. The
    /// positivity pass runs first, then the slope limiter with its vertex
    /// fix, as in the update rule Lambda.Pi (M.Pi {..}).
    fn limit_elements(&mut self, elems: &[u32]) {
        let np = self.layout.np;
        let np_pad = self.layout.np_pad;
        for &e in elems {
            let e = e as usize;
            let base = e * np_pad;
            let h = &mut self.layout.fields.h[base..base + np];
            let hu = &mut self.layout.fields.hu[base..base + np];
            let hv = &mut self.layout.fields.hv[base..base + np];
            match positivity_limit(&self.re, h, hu, hv, &self.lim) {
                PositivityOutcome::Untouched => {
                    self.means[e] = Conserved::new(
                        self.re.mean(h),
                        self.re.mean(hu),
                        self.re.mean(hv),
                    );
                }
                PositivityOutcome::Scaled { .. } => {
                    self.pp_scaled += 1;
                    self.means[e] = Conserved::new(
                        self.re.mean(h),
                        self.re.mean(hu),
                        self.re.mean(hv),
                    );
                }
                PositivityOutcome::Dried { mean_before } => {
                    self.pp_dried += 1;
                    self.mass_injected +=
                        (self.lim.h0 - mean_before) * 2.0 * self.mesh.jac[e];
                    self.means[e] = Conserved::new(self.lim.h0, 0.0, 0.0);
                }
            }
        }
        if self.lim.apply_tvb {
            let mean_h: Vec<f64> = self.means.iter().map(|m| m.h).collect();
            let mask = build_dry_mask(&mean_h, &self.mesh, self.lim.h0);
            for &e in elems {
                let e = e as usize;
                if mask[e] != Wetness::Wet {
                    continue;
                }
                let base = e * np_pad;
                // split borrows: fields are element-local, means read-only
                let (h, hu, hv) = {
                    let f = &mut self.layout.fields;
                    let h = unsafe {
                        std::slice::from_raw_parts_mut(f.h.as_mut_ptr().add(base), np)
                    };
                    let hu = unsafe {
                        std::slice::from_raw_parts_mut(f.hu.as_mut_ptr().add(base), np)
                    };
                    let hv = unsafe {
                        std::slice::from_raw_parts_mut(f.hv.as_mut_ptr().add(base), np)
                    };
                    (h, hu, hv)
                };
                if tvb_limit_element(
                    &self.re,
                    &self.mesh,
                    &self.tvb_geom,
                    e,
                    &self.means,
                    h,
                    hu,
                    hv,
                    &self.lim,
                    &self.phys,
                ) {
                    self.tvb_limited += 1;
                }
            }
        }
        // track the post-limiter vertex depths
        for &e in elems {
            let base = e as usize * np_pad;
            for &v in &self.re.vertex_nodes {
                let hv = self.layout.fields.h[base + v];
                if hv < self.min_vertex_h_ever {
                    self.min_vertex_h_ever = hv;
                }
            }
        }
    }

    fn check_finite(&self, elems: &[u32], t: f64) -> Result<()> {
        for &e in elems {
            let r = self.layout.nodal(e as usize);
            let bad = self.layout.fields.h[r.clone()]
                .iter()
                .chain(&self.layout.fields.hu[r.clone()])
                .chain(&self.layout.fields.hv[r])
                .any(|v| !v.is_finite());
            if bad {
                return Err(Error::State(format!(
                    "non-finite field in element {e} at t = {t:.6}"
                )));
            }
        }
        Ok(())
    }

    pub fn min_depth(&self) -> f64 {
        (0..self.layout.k)
            .flat_map(|e| self.layout.fields.h[self.layout.nodal(e)].iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

impl LevelSystem for SweSystem {
    fn eval_rhs(&mut self, level: usize, slot: usize, t: f64) -> Result<()> {
        let elems = self.schedule.elements(level).to_vec();
        volume_kernel(
            &mut self.layout, &self.mesh, &self.re, &self.phys, &elems, slot, &self.exec,
            &self.kcfg,
        );
        surface_kernel(
            &mut self.layout,
            &self.mesh,
            &self.re,
            &self.phys,
            self.exact.as_ref().map(|f| f.as_ref() as physics::ExactFn),
            t,
            &elems,
            slot,
            &self.exec,
            &self.kcfg,
        )
    }

    fn apply_update(
        &mut self,
        level: usize,
        dt: f64,
        weights: [f64; 3],
        slots: [usize; 3],
        t_new: f64,
    ) -> Result<()> {
        let elems = self.schedule.elements(level).to_vec();
        update_kernel(&mut self.layout, &elems, dt, weights, slots, &self.exec, &self.kcfg);
        self.limit_elements(&elems);
        refresh_traces(&mut self.layout, &self.re, &elems, &self.exec, &self.kcfg);
        self.check_finite(&elems, t_new)
    }
}

/// How the level schedule is chosen.
#[derive(Debug, Clone)]
pub enum TimeStepping {
    /// Everything at the global minimum step.
    SingleRate,
    /// Levels assigned from the per-element CFL steps, up to `max_levels`.
    Multirate { max_levels: usize },
    /// Explicit assignment (testing and experiments).
    Forced(LevelSchedule),
}

/// Everything needed to build a [`Simulation`].
pub struct SimulationConfig<'a> {
    pub order: usize,
    pub cfl: Option<f64>,
    pub phys: PhysicsConfig,
    pub lim: LimiterConfig,
    pub stepping: TimeStepping,
    pub threads: Option<usize>,
    pub kernel: KernelConfig,
    /// Final time used to trim the macro step so runs end exactly at
    /// `t_end`.
    pub t_end: Option<f64>,
    pub init: &'a dyn Fn(f64, f64) -> (f64, f64, f64),
    pub bathymetry: &'a dyn Fn(f64, f64) -> f64,
    pub exact: Option<ExactSolution>,
}

pub struct Simulation {
    pub driver: MultirateDriver,
    pub sys: SweSystem,
    pub stats: Vec<StepStats>,
}

impl Simulation {
    pub fn new(mesh: MeshData, cfg: SimulationConfig) -> Result<Self> {
        let re = ReferenceElement::balanced(cfg.order)?;
        let exec = Executor::from_request(cfg.threads);
        let mut layout = FieldLayout::new(&re, &mesh);
        layout.set_initial(&re, &mesh, &exec, cfg.init, cfg.bathymetry);

        let tvb_geom = TvbGeometry::build(&mesh);
        let cfl = cfg.cfl.unwrap_or(0.25 / (2.0 * cfg.order as f64 + 1.0));

        // per-element steps from the initial wave speeds
        let mut max_speed = vec![0.0; mesh.k()];
        for e in 0..mesh.k() {
            let r = layout.nodal(e);
            let mut a: f64 = 0.0;
            for i in r {
                let q = Conserved::new(
                    layout.fields.h[i],
                    layout.fields.hu[i],
                    layout.fields.hv[i],
                );
                a = a.max(physics::wave_speed(q, &cfg.phys));
            }
            max_speed[e] = a;
        }
        let dt = compute_element_dt(&mesh.hk, &max_speed, cfl)?;
        let mut schedule = match cfg.stepping {
            TimeStepping::SingleRate => LevelSchedule::single_rate(&dt),
            TimeStepping::Multirate { max_levels } => LevelSchedule::assign(&dt, max_levels),
            TimeStepping::Forced(s) => s,
        };
        if let Some(t_end) = cfg.t_end {
            // shrink dt_min so t_end is an exact number of macro steps
            let macro_dt = schedule.macro_dt();
            if t_end > 0.0 && macro_dt.is_finite() {
                let n = (t_end / macro_dt).ceil().max(1.0);
                schedule.dt_min *= t_end / (n * macro_dt);
            }
        }

        let mut sys = SweSystem {
            re,
            mesh,
            layout,
            phys: cfg.phys,
            lim: cfg.lim,
            exec,
            kcfg: cfg.kernel,
            exact: cfg.exact,
            schedule: schedule.clone(),
            tvb_geom,
            means: vec![],
            mass_injected: 0.0,
            min_vertex_h_ever: f64::INFINITY,
            pp_scaled: 0,
            pp_dried: 0,
            tvb_limited: 0,
        };
        // initial limiting pass over everything, then fresh traces
        sys.means = sys.layout.element_means(&sys.re);
        let all: Vec<u32> = (0..sys.layout.k as u32).collect();
        sys.limit_elements(&all);
        refresh_traces(&mut sys.layout, &sys.re, &all, &sys.exec, &sys.kcfg);

        Ok(Simulation { driver: MultirateDriver::new(schedule), sys, stats: vec![] })
    }

    pub fn time(&self) -> f64 {
        self.driver.time
    }

    /// One macro step plus a statistics record.
    pub fn macro_step(&mut self) -> Result<()> {
        self.sys.pp_scaled = 0;
        self.sys.pp_dried = 0;
        self.sys.tvb_limited = 0;
        self.driver.macro_step(&mut self.sys)?;
        let schedule = &self.driver.schedule;
        let mean_h: Vec<f64> = self.sys.means.iter().map(|m| m.h).collect();
        let mask = build_dry_mask(&mean_h, &self.sys.mesh, self.sys.lim.h0);
        self.stats.push(StepStats {
            t: self.driver.time,
            dt_levels: (1..=schedule.nlevels).map(|l| schedule.dt_of(l)).collect(),
            pp_scaled: self.sys.pp_scaled,
            pp_dried: self.sys.pp_dried,
            tvb_limited: self.sys.tvb_limited,
            dry_elements: mask.iter().filter(|&&w| w == Wetness::Dry).count(),
            min_h: self.sys.min_depth(),
            min_vertex_h: self.sys.min_vertex_h_ever,
            mass: self.sys.layout.total_mass(&self.sys.re, &self.sys.mesh),
            mass_injected: self.sys.mass_injected,
        });
        Ok(())
    }

    /// Advance until `t_end` (which should be a multiple of the macro step;
    /// the constructor arranges that when `t_end` is declared up front).
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        let macro_dt = self.driver.schedule.macro_dt();
        while self.driver.time < t_end - 0.5 * macro_dt {
            self.macro_step()?;
        }
        Ok(())
    }

    /// Total steps the fine level would take to t_end; handy for sizing.
    pub fn macro_steps_to(&self, t_end: f64) -> usize {
        (t_end / self.driver.schedule.macro_dt()).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generators, BoundaryTag};

    fn still_lake_sim(tvb: bool) -> Simulation {
        let mesh = generators::rect_mesh(-1.0, 1.0, -1.0, 1.0, 5, 5, BoundaryTag::Wall).unwrap();
        let bump = |x: f64, y: f64| 0.4 * (-6.0 * (x * x + y * y)).exp();
        let mut lim = LimiterConfig::new(1e-8);
        lim.apply_tvb = tvb;
        Simulation::new(
            mesh,
            SimulationConfig {
                order: 3,
                cfl: None,
                phys: PhysicsConfig::new(9.81, 1e-8),
                lim,
                stepping: TimeStepping::SingleRate,
                threads: Some(2),
                kernel: KernelConfig::default(),
                t_end: None,
                init: &move |x, y| (1.0 - bump(x, y), 0.0, 0.0),
                bathymetry: &bump,
                exact: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn lake_at_rest_stays_at_rest() {
        let mut sim = still_lake_sim(false);
        for _ in 0..20 {
            sim.macro_step().unwrap();
        }
        // free surface still flat to machine precision
        let mut max_dev: f64 = 0.0;
        for e in 0..sim.sys.layout.k {
            for i in sim.sys.layout.nodal(e) {
                let eta = sim.sys.layout.fields.h[i] + sim.sys.layout.bathy[i];
                max_dev = max_dev.max((eta - 1.0).abs());
                max_dev = max_dev.max(sim.sys.layout.fields.hu[i].abs());
            }
        }
        assert!(max_dev < 1e-12, "lake at rest drifted: {max_dev}");
    }

    #[test]
    fn mass_conserved_on_closed_domain() {
        let mut sim = still_lake_sim(false);
        let m0 = sim.sys.layout.total_mass(&sim.sys.re, &sim.sys.mesh);
        for _ in 0..10 {
            sim.macro_step().unwrap();
        }
        let m1 = sim.sys.layout.total_mass(&sim.sys.re, &sim.sys.mesh);
        assert!(((m1 - m0) / m0).abs() < 1e-12);
    }
}
