//! CFL time steps, level grouping and the multirate third-order
//! Adams-Bashforth driver.
//!
//! Elements with allowable step dt fall into level l when
//! 2^(l-1) dt_min <= dt < 2^l dt_min and advance with step 2^(l-1) dt_min.
//! One macro step advances every level to the same time: levels run
//! coarsest first, each completing its substeps with its own third-order
//! Adams-Bashforth history (Euler and AB2 during startup).

use crate::{Error, Result};

/// Adams-Bashforth weights for the newest, previous and oldest right-hand
/// sides. Stages 1 and 2 are the self-starting Euler/AB2 ramp.
pub fn ab3_weights(stage: usize) -> [f64; 3] {
    match stage {
        0 => panic!("stage counter starts at 1"),
        1 => [1.0, 0.0, 0.0],
        2 => [1.5, -0.5, 0.0],
        _ => [23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
    }
}

/// Per-element allowable step dt_e = C * H_e / a_e from characteristic
/// lengths and the maximum wave speed over the element's nodes. A dry
/// element with zero wave speed gets an unbounded step (it lands in the
/// top level). Non-finite wave speeds signal blowup.
pub fn compute_element_dt(hk: &[f64], max_wave_speed: &[f64], cfl: f64) -> Result<Vec<f64>> {
    assert_eq!(hk.len(), max_wave_speed.len());
    let mut dt = Vec::with_capacity(hk.len());
    for (k, (&h, &a)) in hk.iter().zip(max_wave_speed).enumerate() {
        if !a.is_finite() {
            return Err(Error::State(format!("non-finite wave speed in element {k}")));
        }
        dt.push(if a > 0.0 { cfl * h / a } else { f64::INFINITY });
    }
    Ok(dt)
}

/// Element-to-level assignment with the per-level execution plan. Fixed for
/// a whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSchedule {
    pub dt_min: f64,
    pub nlevels: usize,
    /// 1-based level per element.
    pub level_of: Vec<usize>,
    /// Elements grouped by level (index 0 holds level 1).
    pub elements_by_level: Vec<Vec<u32>>,
}

impl LevelSchedule {
    /// Group elements into levels; levels above `max_levels` clamp to the
    /// top.
    pub fn assign(dt: &[f64], max_levels: usize) -> Self {
        assert!(!dt.is_empty() && max_levels >= 1);
        let dt_min = dt.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(dt_min > 0.0, "nonpositive time step");
        let mut level_of = Vec::with_capacity(dt.len());
        let mut nlevels = 1;
        for &d in dt {
            let ratio = d / dt_min;
            let mut level = 1 + ratio.log2().floor().max(0.0) as usize;
            // guard the inequality against roitoff at the bin edges
            if level > 1 && ratio < 2f64.powi(level as i32 - 1) {
                level -= 1;
            }
            if ratio >= 2f64.powi(level as i32) {
                level += 1;
            }
            let level = level.min(max_levels);
            nlevels = nlevels.max(level);
            level_of.push(level);
        }
        let mut elements_by_level = vec![Vec::new(); nlevels];
        for (e, &l) in level_of.iter().enumerate() {
            elements_by_level[l - 1].push(e as u32);
        }
        LevelSchedule { dt_min, nlevels, level_of, elements_by_level }
    }

    /// Single-rate schedule: every element in level 1 at the global minimum
    /// step.
    pub fn single_rate(dt: &[f64]) -> Self {
        let dt_min = dt.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(dt_min > 0.0);
        LevelSchedule {
            dt_min,
            nlevels: 1,
            level_of: vec![1; dt.len()],
            elements_by_level: vec![(0..dt.len() as u32).collect()],
        }
    }

    /// Explicit assignment, for forced-level experiments.
    pub fn forced(dt_min: f64, level_of: Vec<usize>) -> Self {
        let nlevels = level_of.iter().cloned().max().unwrap_or(1);
        let mut elements_by_level = vec![Vec::new(); nlevels];
        for (e, &l) in level_of.iter().enumerate() {
            elements_by_level[l - 1].push(e as u32);
        }
        LevelSchedule { dt_min, nlevels, level_of, elements_by_level }
    }

    /// Step size of level l (1-based).
    pub fn dt_of(&self, level: usize) -> f64 {
        2f64.powi(level as i32 - 1) * self.dt_min
    }

    /// Substeps level l performs per macro step.
    pub fn nsteps(&self, level: usize) -> usize {
        1 << (self.nlevels - level)
    }

    /// Macro step: the step of the coarsest level.
    pub fn macro_dt(&self) -> f64 {
        self.dt_of(self.nlevels)
    }

    pub fn elements(&self, level: usize) -> &[u32] {
        &self.elements_by_level[level - 1]
    }
}

/// The system advanced by the driver. Implementations own the state; the
/// driver only sequences evaluations, updates and history slots.
pub trait LevelSystem {
    /// Evaluate the right-hand side for the elements of `level` at time `t`
    /// into history slot `slot`.
    fn eval_rhs(&mut self, level: usize, slot: usize, t: f64) -> Result<()>;

    /// Advance the elements of `level` by dt using the weighted slots
    /// (newest first), then post-process (limiting, trace refresh) at the
    /// new time.
    fn apply_update(
        &mut self,
        level: usize,
        dt: f64,
        weights: [f64; 3],
        slots: [usize; 3],
        t_new: f64,
    ) -> Result<()>;
}

/// Orchestrates the macro-step loop nest and the per-level AB history.
#[derive(Debug, Clone)]
pub struct MultirateDriver {
    pub schedule: LevelSchedule,
    /// Substeps taken so far, per level (drives the startup ramp).
    steps_taken: Vec<usize>,
    pub time: f64,
    /// Right-hand-side evaluations, counted per element.
    pub rhs_element_evals: u64,
}

impl MultirateDriver {
    pub fn new(schedule: LevelSchedule) -> Self {
        let nlevels = schedule.nlevels;
        MultirateDriver {
            schedule,
            steps_taken: vec![0; nlevels],
            time: 0.0,
            rhs_element_evals: 0,
        }
    }

    /// One macro step: levels descending, substeps inner. After it, every
    /// element sits at `time + macro_dt`.
    pub fn macro_step<S: LevelSystem>(&mut self, sys: &mut S) -> Result<()> {
        let nlevels = self.schedule.nlevels;
        for level in (1..=nlevels).rev() {
            let dt = self.schedule.dt_of(level);
            for nstep in 0..self.schedule.nsteps(level) {
                let taken = self.steps_taken[level - 1];
                let slot = taken % 3;
                let t = self.time + nstep as f64 * dt;
                sys.eval_rhs(level, slot, t)?;
                self.rhs_element_evals += self.schedule.elements(level).len() as u64;
                let stage = (taken + 1).min(3);
                let weights = ab3_weights(stage);
                let slots = [slot, (slot + 2) % 3, (slot + 1) % 3];
                sys.apply_update(level, dt, weights, slots, t + dt)?;
                self.steps_taken[level - 1] += 1;
            }
        }
        self.time += self.schedule.macro_dt();
        Ok(())
    }

    /// Seed the startup counters as if `n` substeps had already run on
    /// every level (used with pre-filled histories).
    pub fn seed_history(&mut self, n: usize) {
        for s in self.steps_taken.iter_mut() {
            *s = n;
        }
    }
}
