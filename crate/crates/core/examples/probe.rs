use swelldg_core::kernels::KernelConfig;
use swelldg_core::limiters::LimiterConfig;
use swelldg_core::physics::PhysicsConfig;
use swelldg_core::solver::{Simulation, SimulationConfig, TimeStepping};
use swelldg_core::verify::norms::{eoc_fit, l2_error};
use swelldg_core::verify::TestCase;

fn main() {
    let case = TestCase::from_name("parabolicBowl").unwrap();
    let t_end = 0.5 * case.period();
    for eps in [1e-4f64, 1e-3, 1e-2] {
        let h_dry = 1e-3f64;
        println!("== h_dry 1e-3, eps = {eps:.1e}, TVB off");
        for order in [1usize, 2, 3] {
            let mut glob = vec![];
            let mut loc = vec![];
            for res in [16usize, 23, 32] {
                let mesh = case.build_mesh(res).unwrap();
                let h = case.mesh_h(&mesh);
                let (c2, c3) = (case.clone(), case.clone());
                let mut lim = LimiterConfig::new(1e-6);
                lim.apply_tvb = false;
                lim.eps = eps;
                let mut sim = Simulation::new(
                    mesh,
                    SimulationConfig {
                        order,
                        cfl: Some(0.125 / (2.0 * order as f64 + 1.0)),
                        phys: PhysicsConfig::new(case.gravity(), h_dry),
                        lim,
                        stepping: TimeStepping::SingleRate,
                        threads: Some(2),
                        kernel: KernelConfig::default(),
                        t_end: Some(t_end),
                        init: &move |x, y| c2.exact(x, y, 0.0),
                        bathymetry: &move |x, y| c3.bathymetry(x, y),
                        exact: None,
                    },
                )
                .unwrap();
                match sim.advance_to(t_end) {
                    Ok(()) => {
                        let errs = l2_error(&sim.sys.re, &sim.sys.mesh, &sim.sys.layout, &case, sim.time(), None);
                        let errs_loc = l2_error(
                            &sim.sys.re, &sim.sys.mesh, &sim.sys.layout, &case, sim.time(),
                            Some(&|x: f64, y: f64| (x * x + y * y).sqrt() < 500.0),
                        );
                        glob.push((h, errs[0]));
                        loc.push((h, errs_loc[0]));
                    }
                    Err(e) => println!("  N={order} res={res} FAILED {e}"),
                }
            }
            if glob.len() == 3 {
                println!(
                    "  N={order}: global EOC {:.2} (errs {:.3e} {:.3e} {:.3e}), local EOC {:.2} ({:.2e} {:.2e} {:.2e})",
                    eoc_fit(&glob).unwrap(), glob[0].1, glob[1].1, glob[2].1,
                    eoc_fit(&loc).unwrap(), loc[0].1, loc[1].1, loc[2].1
                );
            }
        }
    }
}
