//! Pointwise shallow water physics: fluxes, sources, wave speeds,
//! hydrostatic reconstruction and the well-balanced local Lax-Friedrichs
//! interface flux. All operations are pure functions on value types.

use crate::mesh::BoundaryTag;

/// Conserved triple (h, hu, hv). Also used for flux and increment triples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

impl Conserved {
    pub const ZERO: Conserved = Conserved { h: 0.0, hu: 0.0, hv: 0.0 };

    pub fn new(h: f64, hu: f64, hv: f64) -> Self {
        Conserved { h, hu, hv }
    }

    pub fn max_abs(&self) -> f64 {
        self.h.abs().max(self.hu.abs()).max(self.hv.abs())
    }
}

impl std::ops::Add for Conserved {
    type Output = Conserved;
    fn add(self, o: Conserved) -> Conserved {
        Conserved::new(self.h + o.h, self.hu + o.hu, self.hv + o.hv)
    }
}

impl std::ops::Sub for Conserved {
    type Output = Conserved;
    fn sub(self, o: Conserved) -> Conserved {
        Conserved::new(self.h - o.h, self.hu - o.hu, self.hv - o.hv)
    }
}

impl std::ops::Mul<Conserved> for f64 {
    type Output = Conserved;
    fn mul(self, q: Conserved) -> Conserved {
        Conserved::new(self * q.h, self * q.hu, self * q.hv)
    }
}

/// Gravity, dry threshold and the optional wave-speed floor.
#[derive(Debug, Clone, Copy)]
pub struct PhysicsConfig {
    pub g: f64,
    /// Depth below which velocities are treated as zero.
    pub h_dry: f64,
    /// Lower bound on the wave speed; zero disables the floor.
    pub lambda_floor: f64,
}

impl PhysicsConfig {
    pub fn new(g: f64, h_dry: f64) -> Self {
        PhysicsConfig { g, h_dry, lambda_floor: 0.0 }
    }
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { g: 9.81, h_dry: 1e-8, lambda_floor: 0.0 }
    }
}

/// Desingularized velocity: momenta divided by depth when the point is wet,
/// zero otherwise. This is the only place 1/h appears.
#[inline]
pub fn velocity(q: Conserved, cfg: &PhysicsConfig) -> (f64, f64) {
    if q.h < cfg.h_dry {
        (0.0, 0.0)
    } else {
        (q.hu / q.h, q.hv / q.h)
    }
}

/// Physical fluxes F, G and the bathymetry source S at one point.
/// Dry points (h below the threshold) carry only hydrostatic pressure.
#[inline]
pub fn flux_source(
    q: Conserved,
    grad_b: (f64, f64),
    cfg: &PhysicsConfig,
) -> (Conserved, Conserved, Conserved) {
    let (u, v) = velocity(q, cfg);
    let p = 0.5 * cfg.g * q.h * q.h;
    let f = Conserved::new(q.h * u, q.h * u * u + p, q.h * u * v);
    let g = Conserved::new(q.h * v, q.h * u * v, q.h * v * v + p);
    let s = Conserved::new(0.0, -cfg.g * q.h * grad_b.0, -cfg.g * q.h * grad_b.1);
    (f, g, s)
}

/// Normal projection of the physical flux at one point.
#[inline]
pub fn normal_flux(q: Conserved, n: (f64, f64), cfg: &PhysicsConfig) -> Conserved {
    let (u, v) = velocity(q, cfg);
    let un = u * n.0 + v * n.1;
    let p = 0.5 * cfg.g * q.h * q.h;
    Conserved::new(q.h * un, q.h * u * un + p * n.0, q.h * v * un + p * n.1)
}

/// Wave speed |(u,v)| + sqrt(g h), floored at `lambda_floor`. Negative
/// depths (quadrature undershoot on nearly dry elements) are clamped.
#[inline]
pub fn wave_speed(q: Conserved, cfg: &PhysicsConfig) -> f64 {
    let (u, v) = velocity(q, cfg);
    let a = (u * u + v * v).sqrt() + (cfg.g * q.h.max(0.0)).sqrt();
    a.max(cfg.lambda_floor)
}

/// Hydrostatic interface reconstruction:
/// h*(+-) = max(0, h(+-) + B(+-) - max(B+, B-)), with the original
/// desingularized trace velocities multiplying the reconstructed depths.
#[inline]
pub fn hydrostatic_reconstruct(
    q_m: Conserved,
    b_m: f64,
    q_p: Conserved,
    b_p: f64,
    cfg: &PhysicsConfig,
) -> (Conserved, Conserved) {
    let b_max = b_m.max(b_p);
    let (um, vm) = velocity(q_m, cfg);
    let (up, vp) = velocity(q_p, cfg);
    let h_m = (q_m.h + b_m - b_max).max(0.0);
    let h_p = (q_p.h + b_p - b_max).max(0.0);
    (
        Conserved::new(h_m, h_m * um, h_m * vm),
        Conserved::new(h_p, h_p * up, h_p * vp),
    )
}

/// Well-balanced normal flux seen from the minus side of an interface.
///
/// The local Lax-Friedrichs flux of the hydrostatically reconstructed
/// states plus the minus-side hydrostatic pressure correction
/// (g/2)(h^2 - h*^2) n. The stabilization speed is the larger wave speed of
/// the two reconstructed states. The plus side flux is obtained by calling
/// with swapped arguments and the flipped normal.
#[inline]
pub fn well_balanced_flux(
    q_m: Conserved,
    b_m: f64,
    q_p: Conserved,
    b_p: f64,
    n: (f64, f64),
    cfg: &PhysicsConfig,
) -> Conserved {
    let (qs_m, qs_p) = hydrostatic_reconstruct(q_m, b_m, q_p, b_p, cfg);
    let lambda = wave_speed(qs_m, cfg).max(wave_speed(qs_p, cfg));
    let f_m = normal_flux(qs_m, n, cfg);
    let f_p = normal_flux(qs_p, n, cfg);
    let lf = 0.5 * (f_m + f_p) - (0.5 * lambda) * (qs_p - qs_m);
    let corr = 0.5 * cfg.g * (q_m.h * q_m.h - qs_m.h * qs_m.h);
    lf + Conserved::new(0.0, corr * n.0, corr * n.1)
}

/// Exact-solution evaluator used by Dirichlet boundaries: (x, y, t) -> (h, u, v).
pub type ExactFn<'a> = &'a (dyn Fn(f64, f64, f64) -> (f64, f64, f64) + Sync);

/// Ghost state for a boundary face.
///
/// wall: mirror with the normal momentum negated; outflow: copy;
/// dirichlet: exact solution at (x, y, t), which must be supplied.
pub fn boundary_state(
    q_in: Conserved,
    tag: BoundaryTag,
    n: (f64, f64),
    exact: Option<ExactFn>,
    x: f64,
    y: f64,
    t: f64,
) -> crate::Result<Conserved> {
    match tag {
        BoundaryTag::Wall => {
            let qn = q_in.hu * n.0 + q_in.hv * n.1;
            Ok(Conserved::new(
                q_in.h,
                q_in.hu - 2.0 * qn * n.0,
                q_in.hv - 2.0 * qn * n.1,
            ))
        }
        BoundaryTag::Outflow => Ok(q_in),
        BoundaryTag::Dirichlet => {
            let f = exact.ok_or_else(|| {
                crate::Error::config("dirichlet boundary requires an exact-solution evaluator")
            })?;
            let (h, u, v) = f(x, y, t);
            Ok(Conserved::new(h, h * u, h * v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(g: f64) -> PhysicsConfig {
        PhysicsConfig::new(g, 1e-8)
    }

    #[test]
    fn still_water_flux() {
        let (f, g, s) = flux_source(Conserved::new(1.0, 0.0, 0.0), (0.0, 0.0), &cfg(2.0));
        assert_eq!((f.h, f.hu, f.hv), (0.0, 1.0, 0.0));
        assert_eq!((g.h, g.hu, g.hv), (0.0, 0.0, 1.0));
        assert_eq!((s.h, s.hu, s.hv), (0.0, 0.0, 0.0));
    }

    #[test]
    fn moving_state_flux_hand_values() {
        let (f, g, _) = flux_source(Conserved::new(2.0, 2.0, 4.0), (0.0, 0.0), &cfg(1.0));
        assert_eq!((f.h, f.hu, f.hv), (2.0, 4.0, 4.0));
        assert_eq!((g.h, g.hu, g.hv), (4.0, 4.0, 10.0));
    }

    #[test]
    fn bathymetry_source() {
        let (_, _, s) = flux_source(Conserved::new(1.0, 0.0, 0.0), (0.5, 0.0), &cfg(2.0));
        assert_eq!((s.h, s.hu, s.hv), (0.0, -1.0, 0.0));
    }

    #[test]
    fn dry_state_zero_advection() {
        let c = cfg(9.81);
        let (f, g, _) = flux_source(Conserved::new(0.0, 0.3, -0.1), (0.0, 0.0), &c);
        assert_eq!(f, Conserved::ZERO);
        assert_eq!(g, Conserved::ZERO);
    }

    #[test]
    fn wave_speed_values() {
        assert!((wave_speed(Conserved::new(1.0, 0.0, 0.0), &cfg(1.0)) - 1.0).abs() < 1e-15);
        let a = wave_speed(Conserved::new(1.0, 3.0, 4.0), &cfg(9.81));
        assert!((a - (5.0 + 9.81f64.sqrt())).abs() < 1e-12);
        let mut c = cfg(9.81);
        c.lambda_floor = 2.5;
        assert_eq!(wave_speed(Conserved::new(0.0, 0.0, 0.0), &c), 2.5);
    }

    #[test]
    fn reconstruction_hand_values() {
        let c = cfg(1.0);
        // (h+, B+, h-, B-) = (2, 0, 1, 1): both reconstruct to depth 1
        let (qs_m, qs_p) =
            hydrostatic_reconstruct(Conserved::new(1.0, 0.0, 0.0), 1.0, Conserved::new(2.0, 0.0, 0.0), 0.0, &c);
        assert!((qs_m.h - 1.0).abs() < 1e-15);
        assert!((qs_p.h - 1.0).abs() < 1e-15);

        // flat interface is the identity
        let q1 = Conserved::new(1.3, 0.4, -0.2);
        let q2 = Conserved::new(0.7, 0.1, 0.3);
        let (r1, r2) = hydrostatic_reconstruct(q1, 0.5, q2, 0.5, &c);
        assert!((r1.h - q1.h).abs() < 1e-15 && (r1.hu - q1.hu).abs() < 1e-15);
        assert!((r2.h - q2.h).abs() < 1e-15 && (r2.hv - q2.hv).abs() < 1e-15);

        // emerged topography blocks the flow: both sides dry out
        let (d_m, d_p) =
            hydrostatic_reconstruct(Conserved::new(0.0, 0.0, 0.0), 2.0, Conserved::new(1.0, 0.5, 0.0), 0.0, &c);
        assert_eq!(d_m.h, 0.0);
        assert_eq!(d_p.h, 0.0);
        assert_eq!(d_p.hu, 0.0);
    }

    #[test]
    fn flux_consistency_identical_traces() {
        let c = cfg(9.81);
        let q = Conserved::new(1.2, 0.6, -0.3);
        let n = (0.6, 0.8);
        let f = well_balanced_flux(q, 0.4, q, 0.4, n, &c);
        let exact = normal_flux(q, n, &c);
        assert!((f - exact).max_abs() < 1e-14);
    }

    #[test]
    fn correction_vanishes_on_flat_bathymetry() {
        // h+ = h- = h*, B+ = B-: flux must equal plain Lax-Friedrichs
        let c = cfg(2.0);
        let q_m = Conserved::new(1.0, 0.2, 0.0);
        let q_p = Conserved::new(0.8, -0.1, 0.1);
        let n = (1.0, 0.0);
        let f = well_balanced_flux(q_m, 0.3, q_p, 0.3, n, &c);
        let lambda = wave_speed(q_m, &c).max(wave_speed(q_p, &c));
        let lf = 0.5 * (normal_flux(q_m, n, &c) + normal_flux(q_p, n, &c))
            - (0.5 * lambda) * (q_p - q_m);
        assert!((f - lf).max_abs() < 1e-15);
    }

    #[test]
    fn lf_dissipation_mass_component() {
        // equal depths, velocity jump only: mass flux equals the central flux
        let c = cfg(9.81);
        let q_m = Conserved::new(1.0, 0.5, 0.0);
        let q_p = Conserved::new(1.0, -0.2, 0.0);
        let n = (1.0, 0.0);
        let f = well_balanced_flux(q_m, 0.0, q_p, 0.0, n, &c);
        assert!((f.h - 0.5 * (q_m.hu + q_p.hu)).abs() < 1e-15);
    }

    #[test]
    fn rotational_consistency() {
        // evaluating in a rotated frame and rotating back equals direct
        let c = cfg(9.81);
        let states = [
            (Conserved::new(1.1, 0.3, -0.4), 0.2, Conserved::new(0.9, -0.2, 0.6), 0.5),
            (Conserved::new(0.4, 0.1, 0.1), 0.0, Conserved::new(1.6, 0.8, -0.3), 0.1),
        ];
        let n = {
            let th: f64 = 0.9273;
            (th.cos(), th.sin())
        };
        for &(q_m, b_m, q_p, b_p) in &states {
            let direct = well_balanced_flux(q_m, b_m, q_p, b_p, n, &c);
            // rotate so the normal becomes +x
            let rot = |q: Conserved| {
                Conserved::new(q.h, n.0 * q.hu + n.1 * q.hv, -n.1 * q.hu + n.0 * q.hv)
            };
            let unrot = |q: Conserved| {
                Conserved::new(q.h, n.0 * q.hu - n.1 * q.hv, n.1 * q.hu + n.0 * q.hv)
            };
            let rotated = unrot(well_balanced_flux(rot(q_m), b_m, rot(q_p), b_p, (1.0, 0.0), &c));
            assert!((direct - rotated).max_abs() < 1e-12);
        }
    }

    #[test]
    fn interior_flux_antisymmetry_flat_bathymetry() {
        // with equal bathymetry the correction is zero and the two side
        // fluxes are exactly opposite
        let c = cfg(9.81);
        let q_m = Conserved::new(1.2, 0.4, -0.1);
        let q_p = Conserved::new(0.9, -0.3, 0.2);
        let n: (f64, f64) = (0.36, -0.932_952_303_175_248_8);
        let n = {
            let len = (n.0 * n.0 + n.1 * n.1).sqrt();
            (n.0 / len, n.1 / len)
        };
        let f_m = well_balanced_flux(q_m, 0.7, q_p, 0.7, n, &c);
        let f_p = well_balanced_flux(q_p, 0.7, q_m, 0.7, (-n.0, -n.1), &c);
        assert!((f_m + f_p).max_abs() < 1e-14);
    }

    #[test]
    fn wall_mirrors_normal_momentum() {
        let n = (0.8, 0.6);
        let q = Conserved::new(1.0, 0.8 * 0.5, 0.6 * 0.5); // purely normal momentum
        let ghost = boundary_state(q, BoundaryTag::Wall, n, None, 0.0, 0.0, 0.0).unwrap();
        assert!((ghost.h - 1.0).abs() < 1e-15);
        assert!((ghost.hu + q.hu).abs() < 1e-15);
        assert!((ghost.hv + q.hv).abs() < 1e-15);

        // tangential momentum passes through
        let qt = Conserved::new(1.0, -0.6 * 0.3, 0.8 * 0.3);
        let ghost_t = boundary_state(qt, BoundaryTag::Wall, n, None, 0.0, 0.0, 0.0).unwrap();
        assert!((ghost_t.hu - qt.hu).abs() < 1e-15);
        assert!((ghost_t.hv - qt.hv).abs() < 1e-15);
    }

    #[test]
    fn outflow_copies_interior() {
        let q = Conserved::new(0.4, 0.1, -0.9);
        let ghost = boundary_state(q, BoundaryTag::Outflow, (1.0, 0.0), None, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(ghost, q);
    }

    #[test]
    fn dirichlet_requires_evaluator() {
        let q = Conserved::new(1.0, 0.0, 0.0);
        assert!(boundary_state(q, BoundaryTag::Dirichlet, (1.0, 0.0), None, 0.0, 0.0, 0.0).is_err());
        let f = |x: f64, _y: f64, t: f64| (x + t, 1.0, 2.0);
        let ghost =
            boundary_state(q, BoundaryTag::Dirichlet, (1.0, 0.0), Some(&f), 2.0, 0.0, 1.0).unwrap();
        assert_eq!(ghost, Conserved::new(3.0, 3.0, 6.0));
    }
}
