//! Nodal discontinuous Galerkin solver for the 2D nonlinear shallow water
//! equations on unstructured triangular meshes.
//!
//! The crate is organized around the stages of the method:
//!
//! * [`refel`] — operators on the master triangle (nodes, quadrature,
//!   interpolation/projection/lift matrices),
//! * [`mesh`] — triangulation topology, connectivity and geometric factors,
//! * [`physics`] — pointwise fluxes, wave speeds and the well-balanced
//!   local Lax-Friedrichs interface flux with hydrostatic reconstruction,
//! * [`limiters`] — positivity-preserving and TVB slope limiters,
//! * [`timestep`] — CFL steps, level grouping and the multirate
//!   Adams-Bashforth driver,
//! * [`kernels`] — the data-parallel volume/surface/update passes over a
//!   padded structure-of-arrays layout, plus the benchmark harness,
//! * [`solver`] — glue that assembles a full simulation,
//! * [`verify`] — analytical test cases, error norms and convergence fits.

pub mod error;
pub mod kernels;
pub mod limiters;
pub mod linalg;
pub mod mesh;
pub mod physics;
pub mod refel;
pub mod solver;
pub mod timestep;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
