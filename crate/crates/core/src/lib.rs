//! MAC (staggered) finite-volume discretization of the steady and unsteady
//! Stokes and Navier-Stokes equations on non-uniform tensor-product grids.
//!
//! Velocities live on faces, pressures on cells. Convection is written in
//! conservative form on the dual cells with centred or upwind face values.

pub mod analytic;
pub mod convection;
pub mod error;
pub mod fields;
pub mod harness;
pub mod interpolation;
pub mod io;
pub mod macgrid;
pub mod random;
pub mod solver;
pub mod sparse;
pub mod spatial_ops;

pub use error::{MacError, Result};
pub use macgrid::{build_grid, GridSpec, MacGrid};
