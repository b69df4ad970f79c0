//! Multi-scale blow-up laboratory for the generalized De Gregorio model
//! `w_t + a u w_x = w Hw` and the axisymmetric Euler kernels built on the
//! same bump cascade.
//!
//! Numerical primitives live in [`quad`] and [`special`]. [`ode_cascade`]
//! holds the height system, [`singular_integrals`] the Hilbert transforms and
//! interaction bounds, [`profiles`] the initial data, [`degregorio_solver`]
//! the two PDE backends, [`euler_axisym`] the 3D kernel integrals and
//! recursion lemmas, and [`experiment`] the runner behind the command line.

pub mod degregorio_solver;
pub mod error;
pub mod euler_axisym;
pub mod experiment;
pub mod ode_cascade;
pub mod profiles;
pub mod quad;
pub mod singular_integrals;
pub mod special;

pub use error::{Error, Result};
