//! Back-and-forth error compensation and correction (BFECC) solvers for the
//! 1D and 2D TMz Maxwell equations.
//!
//! - [`grid`]: uniform and point-shifted logically rectangular grids
//! - [`lsq`]: local linear least-squares fits
//! - [`schemes`]: central difference, Lax-Friedrichs, θ and least-squares steps
//! - [`bfecc`]: the three-substep compensation wrapper
//! - [`analysis`]: Fourier symbols, stability scans, CFL bounds, dispersion
//! - [`pml`]: convolutional PML and TF/SF plane-wave injection
//! - [`diagnostics`]: error norms, divergence, convergence orders
//! - [`harness`]: experiment definitions and config files

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bfecc;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod grid;
pub mod harness;
pub mod lsq;
pub mod pml;
pub mod schemes;

pub use bfecc::{Bfecc, FieldSet, Operator, Pass};
pub use error::{Error, Result};
pub use grid::{Boundary, Grid2, Rect};
pub use schemes::{FieldState1, FieldState2, Scheme1, Scheme2, SchemeKind, SchemeSpec};
