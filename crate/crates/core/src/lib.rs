//! Symbolic and numeric geometry of 3D Pfaff equations `P dx + Q dy + R dz = 0`.
//!
//! The crate is `no_std` (it needs `alloc`). Modules, bottom-up:
//!
//! - [`symcore`]: exact rational-function algebra and the expression parser.
//! - [`field`]: vector fields / Pfaff forms, holonomicity, projective
//!   extension of planar systems, and the catalog of named systems.
//! - [`geometry`]: the affine connection built from a field, its curvature,
//!   direction forms and the Chern–Simons density.
//! - [`extension`]: the 6D Riemann extension metric and the Ψ-transport system.
//! - [`ode`]: integrators for flows, geodesics, asymptotic lines and
//!   extended geodesics.

#![no_std]
// tensor code indexes several arrays per loop; negated comparisons reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod extension;
pub mod field;
pub mod geometry;
pub mod ode;
pub mod symcore;
