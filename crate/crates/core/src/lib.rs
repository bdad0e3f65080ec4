//! Symmetric div-quasiconvex hulls of isotropic sets in the pressure/shear plane.
//!
//! The crate covers four layers:
//! - [`tensor`] and [`invariants`]: symmetric matrices and the map `σ -> (p, q)`;
//! - [`hull`]: downward closure, convex hull and the separation hull of a
//!   [`planar::PlanarSet`], with closed-form reference hulls;
//! - [`curves`] and [`lamination`]: rank-two curve families, their tensor lifts
//!   and the lamination fixpoint used as an inner bound;
//! - [`fields`] and [`verify`]: periodic divergence-free test fields, stress
//!   potentials and the inequality checks built on them.

pub mod cli;
pub mod curves;
pub mod error;
pub mod fields;
pub mod hull;
pub mod invariants;
pub mod lamination;
pub mod membership;
pub mod planar;
pub mod region;
pub mod svg;
pub mod tensor;
pub mod verify;

pub use error::{Result, SdqcError};
pub use hull::{
    circle_point_hull, convex_hull, downward_closure, hsdqc, is_separable, slope_condition,
    two_point_hull, HullModel, HullResult,
};
pub use invariants::{deviator_eigen, phi, separator_value, tartar_f, Direction, PQPoint};
pub use planar::{Arc, PlanarSet};
pub use region::{Grid, Region};
pub use tensor::{Matrix, SymMatrix};
