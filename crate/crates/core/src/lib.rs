//! Fusion rings and fusion modules over Q(√5): exact arithmetic, ring and
//! module validation, exhaustive enumeration of fusion modules, dual rings,
//! and compatibility checks between candidate algebra objects.

pub mod arith;
pub mod compat;
pub mod dual;
pub mod enumerate;
pub mod expr;
pub mod figures;
pub mod io;
pub mod matrix;
pub mod module;
pub mod ring;
pub mod verify;

pub use arith::QuadNumber;
pub use module::{DimVector, FusionModule};
pub use ring::catalog::{catalog_names, catalog_ring, CatalogRing};
pub use ring::{FusionRing, Grading, ObjectVector};
