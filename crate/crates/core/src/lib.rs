//! Exact computations around the Weyl group `W(3,r)`: its reflection
//! representation on the hyperbolic lattice `H_r`, its Cremona action on
//! configurations of points in P³, and restriction of divisor classes to the
//! base curve of a pencil of quadrics.

pub mod classifier;
pub mod config;
pub mod curve;
pub mod field;
pub mod harness;
pub mod intersection;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod weyl;
