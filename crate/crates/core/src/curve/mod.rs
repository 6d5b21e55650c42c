//! The quartic base curve of a pencil of quadrics in P³ over `F_p`, a plane
//! cubic model of it, and the restriction of divisor classes to it.

pub mod cubic;
pub mod quadric;
pub mod restriction;
pub mod slice;

use thiserror::Error;

use crate::config::{ConfigError, ProjPoint};
use crate::field::FieldError;
use crate::lattice::LatticeError;

pub use cubic::{project_to_cubic, CubicModel, PlanePoint};
pub use quadric::{quadrics_through, QuadricForm, QuadricPencil};
pub use restriction::{plant_collision, tr_injectivity_test, PicClass, RestrictionMap, TrScan};
pub use slice::{eighth_base_point, hyperplane_section, sample_curve_point, sample_vr_config, sweep_curve, VrConfig};

/// A point of P³ over `F_p`.
pub type Point3 = ProjPoint<u64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("plane slice is degenerate")]
    DegenerateSlice,
    #[error("{what} failed after {attempts} attempts")]
    RetryBudget { what: &'static str, attempts: usize },
    #[error("p = {p} exceeds the enumeration limit {max}")]
    PrimeTooLarge { p: u64, max: u64 },
    #[error("r = {r} is below the minimum {min}")]
    RankTooSmall { r: usize, min: usize },
    #[error("non-generic instance: {0}")]
    NotGeneric(String),
    #[error("point {index} is not on the base curve")]
    NotOnCurve { index: usize },
    #[error("expected exactly one eighth base point, found {found}")]
    EighthPointCount { found: usize },
    #[error("quadrics span a space of dimension {dim}, not a pencil")]
    NotAPencil { dim: usize },
    #[error("the projection center has no image under the forward map")]
    CenterNotInDomain,
    #[error("cubic interpolation left a kernel of dimension {kernel_dim}")]
    RankDeficient { kernel_dim: usize },
    #[error("plane cubic is singular at {point:?}")]
    Singular { point: PlanePoint },
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
