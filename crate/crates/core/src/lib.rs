//! Exact geometry of coarse covers: sup-metric spaces built from lattices,
//! cover constructions with certified disjointness, and grid-based refuters.

pub mod analysis;
pub mod cover;
pub mod error;
pub mod metric;
pub mod refuter;
pub mod scalar;
pub mod spaces;

pub use error::{Error, Result};
pub use metric::{BoxSet, DeviationConstraint, Interval, TaggedPoint};
pub use scalar::Scalar;
pub use spaces::{CellSet, CubeGrid, Grid, SpaceKind, SpaceSpec};
