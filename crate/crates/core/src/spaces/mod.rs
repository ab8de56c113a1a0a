//! Metric spaces used by the covers, their finite windows, and grids.

mod grid;
mod spec;

pub use grid::{cube_grid, rasterize_box, rasterize_space, skeleton, CellSet, CubeGrid, Grid};
pub use spec::{cube_window, SpaceKind, SpaceSpec, DEFAULT_GUARD};

