//! Explicit cover families and decompositions.

mod family;
mod lattice;
mod union;

pub use family::{BlockRef, CoverBundle, FamilyPart, PeriodicFamily, Provenance};
pub use lattice::{
    build_k_family_cover, build_k_family_cover_with_margin, build_two_family_cover,
    build_two_family_cover_with_margin, k_family_level, lattice_exponent, Level, DEFAULT_MARGIN,
};
pub use union::{
    brick_families, build_tail_singletons, build_x_omega_g, build_y2omega_cover, finite_part_dimension,
    g_tilde_low, singleton_threshold, y2omega_family_bound, y2omega_thin_space, XOmegaDecomposition,
    BRICK_DIM_LIMIT,
};
pub(crate) use family::shift_product;
