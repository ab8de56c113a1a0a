//! Validators for cover claims and the statistics of a cover: multiplicity,
//! Lebesgue number and datapoints of the asymptotic dimension function.

mod certificate;
mod stats;
mod validate;

pub use certificate::{Certificate, CERTIFICATE_SCHEMA};
pub use stats::{ad_report, lebesgue_number, multiplicity, AdReport, LebesgueReport, MultiplicityReport, StatMode, EXACT_MULTIPLICITY_DIM};
pub use validate::{
    closest_pair, is_covered, padded_box_distance, point_depth, sample_window_point, validate_bounded,
    validate_coverage, validate_disjoint, BoundedCheck, ClosestPair, CoverageCheck, CoverageMode, DisjointCheck,
};
