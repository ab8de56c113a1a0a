//! Partition-based refutations: `ε`-partitions, the partition descent, the
//! cube lemma and asymptotic-dimension lower bounds on lattices.

mod adlower;
mod cube_lemma;
mod descent;
mod partition;

pub use adlower::{
    ad_lower_certify, ad_lower_refute, g_tilde_exact, mesh_steps, AdLowerCertificate, AdRefuteReport, GTildeReport,
    GTildeStep, SearchOutcome, DEFAULT_NODE_BUDGET, G_TILDE_MESH_STEPS, MAX_SEARCH_DIM, MAX_WINDOW_POINTS,
};
pub use cube_lemma::{cube_lemma_check, random_brick_cover, rasterize_bricks, CubeLemmaOutcome};
pub use descent::{
    descent_edge, partition_descent, positive_control, positive_epsilon, DescentFamily, DescentInput, Outcome, Refutation, StepKind,
    StepTrace, Violated, MAX_DESCENT_DIM,
};
pub use partition::{check_nested, epsilon_partition, face, PartitionInvariants, PartitionResult};
