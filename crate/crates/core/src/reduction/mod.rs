//! Lattice reduction engine: dual embedding, LLL, enumeration-based BKZ, polish,
//! cross-tour short-vector accumulation and closed-form estimates.

mod analytic;
mod bkz;
mod embedding;
mod enumeration;
mod lattice;
mod pool;
mod priority;
mod progressive;
mod usvp;

pub use analytic::{
    ball_gaussian_heuristic, bkz_cost, embedding_objective, gaussian_heuristic,
    log_gaussian_heuristic, optimal_sample_count, optimal_sample_count_raw, root_hermite,
    CostReport,
};
pub use bkz::{bkz, bkz_tour, ext_gcd, insert_combination, polish, TourStats, GH_RADIUS_FACTOR};
pub use embedding::{embed, EmbeddedBasis, EmbeddedRow};
pub(crate) use embedding::embedding_rows;
pub use enumeration::{enumerate_svp, SvpSolution};
pub use lattice::{dot, mat_mul, norm_sq, Lattice, SIZE_REDUCTION_ETA};
pub use pool::{sign_normalize, PoolEntry, ShortVectorPool};
pub use priority::PriorityModel;
pub use progressive::{progressive_reduce, ReductionConfig, ReductionStats};
pub use usvp::{kannan_embedding, primal_usvp_attack, UsvpConfig};
