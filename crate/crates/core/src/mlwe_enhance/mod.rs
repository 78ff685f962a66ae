//! Sample amplification for ring and module instances: offset subsampling of circulant
//! blocks, projection/pruning of the embedding, and negacyclic orbit expansion.

mod assemble;
mod block;
mod orbit;
mod prune;
mod schedule;

pub use assemble::{assemble_matrix, AssembledMatrix, RowSource};
pub use block::{blocks_from_instance, build_subsample, rotate_parts, subsample_source, CirculantBlock};
pub use orbit::{apply_automorphism, orbit_expand};
pub use prune::{project, project_and_prune, reinsert, PruneBookkeeping};
pub use schedule::{block_order, default_stride, OffsetSchedule};
