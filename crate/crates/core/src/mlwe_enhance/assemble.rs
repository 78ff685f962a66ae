use serde::{Deserialize, Serialize};

use super::block::{build_subsample, subsample_source, CirculantBlock};
use super::schedule::{block_order, OffsetSchedule};
use crate::error::{param, Result};

/// Original instance row behind a matrix row, with its sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSource {
    pub row: usize,
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledMatrix {
    pub index: usize,
    pub blocks: Vec<usize>,
    pub offsets: Vec<usize>,
    pub rows: Vec<Vec<i64>>,
    pub sources: Vec<RowSource>,
}

impl AssembledMatrix {
    pub fn truncate(&mut self, rows: usize) {
        self.rows.truncate(rows);
        self.sources.truncate(rows);
    }
}

/// Concatenates offset subsamples of the blocks until at least `m` rows are present.
/// Blocks are not reused before all of them appeared, and matrix `i` starts with block
/// `i mod B`.
pub fn assemble_matrix(
    blocks: &[CirculantBlock],
    m: usize,
    matrix_index: usize,
    schedule: &mut OffsetSchedule,
    seed: u64,
) -> Result<AssembledMatrix> {
    let Some(first) = blocks.first() else {
        return param("no circulant blocks to assemble from");
    };
    let n = first.degree;
    if m == 0 {
        return param("matrix must have at least one row");
    }
    let uses = m.div_ceil(n + 1);
    let order = block_order(blocks.len(), uses, matrix_index, seed);
    let mut out = AssembledMatrix {
        index: matrix_index,
        blocks: Vec::with_capacity(uses),
        offsets: Vec::with_capacity(uses),
        rows: Vec::with_capacity(uses * (n + 1)),
        sources: Vec::with_capacity(uses * (n + 1)),
    };
    for b in order {
        let block = &blocks[b];
        let rho = schedule.next_offset(b);
        out.blocks.push(block.id);
        out.offsets.push(rho);
        out.rows.extend(build_subsample(block, rho)?);
        out.sources.extend((0..=n).map(|j| {
            let (idx, sign) = subsample_source(j, rho, n);
            RowSource { row: block.id * n + idx, sign }
        }));
    }
    Ok(out)
}
