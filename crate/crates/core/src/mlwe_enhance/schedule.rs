use log::warn;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::instances::{seeded_rng, SeededRng};

/// Per-block offset sequences: a deterministic stride pass, then fresh offsets drawn
/// uniformly from the unused ones, then uniform repeats once every offset was used.
#[derive(Clone, Debug)]
pub struct OffsetSchedule {
    n: usize,
    stride: usize,
    used: Vec<Vec<bool>>,
    draws: Vec<usize>,
    prefix: Vec<Vec<usize>>,
    rng: SeededRng,
}

impl OffsetSchedule {
    pub fn new(n: usize, stride: usize, blocks: usize, seed: u64) -> Self {
        assert!(n >= 1 && blocks >= 1, "schedule needs n >= 1 and at least one block");
        let stride = stride.max(1) % n.max(1);
        let mut prefix = Vec::new();
        let mut seen = vec![false; n];
        let mut o = 0;
        while !seen[o] {
            seen[o] = true;
            prefix.push(o);
            if stride == 0 {
                break;
            }
            o = (o + stride) % n;
        }
        Self {
            n,
            stride,
            used: vec![vec![false; n]; blocks],
            draws: vec![0; blocks],
            prefix: vec![prefix; blocks],
            rng: seeded_rng(seed),
        }
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn next_offset(&mut self, block: usize) -> usize {
        let k = self.draws[block];
        self.draws[block] += 1;
        let o = if k < self.prefix[block].len() {
            self.prefix[block][k]
        } else {
            let fresh: Vec<usize> = (0..self.n).filter(|&o| !self.used[block][o]).collect();
            match fresh.choose(&mut self.rng) {
                Some(&o) => o,
                None => self.rng.random_range(0..self.n),
            }
        };
        self.used[block][o] = true;
        o
    }
}

/// Offsets `0, s, 2s, ...` cover the ring evenly when each block is used about
/// `uses_per_block` times.
pub fn default_stride(n: usize, uses_per_block: usize) -> usize {
    (n / uses_per_block.max(1)).max(1)
}

/// Order in which blocks feed matrix `matrix_index`: the first block is
/// `matrix_index mod B`, the rest follow a seeded permutation; once all blocks were used
/// the cycle restarts.
pub fn block_order(blocks: usize, uses: usize, matrix_index: usize, seed: u64) -> Vec<usize> {
    assert!(blocks >= 1);
    let mut rng = seeded_rng(seed);
    let first = matrix_index % blocks;
    let mut order = Vec::with_capacity(uses);
    let mut cycle: Vec<usize> = (0..blocks).filter(|&b| b != first).collect();
    cycle.shuffle(&mut rng);
    order.push(first);
    order.extend(cycle);
    if uses > blocks {
        warn!("{uses} subsamples from {blocks} blocks: blocks are reused within one matrix");
        while order.len() < uses {
            let mut c: Vec<usize> = (0..blocks).collect();
            c.shuffle(&mut rng);
            order.extend(c);
        }
    }
    order.truncate(uses);
    order
}
