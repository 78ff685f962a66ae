use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::linalg::certify_full_row_rank;

/// Records which embedding rows and columns were removed by the projection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneBookkeeping {
    pub degree: usize,
    /// Number of full blocks kept (`h`) and retained coordinates of the last block (`g`).
    pub h: usize,
    pub g: usize,
    /// Sample rows before pruning, `(h + 1) n`.
    pub sample_rows: usize,
    pub full_width: usize,
    pub kept_rows: Vec<usize>,
    pub kept_cols: Vec<usize>,
    pub zeroed_rows: Vec<usize>,
    pub zeroed_cols: Vec<usize>,
}

impl PruneBookkeeping {
    /// Active sample rows `m = h n + g`.
    pub fn active(&self) -> usize {
        self.h * self.degree + self.g
    }
}

/// Projects out the last `n - g` sample coordinates of an embedding over `(h+1) n` sample
/// rows and removes the rows and columns that become zero. The pruned basis is certified
/// to have full row rank.
pub fn project_and_prune(
    basis: &[Vec<i64>],
    sample_rows: usize,
    g: usize,
    n: usize,
) -> Result<(Vec<Vec<i64>>, PruneBookkeeping)> {
    if n == 0 || !sample_rows.is_multiple_of(n) || sample_rows == 0 {
        return param("sample rows must be a positive multiple of the degree");
    }
    if g >= n {
        return param(format!("retained coordinates g={g} must be below n={n}"));
    }
    let full_width = basis.first().map_or(0, Vec::len);
    if basis.len() != full_width || full_width < sample_rows {
        return param("expected a square embedding basis covering the sample rows");
    }
    let h = sample_rows / n - 1;
    let m = h * n + g;
    let projected: Vec<Vec<i64>> = basis
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if (m..sample_rows).contains(&i) {
                vec![0; full_width]
            } else {
                row.iter()
                    .enumerate()
                    .map(|(c, &x)| if (m..sample_rows).contains(&c) { 0 } else { x })
                    .collect()
            }
        })
        .collect();
    let kept_rows: Vec<usize> =
        (0..full_width).filter(|&i| projected[i].iter().any(|&x| x != 0)).collect();
    let kept_cols: Vec<usize> =
        (0..full_width).filter(|&c| projected.iter().any(|r| r[c] != 0)).collect();
    let zeroed_rows = (0..full_width).filter(|i| !kept_rows.contains(i)).collect();
    let zeroed_cols = (0..full_width).filter(|c| !kept_cols.contains(c)).collect();
    let pruned: Vec<Vec<i64>> = kept_rows
        .iter()
        .map(|&i| kept_cols.iter().map(|&c| projected[i][c]).collect())
        .collect();
    certify_full_row_rank(&pruned)?;
    if pruned.len() != kept_cols.len() {
        return Err(Error::RankDeficient { rank: pruned.len(), expected: kept_cols.len() });
    }
    let bk = PruneBookkeeping {
        degree: n,
        h,
        g,
        sample_rows,
        full_width,
        kept_rows,
        kept_cols,
        zeroed_rows,
        zeroed_cols,
    };
    Ok((pruned, bk))
}

/// Restricts a full-width vector to the kept coordinates.
pub fn project(v: &[i64], bk: &PruneBookkeeping) -> Vec<i64> {
    bk.kept_cols.iter().map(|&c| v[c]).collect()
}

/// Puts zeros back at the pruned coordinates.
pub fn reinsert(vectors: &[Vec<i64>], bk: &PruneBookkeeping) -> Result<Vec<Vec<i64>>> {
    vectors
        .iter()
        .map(|v| {
            if v.len() != bk.kept_cols.len() {
                return Err(Error::LengthMismatch { expected: bk.kept_cols.len(), actual: v.len() });
            }
            let mut out = vec![0i64; bk.full_width];
            for (&c, &x) in bk.kept_cols.iter().zip(v) {
                out[c] = x;
            }
            Ok(out)
        })
        .collect()
}
