use crate::error::{param, Result};
use crate::instances::{rotate, LweInstance};

/// `x^e` applied to every length-`n` part of `v`, for any integer exponent.
pub fn rotate_parts(v: &[i64], e: i64, n: usize) -> Vec<i64> {
    let t = e.rem_euclid(2 * n as i64) as usize;
    v.chunks(n).flat_map(|part| rotate(part, t)).collect()
}

/// One sample polynomial row of a module instance: rows `j = 0..n` of its block are
/// `x^j v(x)`, applied part-wise over the module rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CirculantBlock {
    pub id: usize,
    pub degree: usize,
    /// First row of the block (length `rank * degree`).
    pub v: Vec<i64>,
}

impl CirculantBlock {
    pub fn new(id: usize, degree: usize, v: Vec<i64>) -> Result<Self> {
        if degree == 0 || v.is_empty() || !v.len().is_multiple_of(degree) {
            return param("circulant block length must be a positive multiple of the degree");
        }
        Ok(Self { id, degree, v })
    }

    /// Row `e` of the circulant orbit, `x^e v(x)`.
    pub fn orbit_row(&self, e: i64) -> Vec<i64> {
        rotate_parts(&self.v, e, self.degree)
    }
}

/// Splits a ring-structured LWE instance into its circulant blocks.
pub fn blocks_from_instance(inst: &LweInstance) -> Result<Vec<CirculantBlock>> {
    let Some(shape) = inst.ring else {
        return param("instance carries no ring structure");
    };
    (0..shape.samples)
        .map(|p| CirculantBlock::new(p, shape.degree, inst.a[p * shape.degree].clone()))
        .collect()
}

/// Original block row and sign behind row `j` of the subsample with offset `rho`.
pub fn subsample_source(j: usize, rho: usize, n: usize) -> (usize, i64) {
    let e = j as i64 - rho as i64;
    let idx = e.rem_euclid(n as i64) as usize;
    let sign = if e.div_euclid(n as i64) % 2 == 0 { 1 } else { -1 };
    (idx, sign)
}

/// Subsample with offset `rho`: rows `x^(j - rho) v(x)` for `j < n`, then the first row
/// negated.
pub fn build_subsample(block: &CirculantBlock, rho: usize) -> Result<Vec<Vec<i64>>> {
    let n = block.degree;
    if rho >= n {
        return param(format!("offset {rho} must be below the degree {n}"));
    }
    let mut rows: Vec<Vec<i64>> = (0..n).map(|j| block.orbit_row(j as i64 - rho as i64)).collect();
    rows.push(rows[0].iter().map(|&x| -x).collect());
    Ok(rows)
}
