use std::collections::HashSet;

use super::block::rotate_parts;
use crate::error::{param, Result};

/// Rotations `x^t` (`t = 0..n`) applied synchronously to every length-`n` sub-block of
/// `v`. Exact duplicates are dropped, keeping the smallest `t`.
pub fn orbit_expand(v: &[i64], n: usize) -> Result<Vec<(usize, Vec<i64>)>> {
    if n == 0 || !v.len().is_multiple_of(n) {
        return param(format!("vector length {} is not a multiple of n={n}", v.len()));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let w = rotate_parts(v, t as i64, n);
        if seen.insert(w.clone()) {
            out.push((t, w));
        }
    }
    Ok(out)
}

/// Automorphed public data: every length-`n` block of every row of `a` is multiplied by
/// `x^t`, which permutes rows within each block of `n` rows (with signs). `b` receives the
/// same signed row permutation, i.e. each length-`n` block of `b` is multiplied by `x^-t`,
/// so that row `i` of the output still pairs with its target.
pub fn apply_automorphism(a: &[Vec<i64>], b: &[i64], t: usize, n: usize) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    if t >= n {
        return param(format!("rotation t={t} must be below n={n}"));
    }
    if a.len() != b.len() || !a.len().is_multiple_of(n) || a.iter().any(|r| r.len() % n != 0) {
        return param("public data must consist of whole n x n blocks");
    }
    let at = a.iter().map(|row| rotate_parts(row, t as i64, n)).collect();
    let bt = rotate_parts(b, -(t as i64), n);
    Ok((at, bt))
}
