//! Error-penalized dual embedding `[[omega I_m, A], [0, q I_n]]`.

use super::lattice::{mat_mul, Lattice};
use crate::error::{param, Result};
use crate::instances::Modulus;
use crate::scalar::Real;

/// Lattice vector `(omega r | r A + q c)` split into its parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedRow {
    pub r: Vec<i64>,
    /// `r A + q c`, not reduced.
    pub y: Vec<i64>,
    pub c: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct EmbeddedBasis<R: Real = f64> {
    pub lattice: Lattice<R>,
    pub omega: i64,
    pub q: Modulus,
    pub m: usize,
    pub n: usize,
    a: Vec<Vec<i64>>,
}

/// Builds the dual embedding of the `m x n` matrix `a` with transform tracking enabled.
pub fn embed<R: Real>(a: &[Vec<i64>], omega: i64, q: Modulus) -> Result<EmbeddedBasis<R>> {
    if omega < 1 {
        return param(format!("omega must be >= 1, got {omega}"));
    }
    let m = a.len();
    if m == 0 {
        return param("embedding needs at least one sample row");
    }
    let n = a[0].len();
    if a.iter().any(|r| r.len() != n) {
        return param("sample rows have different lengths");
    }
    let rows = embedding_rows(a, omega, q.value());
    Ok(EmbeddedBasis {
        lattice: Lattice::new(rows, true)?,
        omega,
        q,
        m,
        n,
        a: a.to_vec(),
    })
}

pub(crate) fn embedding_rows(a: &[Vec<i64>], omega: i64, q: i64) -> Vec<Vec<i64>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rows = Vec::with_capacity(m + n);
    for (i, ai) in a.iter().enumerate() {
        let mut row = vec![0i64; m + n];
        row[i] = omega;
        row[m..].copy_from_slice(ai);
        rows.push(row);
    }
    for j in 0..n {
        let mut row = vec![0i64; m + n];
        row[m + j] = q;
        rows.push(row);
    }
    rows
}

impl<R: Real> EmbeddedBasis<R> {
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn original_rows(&self) -> Vec<Vec<i64>> {
        embedding_rows(&self.a, self.omega, self.q.value())
    }

    /// Splits a vector of the embedding space; `None` if it is not in the lattice.
    pub fn decompose(&self, v: &[i64]) -> Option<EmbeddedRow> {
        if v.len() != self.dim() {
            return None;
        }
        let q = self.q.value();
        let mut r = Vec::with_capacity(self.m);
        for &x in &v[..self.m] {
            if x % self.omega != 0 {
                return None;
            }
            r.push(x / self.omega);
        }
        let y = v[self.m..].to_vec();
        let mut c = Vec::with_capacity(self.n);
        for (j, &yj) in y.iter().enumerate() {
            let ra: i128 = r.iter().zip(&self.a).map(|(&ri, row)| ri as i128 * row[j] as i128).sum();
            let diff = yj as i128 - ra;
            if diff % q as i128 != 0 {
                return None;
            }
            c.push((diff / q as i128) as i64);
        }
        Some(EmbeddedRow { r, y, c })
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.decompose(v).is_some()
    }

    /// True when the tracked transform reproduces the current basis exactly.
    pub fn transform_consistent(&self) -> bool {
        match self.lattice.transform() {
            Some(t) => mat_mul(t, &self.original_rows()) == self.lattice.rows(),
            None => false,
        }
    }
}
