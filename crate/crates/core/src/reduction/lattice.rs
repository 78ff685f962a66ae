//! Integer lattice basis with a floating Gram-Schmidt cache and LLL.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Size-reduction threshold used by the floating-point engine.
pub const SIZE_REDUCTION_ETA: f64 = 0.5 + 1e-6;

const REORTHO_EVERY: usize = 50;
const MAX_SIZE_REDUCTION_ROUNDS: usize = 200;

#[inline]
pub fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

#[inline]
pub fn norm_sq(a: &[i64]) -> i128 {
    dot(a, a)
}

/// Row basis `B` (exact integers) with optional unimodular transform `T`
/// such that `B = T * B_original` at all times.
#[derive(Clone, Debug)]
pub struct Lattice<R: Real = f64> {
    rows: Vec<Vec<i64>>,
    transform: Option<Vec<Vec<i64>>>,
    mu: Vec<Vec<R>>,
    r: Vec<R>,
    scratch: Vec<R>,
    gso_valid: usize,
    swaps: usize,
}

impl<R: Real> Lattice<R> {
    /// Builds a lattice from basis rows; `track` enables the transform matrix.
    pub fn new(rows: Vec<Vec<i64>>, track: bool) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Param("lattice basis must have at least one row".into()));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Param("basis rows have different lengths".into()));
        }
        let transform = track.then(|| {
            (0..d)
                .map(|i| (0..d).map(|j| (i == j) as i64).collect())
                .collect()
        });
        Ok(Self {
            rows,
            transform,
            mu: (0..d).map(|i| vec![R::zero(); i]).collect(),
            r: vec![R::zero(); d],
            scratch: vec![R::zero(); d],
            gso_valid: 0,
            swaps: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<Vec<i64>> {
        self.rows
    }

    pub fn transform(&self) -> Option<&[Vec<i64>]> {
        self.transform.as_deref()
    }

    pub fn swap_count(&self) -> usize {
        self.swaps
    }

    /// Squared Gram-Schmidt norms `|b_i*|^2`.
    pub fn gs_norms_sq(&mut self) -> Result<Vec<R>> {
        let d = self.dim();
        self.ensure_gso(d)?;
        Ok(self.r.clone())
    }

    /// Gram-Schmidt coefficient `mu_ij` for `j < i`.
    pub fn mu(&mut self, i: usize, j: usize) -> Result<R> {
        self.ensure_gso(i + 1)?;
        Ok(self.mu[i][j])
    }

    /// GSO data restricted to rows `[start, end)`: local `mu` (lower triangle) and `r`.
    pub fn block_gso(&mut self, start: usize, end: usize) -> Result<(Vec<Vec<R>>, Vec<R>)> {
        self.ensure_gso(end)?;
        let mu = (start..end)
            .map(|i| (start..i).map(|j| self.mu[i][j]).collect())
            .collect();
        Ok((mu, self.r[start..end].to_vec()))
    }

    /// Replaces the basis rows wholesale (caller guarantees same lattice) and resets the GSO.
    pub(crate) fn invalidate_from(&mut self, i: usize) {
        self.gso_valid = self.gso_valid.min(i);
    }

    fn compute_gso_row(&mut self, i: usize) -> Result<()> {
        let bi = &self.rows[i];
        for j in 0..i {
            let mut rij = R::of_wide(dot(bi, &self.rows[j]));
            for k in 0..j {
                rij = rij - self.mu[j][k] * self.scratch[k];
            }
            self.scratch[j] = rij;
            self.mu[i][j] = rij / self.r[j];
        }
        let mut rii = R::of_wide(norm_sq(bi));
        for k in 0..i {
            rii = rii - self.mu[i][k] * self.scratch[k];
        }
        if !(rii.is_finite() && rii > R::zero()) {
            return Err(Error::Precision(format!(
                "non-positive Gram-Schmidt norm at row {i} ({rii})"
            )));
        }
        self.r[i] = rii;
        Ok(())
    }

    /// Recomputes row `i` of the GSO, retrying once after a full re-orthogonalization.
    fn refresh_row(&mut self, i: usize) -> Result<()> {
        if self.compute_gso_row(i).is_ok() {
            return Ok(());
        }
        for k in 0..=i {
            self.compute_gso_row(k)?;
        }
        Ok(())
    }

    fn ensure_gso(&mut self, upto: usize) -> Result<()> {
        while self.gso_valid < upto {
            let i = self.gso_valid;
            self.refresh_row(i)?;
            self.gso_valid = i + 1;
        }
        Ok(())
    }

    /// `b_i -= x * b_j` (and the same on `T`).
    pub(crate) fn row_sub(&mut self, i: usize, j: usize, x: i64) {
        if x == 0 {
            return;
        }
        sub_scaled(&mut self.rows, i, j, x);
        if let Some(t) = self.transform.as_mut() {
            sub_scaled(t, i, j, x);
        }
        self.invalidate_from(i);
    }

    pub(crate) fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.rows.swap(i, j);
        if let Some(t) = self.transform.as_mut() {
            t.swap(i, j);
        }
        self.invalidate_from(i.min(j));
    }

    /// Applies the unimodular map `(b_i, b_j) <- (a b_i + b b_j, c b_i + d b_j)`.
    pub(crate) fn pair_transform(&mut self, i: usize, j: usize, m: [[i64; 2]; 2]) {
        pair_apply(&mut self.rows, i, j, m);
        if let Some(t) = self.transform.as_mut() {
            pair_apply(t, i, j, m);
        }
        self.invalidate_from(i.min(j));
    }

    /// Moves row `from` to position `to` (`to <= from`), shifting the rows in between down.
    pub(crate) fn rotate_to(&mut self, from: usize, to: usize) {
        if from == to {
            return;
        }
        self.rows[to..=from].rotate_right(1);
        if let Some(t) = self.transform.as_mut() {
            t[to..=from].rotate_right(1);
        }
        self.invalidate_from(to);
    }

    pub(crate) fn reorder(&mut self, perm: &[usize]) {
        self.rows = perm.iter().map(|&i| self.rows[i].clone()).collect();
        if let Some(t) = self.transform.as_mut() {
            *t = perm.iter().map(|&i| t[i].clone()).collect();
        }
        self.gso_valid = 0;
    }

    fn size_reduce(&mut self, k: usize) -> Result<()> {
        let eta = R::of(SIZE_REDUCTION_ETA);
        for _ in 0..MAX_SIZE_REDUCTION_ROUNDS {
            self.ensure_gso(k)?;
            self.refresh_row(k)?;
            if (0..k).all(|j| self.mu[k][j].abs() <= eta) {
                self.gso_valid = k + 1;
                return Ok(());
            }
            for j in (0..k).rev() {
                let m = self.mu[k][j];
                if m.abs() <= eta {
                    continue;
                }
                let xr = m.round();
                let x = xr
                    .to_i64()
                    .ok_or_else(|| Error::Precision(format!("size-reduction coefficient {m}")))?;
                sub_scaled(&mut self.rows, k, j, x);
                if let Some(t) = self.transform.as_mut() {
                    sub_scaled(t, k, j, x);
                }
                for l in 0..j {
                    self.mu[k][l] = self.mu[k][l] - xr * self.mu[j][l];
                }
                self.mu[k][j] = m - xr;
            }
            // rows below k are untouched; row k is recomputed from the exact integers
            self.gso_valid = k;
        }
        Err(Error::Precision(format!("size reduction of row {k} did not settle")))
    }

    /// LLL on rows `[0, end)` assuming rows `[0, start)` are already reduced.
    pub fn lll_range(&mut self, delta: f64, start: usize, end: usize) -> Result<()> {
        if !(delta > 0.25 && delta <= 1.0) {
            return Err(Error::Param(format!("LLL delta must lie in (0.25, 1], got {delta}")));
        }
        let end = end.min(self.dim());
        let delta = R::of(delta);
        self.ensure_gso(start.min(end).max(1))?;
        let mut k = start.max(1);
        let mut guard: u64 = 0;
        let limit = 1_000_000u64 * end as u64 + 10_000;
        while k < end {
            guard += 1;
            if guard > limit {
                return Err(Error::Precision("LLL iteration limit exceeded".into()));
            }
            self.size_reduce(k)?;
            let m = self.mu[k][k - 1];
            if delta * self.r[k - 1] > self.r[k] + m * m * self.r[k - 1] {
                self.swap_rows(k - 1, k);
                self.swaps += 1;
                if self.swaps.is_multiple_of(REORTHO_EVERY) {
                    self.gso_valid = 0;
                }
                self.ensure_gso(k - 1)?;
                if k == 1 {
                    self.ensure_gso(1)?;
                } else {
                    k -= 1;
                }
            } else {
                k += 1;
            }
        }
        Ok(())
    }

    /// Full LLL reduction with parameter `delta`.
    pub fn lll(&mut self, delta: f64) -> Result<()> {
        let d = self.dim();
        self.lll_range(delta, 0, d)
    }

    /// Largest `|mu_ij|` over the basis.
    pub fn max_abs_mu(&mut self) -> Result<f64> {
        let d = self.dim();
        self.ensure_gso(d)?;
        Ok(self
            .mu
            .iter()
            .flatten()
            .map(|m| m.abs().as_f64())
            .fold(0.0, f64::max))
    }

    /// Checks size reduction and the Lovász condition with a small float tolerance.
    pub fn is_lll_reduced(&mut self, delta: f64) -> Result<bool> {
        let d = self.dim();
        self.ensure_gso(d)?;
        let tol = 1e-9;
        if self.max_abs_mu()? > SIZE_REDUCTION_ETA + tol {
            return Ok(false);
        }
        for k in 1..d {
            let m = self.mu[k][k - 1].as_f64();
            let lhs = delta * self.r[k - 1].as_f64();
            let rhs = self.r[k].as_f64() + m * m * self.r[k - 1].as_f64();
            if lhs > rhs * (1.0 + tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Natural log of the lattice volume from the Gram-Schmidt norms.
    pub fn log_volume(&mut self) -> Result<f64> {
        Ok(self.gs_norms_sq()?.iter().map(|r| 0.5 * r.as_f64().ln()).sum())
    }
}

fn sub_scaled(m: &mut [Vec<i64>], i: usize, j: usize, x: i64) {
    let (src, dst) = if i < j {
        let (lo, hi) = m.split_at_mut(j);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&lo[j], &mut hi[0])
    };
    for (d, &s) in dst.iter_mut().zip(src.iter()) {
        *d -= x * s;
    }
}

fn pair_apply(m: &mut [Vec<i64>], i: usize, j: usize, t: [[i64; 2]; 2]) {
    assert_ne!(i, j);
    for col in 0..m[i].len() {
        let (u, v) = (m[i][col], m[j][col]);
        m[i][col] = t[0][0] * u + t[0][1] * v;
        m[j][col] = t[1][0] * u + t[1][1] * v;
    }
}

/// Integer matrix product `T * B`.
pub fn mat_mul(t: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let width = b.first().map_or(0, Vec::len);
    t.iter()
        .map(|row| {
            let mut out = vec![0i128; width];
            for (&c, brow) in row.iter().zip(b) {
                if c != 0 {
                    for (o, &x) in out.iter_mut().zip(brow) {
                        *o += c as i128 * x as i128;
                    }
                }
            }
            out.into_iter().map(|x| x as i64).collect()
        })
        .collect()
}
