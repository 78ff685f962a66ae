//! Schnorr-Euchner enumeration of the shortest vector in a projected block.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SvpSolution<R: Real = f64> {
    /// Coefficients with respect to the block basis.
    pub coeffs: Vec<i64>,
    /// Squared norm of the projected vector.
    pub norm_sq: R,
    pub nodes: u64,
}

struct Enumerator<'a, R: Real> {
    mu: &'a [Vec<R>],
    r: &'a [R],
    x: Vec<i64>,
    partdist: Vec<R>,
    sigma: Vec<Vec<R>>,
    begin: Vec<usize>,
    limit: R,
    best: Option<(Vec<i64>, R)>,
    nodes: u64,
}

impl<R: Real> Enumerator<'_, R> {
    fn level(&mut self, i: usize) {
        let c = self.sigma[i][i + 1];
        let top = self.partdist[i + 1] == R::zero();
        let mut xi = c.round();
        let (mut dx, mut ddx) = if c >= xi { (1.0, 1.0) } else { (-1.0, -1.0) };
        loop {
            let y = c - xi;
            let dist = self.partdist[i + 1] + y * y * self.r[i];
            self.nodes += 1;
            if dist > self.limit {
                break;
            }
            self.x[i] = xi.to_i64().unwrap_or(0);
            if i == 0 {
                let better = self.best.as_ref().is_none_or(|(_, b)| dist < *b);
                if dist > R::zero() && better {
                    self.best = Some((self.x.clone(), dist));
                    self.limit = dist;
                }
            } else {
                self.partdist[i] = dist;
                for j in (i..=self.begin[i]).rev() {
                    self.sigma[i - 1][j] =
                        self.sigma[i - 1][j + 1] - R::of_int(self.x[j]) * self.mu[j][i - 1];
                }
                if self.begin[i] > self.begin[i - 1] {
                    self.begin[i - 1] = self.begin[i];
                }
                self.begin[i] = i;
                self.level(i - 1);
            }
            if top {
                xi = xi + R::one();
            } else {
                xi = xi + R::of(dx);
                ddx = -ddx;
                dx = ddx - dx;
            }
        }
    }
}

/// Shortest nonzero vector of squared projected norm at most `radius_sq` in the block
/// lattice described by local Gram-Schmidt data (`mu[i][j]` for `j < i`, `r[i] = |b_i*|^2`).
///
/// Ties keep the first vector found in enumeration order. Returns `None` when no nonzero
/// vector lies within the radius.
pub fn enumerate_svp<R: Real>(mu: &[Vec<R>], r: &[R], radius_sq: R) -> Option<SvpSolution<R>> {
    let d = r.len();
    if d == 0 || !(radius_sq > R::zero()) {
        return None;
    }
    let mut e = Enumerator {
        mu,
        r,
        x: vec![0; d],
        partdist: vec![R::zero(); d + 1],
        sigma: vec![vec![R::zero(); d + 1]; d],
        begin: vec![d - 1; d + 1],
        limit: radius_sq * R::of(1.0 + 1e-9),
        best: None,
        nodes: 0,
    };
    e.level(d - 1);
    let nodes = e.nodes;
    e.best.map(|(coeffs, norm_sq)| SvpSolution { coeffs, norm_sq, nodes })
}
