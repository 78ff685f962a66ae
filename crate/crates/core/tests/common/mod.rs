//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use nomod::instances::SecretFamily;

pub fn center(x: i128, q: i64) -> i64 {
    let r = x.rem_euclid(q as i128) as i64;
    if r > q / 2 { r - q } else { r }
}

/// `a(x) s(x) mod (x^n + 1, q)` by the schoolbook product.
pub fn schoolbook_negacyclic(a: &[i64], s: &[i64], q: i64) -> Vec<i64> {
    let n = a.len();
    let mut full = vec![0i128; 2 * n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &sj) in s.iter().enumerate() {
            full[i + j] += ai as i128 * sj as i128;
        }
    }
    (0..n).map(|i| center(full[i] - full[i + n], q)).collect()
}

fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a = to_big(m);
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

/// Rank over the rationals by fraction-free elimination.
pub fn exact_rank(m: &[Vec<i64>]) -> usize {
    let mut a = to_big(m);
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, rank);
        for i in 0..rows {
            if i != rank && !a[i][c].is_zero() {
                let (f, g) = (a[rank][c].clone(), a[i][c].clone());
                for j in 0..cols {
                    a[i][j] = &a[i][j] * &f - &a[rank][j] * &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).map(|(&x, br)| x as i128 * br[j] as i128).sum::<i128>() as i64)
                .collect()
        })
        .collect()
}

pub fn norm_sq(v: &[i64]) -> i128 {
    v.iter().map(|&x| x as i128 * x as i128).sum()
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(p, k);
        b.swap(p, k);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Least squares through the normal equations.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let gram: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| x.iter().map(|r| r[i] * r[j]).sum()).collect())
        .collect();
    let rhs: Vec<f64> = (0..p).map(|i| x.iter().zip(y).map(|(r, &v)| r[i] * v).sum()).collect();
    solve_dense(gram, rhs)
}

/// Squared length of the shortest nonzero lattice vector, by exhaustive search over a
/// coefficient box that provably contains it: `|c_i| <= |v| |d_i|` with `d_i` the dual
/// basis and `|v|` bounded by the shortest basis row. `None` if the box exceeds `budget`.
pub fn brute_force_lambda1_sq(rows: &[Vec<i64>], budget: u64) -> Option<i128> {
    let d = rows.len();
    let bf: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let gram: Vec<Vec<f64>> =
        (0..d).map(|i| (0..d).map(|j| bf[i].iter().zip(&bf[j]).map(|(a, b)| a * b).sum()).collect()).collect();
    let shortest = rows.iter().map(|r| norm_sq(r)).min()? as f64;
    // |d_i|^2 is the i-th diagonal entry of the inverse Gram matrix
    let bounds: Vec<i64> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            let col = solve_dense(gram.clone(), e);
            ((shortest * col[i]).sqrt() * (1.0 + 1e-9) + 1e-9).floor() as i64
        })
        .collect();
    let size: f64 = bounds.iter().map(|&b| (2 * b + 1) as f64).product();
    if size > budget as f64 {
        return None;
    }
    let mut best = i128::MAX;
    let mut c: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    loop {
        if c.iter().any(|&x| x != 0) {
            let v: Vec<i64> = (0..rows[0].len()).map(|j| (0..d).map(|i| c[i] * rows[i][j]).sum()).collect();
            best = best.min(norm_sq(&v));
        }
        let mut i = 0;
        loop {
            if i == d {
                return Some(best);
            }
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn cbd_pmf(eta: u32, k: i64) -> f64 {
    let e = eta as i64;
    if k.abs() > e {
        return 0.0;
    }
    binom(2 * eta as usize, (e + k) as usize) / 4f64.powi(eta as i32)
}

/// Calls `f` on every vector of `values^n` with its product probability.
fn for_each_product(n: usize, values: &[(i64, f64)], f: &mut dyn FnMut(&[i64], f64)) {
    let values: Vec<(i64, f64)> = values.iter().copied().filter(|&(_, p)| p > 0.0).collect();
    let mut idx = vec![0usize; n];
    let mut v = vec![0i64; n];
    loop {
        let mut p = 1.0;
        for (slot, &i) in v.iter_mut().zip(&idx) {
            *slot = values[i].0;
            p *= values[i].1;
        }
        f(&v, p);
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return;
        }
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k - 1);
    for s in out.iter_mut() {
        s.insert(0, items[0]);
    }
    out.extend(subsets(&items[1..], k));
    out
}

/// Probability that a raw CBD vector of length `n` has fewer than `h` nonzeros.
pub fn promotion_prob(n: usize, h: usize, eta: u32) -> f64 {
    let z = cbd_pmf(eta, 0);
    (0..h.min(n + 1))
        .map(|m| binom(n, m) * (1.0 - z).powi(m as i32) * z.powi((n - m) as i32))
        .sum()
}

fn cbd_values(eta: u32) -> Vec<(i64, f64)> {
    (-(eta as i64)..=eta as i64).map(|k| (k, cbd_pmf(eta, k))).collect()
}

/// Visits the exact law of a secret family. The fixed-weight CBD law is the truncation
/// law: a raw CBD vector keeps a uniform `h`-subset of its nonzeros when it has more than `h`.
pub fn for_each_secret(family: &SecretFamily, n: usize, f: &mut dyn FnMut(&[i64], f64)) {
    match *family {
        SecretFamily::BinaryBernoulli { p } => for_each_product(n, &[(0, 1.0 - p), (1, p)], f),
        SecretFamily::BinaryFixedHw { h } => {
            let all = subsets(&(0..n).collect::<Vec<_>>(), h);
            let p = 1.0 / all.len() as f64;
            for s in all {
                let mut v = vec![0; n];
                s.iter().for_each(|&i| v[i] = 1);
                f(&v, p);
            }
        }
        SecretFamily::TernaryBalanced => for_each_product(n, &[(-1, 1.0 / 3.0), (0, 1.0 / 3.0), (1, 1.0 / 3.0)], f),
        SecretFamily::TernaryFixedHw { h } => {
            let supports = subsets(&(0..n).collect::<Vec<_>>(), h);
            let p_support = 1.0 / supports.len() as f64;
            for s in supports {
                for_each_product(h, &[(-1, 0.5), (1, 0.5)], &mut |signs, ps| {
                    let mut v = vec![0; n];
                    s.iter().zip(signs).for_each(|(&i, &x)| v[i] = x);
                    f(&v, p_support * ps);
                });
            }
        }
        SecretFamily::Cbd { eta } => for_each_product(n, &cbd_values(eta), f),
        SecretFamily::CbdFixedHw { eta, h } => {
            let mut kept = vec![0i64; n];
            for_each_product(n, &cbd_values(eta), &mut |raw, p| {
                let nz: Vec<usize> = (0..n).filter(|&i| raw[i] != 0).collect();
                if nz.len() <= h {
                    f(raw, p);
                    return;
                }
                let keep = subsets(&nz, h);
                let pk = p / keep.len() as f64;
                for s in keep {
                    kept.iter_mut().for_each(|x| *x = 0);
                    s.iter().for_each(|&i| kept[i] = raw[i]);
                    f(&kept, pk);
                }
            });
        }
    }
}

pub fn secret_law(family: &SecretFamily, n: usize) -> Vec<(Vec<i64>, f64)> {
    let mut out = Vec::new();
    for_each_secret(family, n, &mut |v, p| out.push((v.to_vec(), p)));
    out
}

/// Exact mean and variance of `<row, s>` under a finite law.
pub fn exact_moments(row: &[i64], law: &[(Vec<i64>, f64)]) -> (f64, f64) {
    let values: Vec<(f64, f64)> = law
        .iter()
        .map(|(s, p)| (row.iter().zip(s).map(|(a, b)| a * b).sum::<i64>() as f64, *p))
        .collect();
    let mean: f64 = values.iter().map(|(v, p)| p * v).sum();
    let var: f64 = values.iter().map(|(v, p)| p * (v - mean) * (v - mean)).sum();
    (mean, var)
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.carry += if self.sum.abs() >= x.abs() { (self.sum - t) + x } else { (x - t) + self.sum };
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// [`exact_moments`] for several rows at once without materializing the law (two passes,
/// compensated sums).
pub fn exact_moments_streaming(rows: &[Vec<i64>], family: &SecretFamily, n: usize) -> Vec<(f64, f64)> {
    let dot = |row: &[i64], s: &[i64]| row.iter().zip(s).map(|(a, b)| a * b).sum::<i64>() as f64;
    let mut acc = vec![Compensated::default(); rows.len()];
    let mut total = Compensated::default();
    for_each_secret(family, n, &mut |s, p| {
        total.add(p);
        for (m, row) in acc.iter_mut().zip(rows) {
            m.add(p * dot(row, s));
        }
    });
    let means: Vec<f64> = acc.iter().map(|m| m.value()).collect();
    let mut vars = vec![Compensated::default(); rows.len()];
    for_each_secret(family, n, &mut |s, p| {
        for ((v, row), m) in vars.iter_mut().zip(rows).zip(&means) {
            let d = dot(row, s) - m;
            v.add(p * d * d);
        }
    });
    let total = total.value();
    assert!((total - 1.0).abs() < 1e-12, "law does not sum to one: {total}");
    means.into_iter().zip(vars.into_iter().map(Compensated::value)).collect()
}

pub fn big_abs_is_one(x: &BigInt) -> bool {
    x.abs().to_i64() == Some(1)
}
