//! BKZ tours, block insertion and the polish pass.

use super::analytic::ball_gaussian_heuristic;
use super::enumeration::enumerate_svp;
use super::lattice::{dot, norm_sq, Lattice};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Enumeration radius relative to the Gaussian heuristic of the block.
pub const GH_RADIUS_FACTOR: f64 = 1.05;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TourStats {
    pub improved: bool,
    pub insertions: usize,
    pub nodes: u64,
}

/// Extended gcd: `(g, u, w)` with `u*a + w*c = g > 0`.
pub fn ext_gcd(a: i64, c: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, c);
    let (mut u0, mut u1) = (1i64, 0i64);
    let (mut w0, mut w1) = (0i64, 1i64);
    while r1 != 0 {
        let qt = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - qt * r1);
        (u0, u1) = (u1, u0 - qt * u1);
        (w0, w1) = (w1, w0 - qt * w1);
    }
    if r0 < 0 {
        (-r0, -u0, -w0)
    } else {
        (r0, u0, w0)
    }
}

/// Replaces row `k` with `sum_i coeffs[i] * b_{k+i}` through unimodular pair operations,
/// shifting the displaced rows down. The vector placed at `k` is divided by the gcd of
/// the coefficients, up to sign.
pub fn insert_combination<R: Real>(lat: &mut Lattice<R>, k: usize, coeffs: &[i64]) -> Result<()> {
    let mut nz = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (k + i, c));
    let (p, mut a) = nz
        .next()
        .ok_or_else(|| Error::Param("cannot insert the zero combination".into()))?;
    for (j, c) in nz {
        let (g, u, w) = ext_gcd(a, c);
        lat.pair_transform(p, j, [[a / g, c / g], [-w, u]]);
        a = g;
    }
    lat.rotate_to(p, k);
    Ok(())
}

/// One BKZ tour with block size `beta`: LLL, then block SVP insertion at every position.
pub fn bkz_tour<R: Real>(lat: &mut Lattice<R>, beta: usize, delta: f64) -> Result<TourStats> {
    let d = lat.dim();
    if beta < 2 || beta > d {
        return Err(Error::Param(format!(
            "block size {beta} outside [2, {d}]"
        )));
    }
    let mut stats = TourStats::default();
    lat.lll(delta)?;
    for k in 0..d - 1 {
        let end = (k + beta).min(d);
        lat.lll_range(delta, k, end)?;
        let (mu, r) = lat.block_gso(k, end)?;
        let log_vol: f64 = r.iter().map(|x| 0.5 * x.as_f64().ln()).sum();
        let gh = GH_RADIUS_FACTOR * ball_gaussian_heuristic(end - k, log_vol);
        let target = R::of(delta) * r[0];
        let gh_sq = R::of(gh * gh);
        let mut sol = None;
        if gh_sq < target {
            sol = enumerate_svp(&mu, &r, gh_sq);
        }
        if sol.is_none() {
            sol = enumerate_svp(&mu, &r, target);
        }
        if let Some(s) = sol {
            stats.nodes += s.nodes;
            if s.norm_sq < target {
                insert_combination(lat, k, &s.coeffs)?;
                lat.lll_range(delta, k, end)?;
                stats.insertions += 1;
                stats.improved = true;
            }
        }
    }
    lat.lll(delta)?;
    Ok(stats)
}

/// Repeats tours until one makes no insertion or `max_tours` is reached.
pub fn bkz<R: Real>(lat: &mut Lattice<R>, beta: usize, delta: f64, max_tours: usize) -> Result<usize> {
    let beta = beta.min(lat.dim());
    let mut tours = 0;
    while tours < max_tours {
        tours += 1;
        if !bkz_tour(lat, beta, delta)?.improved {
            break;
        }
    }
    Ok(tours)
}

fn sort_by_norm<R: Real>(lat: &mut Lattice<R>) {
    let mut perm: Vec<usize> = (0..lat.dim()).collect();
    perm.sort_by_key(|&i| norm_sq(lat.row(i)));
    if perm.iter().enumerate().any(|(a, &b)| a != b) {
        lat.reorder(&perm);
    }
}

/// Sorts rows by norm and applies pairwise reductions `b_i -= x b_j` whenever they strictly
/// shorten `b_i`, until no pair changes; the result is sorted again.
///
/// Returns the number of row updates performed.
pub fn polish<R: Real>(lat: &mut Lattice<R>) -> usize {
    sort_by_norm(lat);
    let d = lat.dim();
    let mut norms: Vec<i128> = lat.rows().iter().map(|r| norm_sq(r)).collect();
    let mut updates = 0;
    loop {
        let mut changed = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || norms[j] == 0 {
                    continue;
                }
                let ip = dot(lat.row(i), lat.row(j));
                let x = (2 * ip + norms[j]).div_euclid(2 * norms[j]);
                if x == 0 {
                    continue;
                }
                let new_norm = norms[i] - 2 * x * ip + x * x * norms[j];
                if new_norm < norms[i] {
                    lat.row_sub(i, j, x as i64);
                    norms[i] = new_norm;
                    changed = true;
                    updates += 1;
                }
            }
        }
        if !changed {
            break;
        }
    }
    sort_by_norm(lat);
    updates
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_coefficients() {
        for (a, c) in [(6, 4), (-6, 4), (3, -7), (0, 5), (5, 0), (-2, -8)] {
            let (g, u, w) = ext_gcd(a, c);
            assert!(g > 0);
            assert_eq!(u * a + w * c, g);
            assert_eq!(a % g, 0);
            assert_eq!(c % g, 0);
        }
    }

    #[test]
    fn insertion_is_unimodular() {
        let rows = vec![vec![7, 1, 0], vec![2, 9, 1], vec![1, 1, 11]];
        let mut l: Lattice = Lattice::new(rows.clone(), true).unwrap();
        insert_combination(&mut l, 0, &[3, -2, 5]).unwrap();
        let want: Vec<i64> = (0..3).map(|c| 3 * rows[0][c] - 2 * rows[1][c] + 5 * rows[2][c]).collect();
        assert_eq!(l.row(0), want.as_slice());
        let t = l.transform().unwrap().to_vec();
        assert_eq!(super::super::lattice::mat_mul(&t, &rows), l.rows());
    }

    #[test]
    fn polish_is_idempotent_on_fixpoint() {
        let rows = vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 3]];
        let mut l: Lattice = Lattice::new(rows.clone(), false).unwrap();
        assert_eq!(polish(&mut l), 0);
        assert_eq!(l.rows(), rows.as_slice());
    }

    #[test]
    fn full_block_finds_shortest() {
        let rows = vec![vec![5, 3, 2], vec![4, 3, 3], vec![7, 1, 9]];
        let mut l: Lattice = Lattice::new(rows, true).unwrap();
        bkz(&mut l, 3, 0.99, 10).unwrap();
        assert_eq!(norm_sq(l.row(0)), 2);
    }
}
