//! Exact rank certificates over prime fields.

use crate::error::{Error, Result};

/// Primes used for rank certificates (all below 2^31).
pub const CERT_PRIMES: [i64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

fn pow_mod(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut acc = 1i64;
    b = b.rem_euclid(p);
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as i128 * b as i128 % p as i128) as i64;
        }
        b = (b as i128 * b as i128 % p as i128) as i64;
        e >>= 1;
    }
    acc
}

/// Rank of an integer matrix reduced modulo the prime `p`.
pub fn rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
        .collect();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for i in rank + 1..m.len() {
            if m[i][col] == 0 {
                continue;
            }
            let f = (m[i][col] as i128 * inv as i128 % p as i128) as i64;
            for c in col..width {
                let v = (m[i][c] as i128 - f as i128 * m[rank][c] as i128).rem_euclid(p as i128);
                m[i][c] = v as i64;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Certifies that the rows are linearly independent over the rationals. Full rank modulo
/// any prime implies full rational rank; the largest rank seen is reported otherwise.
pub fn certify_full_row_rank(rows: &[Vec<i64>]) -> Result<()> {
    let expected = rows.len();
    let mut best = 0;
    for p in CERT_PRIMES {
        let r = rank_mod_p(rows, p);
        if r == expected {
            return Ok(());
        }
        best = best.max(r);
    }
    Err(Error::RankDeficient { rank: best, expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![2, 4]], 7), 1);
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![3, 4]], 7), 2);
        // determinant 7 vanishes mod 7 only
        assert_eq!(rank_mod_p(&[vec![3, 1], vec![1, 5]], 7), 1);
        assert!(certify_full_row_rank(&[vec![3, 1], vec![1, 5]]).is_ok());
        assert!(certify_full_row_rank(&[vec![1, 1], vec![2, 2]]).is_err());
    }
}
