//! Arithmetic in `Z_q[x]/(x^n + 1)` and the ring/module LWE variants.

use serde::{Deserialize, Serialize};

use super::lwe::{LweInstance, RingShape, Truth};
use super::modulus::Modulus;
use super::sampling::{derive_seed, sample_error, sample_secret, seeded_rng, uniform_centered};
use super::spec::{ErrorSpec, SecretSpec};
use crate::error::{param, Result};

/// Coefficients of `x^t * a(x)` modulo `x^n + 1` (no reduction mod q).
pub fn rotate(a: &[i64], t: usize) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    for (i, &ai) in a.iter().enumerate() {
        let k = i + t;
        let sign = if (k / n).is_multiple_of(2) { 1 } else { -1 };
        out[k % n] = sign * ai;
    }
    out
}

/// Product `a(x) s(x)` in `Z_q[x]/(x^n + 1)`, centered.
pub fn negacyclic_mul(a: &[i64], s: &[i64], q: Modulus) -> Vec<i64> {
    let n = a.len();
    assert_eq!(n, s.len(), "polynomial lengths differ");
    let mut acc = vec![0i128; n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &sj) in s.iter().enumerate() {
            let p = ai as i128 * sj as i128;
            if i + j < n {
                acc[i + j] += p;
            } else {
                acc[i + j - n] -= p;
            }
        }
    }
    acc.into_iter().map(|x| q.center_wide(x)).collect()
}

/// Matrix of multiplication by `a(x)`: column `j` holds `x^j * a(x)`.
pub fn negacyclic_matrix(a: &[i64]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i >= j { a[i - j] } else { -a[n + i - j] })
                .collect()
        })
        .collect()
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return param(format!("ring degree must be a power of two, got {n}"));
    }
    Ok(())
}

/// Module-LWE instance: `b_i = sum_j a_ij s_j + e_i` over `samples` rows and `rank` columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlweInstance {
    pub degree: usize,
    pub rank: usize,
    pub q: Modulus,
    /// `a[i][j]` is the polynomial in sample row `i`, secret column `j`.
    pub a: Vec<Vec<Vec<i64>>>,
    pub b: Vec<Vec<i64>>,
    pub secret_spec: SecretSpec,
    pub error_spec: ErrorSpec,
    /// Secret polynomials `s_j` and error polynomials `e_i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<(Vec<Vec<i64>>, Vec<Vec<i64>>)>,
}

/// Ring-LWE is module rank one.
pub type RlweInstance = MlweInstance;

impl MlweInstance {
    pub fn samples(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_degree(self.degree)?;
        let n = self.degree;
        if self.b.len() != self.a.len()
            || self.a.iter().any(|r| r.len() != self.rank || r.iter().any(|p| p.len() != n))
            || self.b.iter().any(|p| p.len() != n)
        {
            return param("module instance has inconsistent polynomial shapes");
        }
        if self.secret_spec.dim != n * self.rank {
            return param("secret dimension must equal degree * rank");
        }
        Ok(())
    }
}

/// Random module instance with a planted secret of total dimension `degree * rank`.
pub fn gen_mlwe(
    degree: usize,
    rank: usize,
    samples: usize,
    q: i64,
    secret_spec: &SecretSpec,
    error_spec: &ErrorSpec,
    seed: u64,
) -> Result<MlweInstance> {
    check_degree(degree)?;
    let q = Modulus::new(q)?;
    if rank == 0 || samples == 0 {
        return param("module rank and sample count must be >= 1");
    }
    if secret_spec.dim != degree * rank {
        return param(format!(
            "secret dimension {} differs from degree*rank = {}",
            secret_spec.dim,
            degree * rank
        ));
    }
    let s_flat = sample_secret(secret_spec, derive_seed(seed, 1, 0))?;
    let e_flat = sample_error(error_spec, degree * samples, derive_seed(seed, 2, 0))?;
    let mut rng = seeded_rng(derive_seed(seed, 3, 0));
    let s: Vec<Vec<i64>> = s_flat.chunks(degree).map(<[i64]>::to_vec).collect();
    let e: Vec<Vec<i64>> = e_flat.chunks(degree).map(<[i64]>::to_vec).collect();
    let a: Vec<Vec<Vec<i64>>> = (0..samples)
        .map(|_| {
            (0..rank)
                .map(|_| uniform_centered(degree, q.value(), &mut rng))
                .collect()
        })
        .collect();
    let b = a
        .iter()
        .zip(&e)
        .map(|(row, ei)| {
            let mut acc = ei.clone();
            for (aij, sj) in row.iter().zip(&s) {
                for (x, p) in acc.iter_mut().zip(negacyclic_mul(aij, sj, q)) {
                    *x += p;
                }
            }
            acc.into_iter().map(|x| q.center(x)).collect()
        })
        .collect();
    Ok(MlweInstance {
        degree,
        rank,
        q,
        a,
        b,
        secret_spec: secret_spec.clone(),
        error_spec: error_spec.clone(),
        truth: Some((s, e)),
    })
}

/// Ring-LWE with `samples` independent `(a, b)` pairs.
pub fn gen_rlwe(
    degree: usize,
    samples: usize,
    q: i64,
    secret_spec: &SecretSpec,
    error_spec: &ErrorSpec,
    seed: u64,
) -> Result<RlweInstance> {
    gen_mlwe(degree, 1, samples, q, secret_spec, error_spec, seed)
}

/// Flattens a module instance into a `samples*n x rank*n` matrix of negacyclic blocks.
pub fn mlwe_to_lwe(inst: &MlweInstance) -> Result<LweInstance> {
    inst.validate()?;
    let n = inst.degree;
    let mut a = Vec::with_capacity(n * inst.samples());
    for row in &inst.a {
        let blocks: Vec<Vec<Vec<i64>>> = row.iter().map(|p| negacyclic_matrix(p)).collect();
        for i in 0..n {
            a.push(blocks.iter().flat_map(|blk| blk[i].iter().copied()).collect());
        }
    }
    let b: Vec<i64> = inst.b.iter().flatten().copied().collect();
    let truth = inst.truth.as_ref().map(|(s, e)| Truth {
        s: s.iter().flatten().copied().collect(),
        e: e.iter().flatten().copied().collect(),
    });
    let out = LweInstance {
        n: n * inst.rank,
        m: b.len(),
        q: inst.q,
        a,
        b,
        secret_spec: inst.secret_spec.clone(),
        error_spec: inst.error_spec.clone(),
        truth,
        ring: Some(RingShape { degree: n, rank: inst.rank, samples: inst.samples() }),
    };
    out.validate()?;
    Ok(out)
}

pub fn rlwe_to_lwe(inst: &RlweInstance) -> Result<LweInstance> {
    if inst.rank != 1 {
        return param("ring instance must have rank 1");
    }
    mlwe_to_lwe(inst)
}
