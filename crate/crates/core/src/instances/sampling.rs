//! Secret and error samplers.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::spec::{ErrorSpec, SecretFamily, SecretSpec};
use crate::error::{param, Result};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream label and an index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One draw from the centered binomial distribution with parameter `eta`.
pub fn cbd<R: Rng + ?Sized>(eta: u32, rng: &mut R) -> i64 {
    let mut acc = 0i64;
    for _ in 0..eta {
        acc += rng.random::<bool>() as i64;
        acc -= rng.random::<bool>() as i64;
    }
    acc
}

fn cbd_nonzero<R: Rng + ?Sized>(eta: u32, rng: &mut R) -> i64 {
    loop {
        let v = cbd(eta, rng);
        if v != 0 {
            return v;
        }
    }
}

/// Forces exactly `h` nonzero coordinates in a raw CBD vector.
///
/// Excess nonzeros are zeroed uniformly at random. When the raw draw has fewer
/// than `h` nonzeros, uniformly chosen zero coordinates are promoted with fresh
/// CBD values conditioned to be nonzero.
pub fn truncate_to_weight<R: Rng + ?Sized>(v: &mut [i64], h: usize, eta: u32, rng: &mut R) {
    let nonzero: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
    if nonzero.len() > h {
        let excess = nonzero.len() - h;
        for k in index::sample(rng, nonzero.len(), excess) {
            v[nonzero[k]] = 0;
        }
    } else if nonzero.len() < h {
        let zeros: Vec<usize> = (0..v.len()).filter(|&i| v[i] == 0).collect();
        let missing = h - nonzero.len();
        for k in index::sample(rng, zeros.len(), missing) {
            v[zeros[k]] = cbd_nonzero(eta, rng);
        }
    }
}

pub fn sample_secret_with<R: Rng + ?Sized>(spec: &SecretSpec, rng: &mut R) -> Result<Vec<i64>> {
    spec.validate()?;
    let n = spec.dim;
    let mut s = vec![0i64; n];
    match spec.family {
        SecretFamily::BinaryBernoulli { p } => {
            for x in s.iter_mut() {
                *x = rng.random_bool(p) as i64;
            }
        }
        SecretFamily::BinaryFixedHw { h } => {
            for i in index::sample(rng, n, h) {
                s[i] = 1;
            }
        }
        SecretFamily::TernaryBalanced => {
            for x in s.iter_mut() {
                *x = rng.random_range(-1..=1);
            }
        }
        SecretFamily::TernaryFixedHw { h } => {
            for i in index::sample(rng, n, h) {
                s[i] = if rng.random::<bool>() { 1 } else { -1 };
            }
        }
        SecretFamily::Cbd { eta } => {
            for x in s.iter_mut() {
                *x = cbd(eta, rng);
            }
        }
        SecretFamily::CbdFixedHw { eta, h } => {
            for x in s.iter_mut() {
                *x = cbd(eta, rng);
            }
            truncate_to_weight(&mut s, h, eta, rng);
        }
    }
    Ok(s)
}

pub fn sample_secret(spec: &SecretSpec, seed: u64) -> Result<Vec<i64>> {
    sample_secret_with(spec, &mut seeded_rng(seed))
}

pub fn sample_error_with<R: Rng + ?Sized>(spec: &ErrorSpec, m: usize, rng: &mut R) -> Result<Vec<i64>> {
    spec.validate()?;
    if m == 0 {
        return param("error sample count must be >= 1");
    }
    let e = match *spec {
        ErrorSpec::Gaussian { sigma } => {
            let normal = Normal::new(0.0, sigma).map_err(|e| crate::Error::Param(e.to_string()))?;
            (0..m).map(|_| normal.sample(rng).round() as i64).collect()
        }
        ErrorSpec::Cbd { eta } => (0..m).map(|_| cbd(eta, rng)).collect(),
    };
    Ok(e)
}

pub fn sample_error(spec: &ErrorSpec, m: usize, seed: u64) -> Result<Vec<i64>> {
    sample_error_with(spec, m, &mut seeded_rng(seed))
}

/// Uniform residues in the centered window of `q`.
pub fn uniform_centered<R: Rng + ?Sized>(len: usize, q: i64, rng: &mut R) -> Vec<i64> {
    (0..len)
        .map(|_| super::center_mod(rng.random_range(0..q), q))
        .collect()
}
