use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::instances::{LweInstance, Modulus};
use crate::mlwe_enhance::orbit_expand;
use crate::nomod_approx::sample_moments;
use crate::reduction::{dot, sign_normalize};

/// One amplified sample `(x, target)` with `target = r . b (mod q)` and `x = r A (mod q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sample_id: usize,
    pub source_matrix: usize,
    /// Index of the pool entry the sample came from.
    pub source_row: usize,
    /// Ring rotation applied to the pool vector.
    pub t: usize,
    pub r_norm_sq: i64,
    /// Standard deviation of the pre-modular target.
    pub sigma: f64,
    pub x: Vec<i64>,
    pub target: i64,
    /// Combination of original rows; not persisted.
    #[serde(skip)]
    pub r: Vec<i64>,
}

/// Turns a combination `r` of the original rows into samples; ring instances contribute
/// every distinct rotation.
pub(crate) fn samples_from_combination(
    inst: &LweInstance,
    r: &[i64],
    source_matrix: usize,
    source_row: usize,
) -> Result<Vec<Sample>> {
    if r.len() != inst.m {
        return Err(Error::LengthMismatch { expected: inst.m, actual: r.len() });
    }
    let q = inst.q;
    let variants: Vec<(usize, Vec<i64>)> = match inst.ring {
        Some(shape) => orbit_expand(r, shape.degree)?,
        None => vec![(0, r.to_vec())],
    };
    let r_norm_sq = dot(r, r) as i64;
    let mut out = Vec::with_capacity(variants.len());
    for (t, rt) in variants {
        let x: Vec<i64> = (0..inst.n)
            .map(|j| {
                let acc: i128 = rt.iter().zip(&inst.a).map(|(&ri, row)| ri as i128 * row[j] as i128).sum();
                q.center_wide(acc)
            })
            .collect();
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        let target = q.center_wide(dot(&rt, &inst.b));
        let sigma = sample_moments(&x, r_norm_sq as f64, &inst.secret_spec, &inst.error_spec).sigma();
        out.push(Sample { sample_id: 0, source_matrix, source_row, t, r_norm_sq, sigma, x, target, r: rt });
    }
    Ok(out)
}

/// Drops samples whose `(x, target)` repeats an earlier one up to sign, then numbers the
/// rest consecutively.
pub fn dedup_samples(samples: Vec<Sample>) -> Vec<Sample> {
    let mut seen = HashSet::new();
    let mut out: Vec<Sample> = samples
        .into_iter()
        .filter(|s| {
            let mut key = s.x.clone();
            key.push(s.target);
            seen.insert(sign_normalize(&key))
        })
        .collect();
    for (i, s) in out.iter_mut().enumerate() {
        s.sample_id = i;
    }
    out
}

/// Orders samples by increasing `sigma` (ties by id).
pub fn sort_by_sigma(samples: &mut [Sample]) {
    samples.sort_by(|a, b| a.sigma.total_cmp(&b.sigma).then(a.sample_id.cmp(&b.sample_id)));
}

/// Ratio of the entry standard deviation of the sample vectors to that of `A`.
pub fn rho_a(samples: &[Sample], a: &[Vec<i64>]) -> f64 {
    fn sd<'a>(it: impl Iterator<Item = &'a i64>) -> f64 {
        let (mut n, mut s1, mut s2) = (0f64, 0f64, 0f64);
        for &v in it {
            n += 1.0;
            s1 += v as f64;
            s2 += (v as f64) * (v as f64);
        }
        if n == 0.0 {
            return 0.0;
        }
        let mean = s1 / n;
        (s2 / n - mean * mean).max(0.0).sqrt()
    }
    let base = sd(a.iter().flatten());
    if base == 0.0 {
        return 0.0;
    }
    sd(samples.iter().flat_map(|s| s.x.iter())) / base
}

/// Whether each sample's target equals its pre-modular value, given the planted truth.
pub fn inlier_flags(samples: &[Sample], s: &[i64], e: &[i64], q: Modulus) -> Vec<bool> {
    samples
        .iter()
        .map(|smp| {
            let pre = dot(&smp.x, s) + dot(&smp.r, e);
            pre == smp.target as i128 && q.center_wide(pre) == smp.target
        })
        .collect()
}

const FIXED_COLUMNS: [&str; 6] = ["sample_id", "source_matrix", "source_row", "t", "r_norm_sq", "sigma"];

pub fn write_samples_csv(path: impl AsRef<Path>, samples: &[Sample]) -> Result<()> {
    let dim = samples.first().map_or(0, |s| s.x.len());
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..dim).map(|j| format!("x_{j}")));
    header.push("target".into());
    w.write_record(&header)?;
    for s in samples {
        if s.x.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, actual: s.x.len() });
        }
        let mut rec = vec![
            s.sample_id.to_string(),
            s.source_matrix.to_string(),
            s.source_row.to_string(),
            s.t.to_string(),
            s.r_norm_sq.to_string(),
            format!("{:?}", s.sigma),
        ];
        rec.extend(s.x.iter().map(i64::to_string));
        rec.push(s.target.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.clone();
    let width = header.len();
    if width < FIXED_COLUMNS.len() + 1
        || header.iter().take(FIXED_COLUMNS.len()).ne(FIXED_COLUMNS.iter().copied())
        || header.get(width - 1) != Some("target")
    {
        return param("samples CSV has an unexpected header");
    }
    let num = |s: &str| -> Result<i64> {
        s.trim().parse().map_err(|_| Error::Param(format!("bad integer {s:?} in samples CSV")))
    };
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let sigma: f64 = f(5)
            .trim()
            .parse()
            .map_err(|_| Error::Param(format!("bad sigma {:?} in samples CSV", f(5))))?;
        let x = (6..width - 1).map(|i| num(f(i))).collect::<Result<Vec<_>>>()?;
        out.push(Sample {
            sample_id: num(f(0))? as usize,
            source_matrix: num(f(1))? as usize,
            source_row: num(f(2))? as usize,
            t: num(f(3))? as usize,
            r_norm_sq: num(f(4))?,
            sigma,
            x,
            target: num(f(width - 1))?,
            r: Vec::new(),
        });
    }
    Ok(out)
}
