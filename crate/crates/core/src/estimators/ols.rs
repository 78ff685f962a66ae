use log::warn;

use super::problem::{FitResult, RegressionProblem};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// In-place Cholesky factorization of a symmetric matrix; `false` if not positive definite.
fn cholesky<R: Real>(a: &mut [Vec<R>]) -> bool {
    let n = a.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d = d - a[j][k] * a[j][k];
        }
        if !(d > R::zero()) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
    }
    true
}

fn cholesky_solve<R: Real>(l: &[Vec<R>], b: &[R]) -> Vec<R> {
    let n = l.len();
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] = z[i] - l[i][k] * z[k];
        }
        z[i] = z[i] / l[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            z[i] = z[i] - l[k][i] * z[k];
        }
        z[i] = z[i] / l[i][i];
    }
    z
}

/// Weighted least squares with per-sample weights `w` (multiplied with the problem weights).
/// Returns the solution and whether a ridge term was needed.
pub(crate) fn solve_weighted<R: Real>(p: &RegressionProblem<R>, w: &[R]) -> Result<(Vec<R>, bool)> {
    let n = p.features();
    let mut g = vec![vec![R::zero(); n]; n];
    let mut rhs = vec![R::zero(); n];
    for (i, (row, &yi)) in p.x.iter().zip(&p.y).enumerate() {
        let wi = w[i] * p.base_weight(i);
        if wi == R::zero() {
            continue;
        }
        for a in 0..n {
            let wa = wi * row[a];
            if wa == R::zero() {
                continue;
            }
            rhs[a] = rhs[a] + wa * yi;
            for b in 0..=a {
                g[a][b] = g[a][b] + wa * row[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            g[b][a] = g[a][b];
        }
    }
    let mut l = g.clone();
    if cholesky(&mut l) {
        return Ok((cholesky_solve(&l, &rhs), false));
    }
    let trace = (0..n).map(|i| g[i][i]).fold(R::zero(), |a, b| a + b);
    let lambda = R::of(1e-8) * if trace > R::zero() { trace } else { R::one() };
    let mut l = g;
    for (i, row) in l.iter_mut().enumerate() {
        row[i] = row[i] + lambda;
    }
    if !cholesky(&mut l) {
        return Err(Error::Param("normal equations are singular even with ridge".into()));
    }
    warn!("singular normal equations; added ridge term {lambda}");
    Ok((cholesky_solve(&l, &rhs), true))
}

/// Weighted ordinary least squares.
pub fn fit_ols<R: Real>(p: &RegressionProblem<R>) -> Result<FitResult<R>> {
    p.validate()?;
    if p.samples() < p.features() {
        warn!(
            "{} samples for {} unknowns; the fit is not identifiable",
            p.samples(),
            p.features()
        );
    }
    let ones = vec![R::one(); p.samples()];
    let (coef, ridge) = solve_weighted(p, &ones)?;
    Ok(FitResult::plain(coef, p.samples(), ridge))
}
