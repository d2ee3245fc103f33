//! Constrained non-negative matrix factorization: the objective, the
//! multiplicative update rules, and the alternating fit driver.
//!
//! The loss is ||A - UV||_F^2 + beta * ||U^T U - I||_F^2 + lambda * sum(V),
//! minimized over elementwise-nonnegative U (word-to-topic) and V
//! (topic-to-sentence).

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::frob_sq;

/// Floor applied to every entry after each multiplicative update; keeps the
/// factors strictly positive so no denominator can vanish and no entry gets
/// absorbed at zero.
pub const EPS_FLOOR: f64 = 1e-12;

/// The factorization A ~ U V.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    /// M x K word-to-topic weights.
    pub u: Array2<f64>,
    /// K x (N+1) topic-to-sentence weights.
    pub v: Array2<f64>,
}

/// Hyperparameters of the plain topic model.
#[derive(Debug, Clone, PartialEq)]
pub struct NmfHyper {
    pub k_topics: usize,
    /// Orthogonality pressure on U's columns.
    pub beta: f64,
    /// Sparsity pressure on V.
    pub lambda: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for NmfHyper {
    fn default() -> Self {
        NmfHyper {
            k_topics: 10,
            beta: 0.1,
            lambda: 0.1,
            max_iters: 500,
            rel_tol: 1e-5,
        }
    }
}

impl NmfHyper {
    pub fn validate(&self) -> Result<()> {
        if self.k_topics == 0 {
            return Err(Error::Contract("k_topics must be >= 1".into()));
        }
        if self.beta < 0.0 || self.lambda < 0.0 {
            return Err(Error::Contract("beta and lambda must be >= 0".into()));
        }
        if self.max_iters == 0 || self.rel_tol <= 0.0 {
            return Err(Error::Contract(
                "max_iters must be >= 1 and rel_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

fn check_dims(a: &Array2<f64>, fp: &FactorPair) -> Result<()> {
    let (m, n) = a.dim();
    if fp.u.nrows() != m || fp.u.ncols() != fp.v.nrows() || fp.v.ncols() != n {
        return Err(Error::Contract(format!(
            "dimension mismatch: A is {}x{}, U is {}x{}, V is {}x{}",
            m,
            n,
            fp.u.nrows(),
            fp.u.ncols(),
            fp.v.nrows(),
            fp.v.ncols()
        )));
    }
    Ok(())
}

/// Seeded strictly-positive initialization, entries Uniform(0.1, 1.1).
pub fn init_factors(m: usize, n: usize, k: usize, seed: u64) -> FactorPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Array2::from_shape_fn((m, k), |_| rng.gen_range(0.1..1.1));
    let v = Array2::from_shape_fn((k, n), |_| rng.gen_range(0.1..1.1));
    FactorPair { u, v }
}

/// ||A - UV||_F^2 + beta ||U^T U - I||_F^2 + lambda sum(V).
pub fn nmf_objective(a: &Array2<f64>, fp: &FactorPair, h: &NmfHyper) -> Result<f64> {
    check_dims(a, fp)?;
    Ok(nmf_objective_unchecked(a, fp, h))
}

pub(crate) fn nmf_objective_unchecked(a: &Array2<f64>, fp: &FactorPair, h: &NmfHyper) -> f64 {
    let residual = a - &fp.u.dot(&fp.v);
    let gram = fp.u.t().dot(&fp.u);
    let eye = Array2::<f64>::eye(fp.u.ncols());
    frob_sq(&residual) + h.beta * frob_sq(&(&gram - &eye)) + h.lambda * fp.v.sum()
}

pub(crate) fn multiplicative_step(
    base: &Array2<f64>,
    numer: &Array2<f64>,
    denom: &Array2<f64>,
) -> Result<Array2<f64>> {
    if denom.iter().any(|&d| d == 0.0) {
        return Err(Error::Contract(
            "zero denominator entry in multiplicative update".into(),
        ));
    }
    let mut out = base.clone();
    ndarray::Zip::from(&mut out)
        .and(numer)
        .and(denom)
        .for_each(|o, &n, &d| {
            *o *= n / d;
            if *o < EPS_FLOOR {
                *o = EPS_FLOOR;
            }
        });
    Ok(out)
}

/// U <- U .* (A V^T + 2 beta U) ./ (U V V^T + 2 beta U U^T U).
pub fn update_u(a: &Array2<f64>, fp: &FactorPair, h: &NmfHyper) -> Result<Array2<f64>> {
    check_dims(a, fp)?;
    let numer = a.dot(&fp.v.t()) + &(2.0 * h.beta * &fp.u);
    let gram = fp.u.t().dot(&fp.u);
    let denom = fp.u.dot(&fp.v.dot(&fp.v.t())) + &(2.0 * h.beta * fp.u.dot(&gram));
    multiplicative_step(&fp.u, &numer, &denom)
}

/// V <- V .* (U^T A) ./ (U^T U V + lambda/2).
pub fn update_v(a: &Array2<f64>, fp: &FactorPair, h: &NmfHyper) -> Result<Array2<f64>> {
    check_dims(a, fp)?;
    let numer = fp.u.t().dot(a);
    let denom = fp.u.t().dot(&fp.u).dot(&fp.v) + h.lambda / 2.0;
    multiplicative_step(&fp.v, &numer, &denom)
}

/// Analytic gradient of the objective with respect to U:
/// 2 U V V^T - 2 A V^T + 4 beta U U^T U - 4 beta U.
pub fn grad_u(a: &Array2<f64>, fp: &FactorPair, h: &NmfHyper) -> Array2<f64> {
    let gram = fp.u.t().dot(&fp.u);
    2.0 * fp.u.dot(&fp.v.dot(&fp.v.t())) - 2.0 * a.dot(&fp.v.t()) + 4.0 * h.beta * fp.u.dot(&gram)
        - 4.0 * h.beta * &fp.u
}

/// Analytic gradient of the objective with respect to V:
/// 2 U^T U V - 2 U^T A + lambda.
pub fn grad_v(a: &Array2<f64>, fp: &FactorPair, h: &NmfHyper) -> Array2<f64> {
    2.0 * fp.u.t().dot(&fp.u).dot(&fp.v) - 2.0 * fp.u.t().dot(a) + h.lambda
}

/// Alternate `update_u_fn` / `update_v_fn` from `init` until the relative
/// objective change drops below `rel_tol` or `max_iters` passes. Shared by the
/// plain, knowledge-constrained and rank-weighted fits so the stopping logic
/// is identical across them.
///
/// Fixed-point convention: the step that falls below tolerance is discarded
/// and the pre-step iterate is returned, so re-running the loop on its own
/// output reproduces that output exactly.
pub(crate) fn fit_loop<FU, FV, FO>(
    mut fp: FactorPair,
    update_u_fn: FU,
    update_v_fn: FV,
    objective_fn: FO,
    rel_tol: f64,
    max_iters: usize,
) -> Result<FactorPair>
where
    FU: Fn(&FactorPair) -> Result<Array2<f64>>,
    FV: Fn(&FactorPair) -> Result<Array2<f64>>,
    FO: Fn(&FactorPair) -> f64,
{
    let mut prev = objective_fn(&fp);
    if !prev.is_finite() {
        return Err(Error::Numerical("non-finite objective at start".into()));
    }
    for _ in 0..max_iters {
        let u = update_u_fn(&fp)?;
        let staged = FactorPair { u, v: fp.v.clone() };
        let v = update_v_fn(&staged)?;
        let candidate = FactorPair { u: staged.u, v };
        let obj = objective_fn(&candidate);
        if !obj.is_finite() {
            return Err(Error::Numerical("non-finite objective during fit".into()));
        }
        let rel = (prev - obj).abs() / prev.abs().max(f64::MIN_POSITIVE);
        if rel < rel_tol {
            return Ok(fp);
        }
        fp = candidate;
        prev = obj;
    }
    Ok(fp)
}

/// Fit the plain topic model from a seeded random start.
pub fn fit_nmf(a: &Array2<f64>, h: &NmfHyper, seed: u64) -> Result<FactorPair> {
    h.validate()?;
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::Contract("empty matrix".into()));
    }
    let init = init_factors(m, n, h.k_topics, seed);
    fit_loop(
        init,
        |fp| update_u(a, fp, h),
        |fp| update_v(a, fp, h),
        |fp| nmf_objective_unchecked(a, fp, h),
        h.rel_tol,
        h.max_iters,
    )
}

/// Per-topic word indices ordered by descending weight, ties broken by the
/// lower word index; at most `count` per topic.
pub fn top_words(u: &Array2<f64>, count: usize) -> Vec<Vec<usize>> {
    let m = u.nrows();
    (0..u.ncols())
        .map(|k| {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                u[[b, k]]
                    .partial_cmp(&u[[a, k]])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            order.truncate(count.min(m));
            order
        })
        .collect()
}
