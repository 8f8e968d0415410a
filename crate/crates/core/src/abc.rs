//! Rejection approximate Bayesian computation with mini-batch transport
//! distances as the acceptance criterion.
//!
//! The model is the conjugate Gaussian-variance problem: observations are
//! `N(μ*, σ² I_N)` with `μ*` known and an inverse-gamma prior on `σ²`, so the
//! exact posterior is available for checking.

use ndarray::{Array2, ArrayView2};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::measures::PointCloud;
use crate::rng::{derive_seed, substream, TAG_PILOT, TAG_PROPOSAL, TAG_SUBSAMPLE};
use crate::schemes::{mb_distance, SchemeConfig};
use crate::solvers::wasserstein_1d;

/// Proposals evaluated per parallel chunk.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct AbcConfig {
    /// Inverse-gamma prior shape `α`.
    pub prior_shape: f64,
    /// Inverse-gamma prior scale `β`.
    pub prior_scale: f64,
    pub mu_star: Vec<f64>,
    /// Points simulated per proposal.
    pub n_obs: usize,
    pub scheme: SchemeConfig,
    pub epsilon: f64,
    /// Accepted samples wanted.
    pub n_posterior: usize,
    pub max_proposals: usize,
    pub seed: u64,
}

impl AbcConfig {
    pub fn dims(&self) -> usize {
        self.mu_star.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prior_shape > 0.0 && self.prior_scale > 0.0) {
            return invalid("prior shape and scale must be positive");
        }
        if !(self.epsilon > 0.0) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.n_obs == 0 || self.mu_star.is_empty() {
            return invalid("need at least one observation and one dimension");
        }
        if self.n_posterior == 0 || self.max_proposals == 0 {
            return invalid("n_posterior and max_proposals must be positive");
        }
        self.scheme.validate()
    }
}

/// One prior draw with its distance to the observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proposal {
    pub index: usize,
    pub sigma2: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSample {
    /// Accepted proposals in proposal order.
    pub accepted: Vec<Proposal>,
    pub proposals_used: usize,
    pub acceptance_rate: f64,
    /// False when `max_proposals` ran out before `n_posterior` acceptances.
    pub complete: bool,
}

impl PosteriorSample {
    pub fn values(&self) -> Vec<f64> {
        self.accepted.iter().map(|p| p.sigma2).collect()
    }

    pub fn mean(&self) -> f64 {
        self.accepted.iter().map(|p| p.sigma2).sum::<f64>() / self.accepted.len() as f64
    }
}

/// `n` draws from `N(μ*, σ² I)`.
pub fn simulate<R: Rng + ?Sized>(
    sigma2: f64,
    mu_star: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<PointCloud> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return invalid(format!(
            "variance must be positive and finite, got {sigma2}"
        ));
    }
    let sd = sigma2.sqrt();
    let dim = mu_star.len();
    let pts = Array2::from_shape_fn((n, dim), |(_, j)| {
        let z: f64 = rng.sample(StandardNormal);
        mu_star[j] + sd * z
    });
    PointCloud::new(pts)
}

/// Draw from the inverse gamma `IG(shape, scale)` as `1 / Gamma(shape, 1/scale)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    let gamma = Gamma::new(shape, 1.0 / scale).expect("positive inverse-gamma parameters");
    1.0 / gamma.sample(rng)
}

/// Mini-batch transport distance between observed and simulated data.
pub fn abc_distance(obs: &PointCloud, sim: &PointCloud, scheme: &SchemeConfig) -> Result<f64> {
    Ok(mb_distance(obs, sim, &scheme.with_aggregation(false))?.loss)
}

/// Proposal `index` of the stream `tag`. Depends only on `(cfg, tag, index)`.
fn propose(obs: &PointCloud, cfg: &AbcConfig, tag: u64, index: usize) -> Result<Proposal> {
    let mut rng = substream(cfg.seed, &[tag, index as u64]);
    let sigma2 = sample_inverse_gamma(cfg.prior_shape, cfg.prior_scale, &mut rng);
    // Extremely small draws underflow the simulator; treat them as far away.
    let sim = match simulate(sigma2, &cfg.mu_star, cfg.n_obs, &mut rng) {
        Ok(sim) => sim,
        Err(_) => {
            return Ok(Proposal {
                index,
                sigma2,
                distance: f64::INFINITY,
            })
        }
    };
    let scheme = cfg
        .scheme
        .with_seed(derive_seed(cfg.scheme.seed, &[tag, index as u64]));
    Ok(Proposal {
        index,
        sigma2,
        distance: abc_distance(obs, &sim, &scheme)?,
    })
}

fn propose_range(
    obs: &PointCloud,
    cfg: &AbcConfig,
    tag: u64,
    range: std::ops::Range<usize>,
) -> Result<Vec<Proposal>> {
    range
        .into_par_iter()
        .map(|i| propose(obs, cfg, tag, i))
        .collect()
}

/// Distances of `count` prior-predictive draws, from a stream separate from
/// the one [`rejection_abc`] uses.
pub fn pilot_distances(obs: &PointCloud, cfg: &AbcConfig, count: usize) -> Result<Vec<f64>> {
    check_obs(obs, cfg)?;
    Ok(propose_range(obs, cfg, TAG_PILOT, 0..count)?
        .into_iter()
        .map(|p| p.distance)
        .collect())
}

/// Linear-interpolated percentile (`pct` in `[0, 100]`) of `values`.
pub fn percentile(values: &[f64], pct: f64) -> Result<f64> {
    if values.is_empty() {
        return invalid("percentile of an empty set");
    }
    if !(0.0..=100.0).contains(&pct) {
        return invalid(format!("percentile must be in [0, 100], got {pct}"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = pct / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

fn check_obs(obs: &PointCloud, cfg: &AbcConfig) -> Result<()> {
    cfg.validate()?;
    if obs.dim() != cfg.dims() {
        return invalid(format!(
            "observations have dimension {}, expected {}",
            obs.dim(),
            cfg.dims()
        ));
    }
    Ok(())
}

/// Draws `σ² ~ IG(α, β)`, simulates, and accepts iff the distance is at most `ε`,
/// until `n_posterior` acceptances or `max_proposals` draws.
///
/// Proposals are evaluated in parallel, but acceptance is decided in proposal
/// order, so the output does not depend on the thread count.
pub fn rejection_abc(obs: &PointCloud, cfg: &AbcConfig) -> Result<PosteriorSample> {
    check_obs(obs, cfg)?;
    let mut accepted = Vec::new();
    let mut best = f64::INFINITY;
    let mut used = 0;
    'outer: while used < cfg.max_proposals {
        let end = (used + CHUNK).min(cfg.max_proposals);
        for p in propose_range(obs, cfg, TAG_PROPOSAL, used..end)? {
            used = p.index + 1;
            best = best.min(p.distance);
            if p.distance <= cfg.epsilon {
                accepted.push(p);
                if accepted.len() == cfg.n_posterior {
                    break 'outer;
                }
            }
        }
    }
    if accepted.is_empty() {
        return Err(Error::NoAcceptance {
            proposals: used,
            best_distance: best,
        });
    }
    Ok(PosteriorSample {
        complete: accepted.len() == cfg.n_posterior,
        acceptance_rate: accepted.len() as f64 / used as f64,
        accepted,
        proposals_used: used,
    })
}

/// Conjugate posterior `IG(α + nN/2, β + ½ Σ ‖x_i − μ*‖²)`.
pub fn true_posterior_params(
    obs: ArrayView2<'_, f64>,
    mu_star: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    if obs.ncols() != mu_star.len() {
        return invalid(format!(
            "observations have dimension {}, mean has {}",
            obs.ncols(),
            mu_star.len()
        ));
    }
    let n = obs.nrows() as f64;
    let dim = mu_star.len() as f64;
    let sq: f64 = obs
        .rows()
        .into_iter()
        .map(|x| {
            x.iter()
                .zip(mu_star)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    Ok((alpha + n * dim / 2.0, beta + 0.5 * sq))
}

/// One-dimensional `W2` between two sample sets. The larger set is subsampled
/// without replacement (fixed seed) to the size of the smaller one.
pub fn posterior_w2(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("posterior samples are empty");
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut x = small.to_vec();
    let mut y: Vec<f64> = if large.len() == small.len() {
        large.to_vec()
    } else {
        let mut rng = substream(0, &[TAG_SUBSAMPLE]);
        index::sample(&mut rng, large.len(), small.len())
            .into_iter()
            .map(|i| large[i])
            .collect()
    };
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    wasserstein_1d(&x, &y, 2.0)
}
