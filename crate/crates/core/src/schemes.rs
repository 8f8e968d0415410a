//! Mini-batch transport schemes.
//!
//! Both clouds are split into `k` mini-batches of `m` points each. Every pair
//! of batches is compared with an inner metric, which fills a `k×k` cost
//! matrix `C`. The schemes differ only in how `C` is reduced:
//!
//! * [`OuterScheme::Average`] (m-OT) weights every pair by `1/k²`;
//! * [`OuterScheme::Exact`] (BoMb-OT) solves an exact OT problem between the
//!   two uniform measures over batches and weights pairs by its coupling `γ`;
//! * [`OuterScheme::Entropic`] (eBoMb-OT) uses an entropic coupling instead,
//!   interpolating between the other two as `λ` goes from 0 to ∞.
//!
//! The same weights combine the inner plans into a sparse `n×n` plan
//! ([`aggregate_plan`]).

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::measures::{
    batch_measure, CostMatrix, DiscreteMeasure, MiniBatchIndex, PointCloud, TransportPlan,
};
use crate::rng::{substream, TAG_BATCH_X, TAG_BATCH_Y, TAG_CELL};
use crate::solvers::{exact_ot_uniform, inner_distance, sinkhorn, InnerMetric};

/// Marginal tolerance for the entropic outer coupling.
pub const OUTER_SINKHORN_TOL: f64 = 1e-9;
/// Iteration cap for the entropic outer coupling.
pub const OUTER_SINKHORN_MAX_ITER: usize = 100_000;

/// Largest support size accepted by [`all_batches`].
pub const EXHAUSTIVE_MAX_N: usize = 8;
/// Largest batch size accepted by [`all_batches`].
pub const EXHAUSTIVE_MAX_M: usize = 3;

/// How the `k×k` matrix of batch distances is reduced to a loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterScheme {
    /// m-OT: uniform weights `1/k²`.
    Average,
    /// BoMb-OT: exact optimal coupling between batches.
    Exact,
    /// eBoMb-OT: entropic coupling with regularization `lambda`.
    Entropic { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    /// Number of mini-batches per side.
    pub k: usize,
    /// Points per mini-batch.
    pub m: usize,
    pub inner: InnerMetric,
    pub outer: OuterScheme,
    pub seed: u64,
    /// Assemble the `n×n` plan from the inner plans.
    pub aggregate_plan: bool,
    /// Draw the source batches from the target stream and vice versa, so that
    /// `mb_distance(Y, X)` sees the same batch pairs as `mb_distance(X, Y)`.
    pub swap_batch_streams: bool,
}

impl SchemeConfig {
    pub fn new(k: usize, m: usize, inner: InnerMetric, outer: OuterScheme, seed: u64) -> Self {
        Self {
            k,
            m,
            inner,
            outer,
            seed,
            aggregate_plan: false,
            swap_batch_streams: false,
        }
    }

    pub fn with_aggregation(mut self, on: bool) -> Self {
        self.aggregate_plan = on;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m == 0 {
            return invalid(format!(
                "k and m must be positive, got k={} m={}",
                self.k, self.m
            ));
        }
        if let OuterScheme::Entropic { lambda } = self.outer {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return invalid(format!("lambda must be positive, got {lambda}"));
            }
        }
        self.inner.validate()?;
        if self.aggregate_plan && !self.inner.produces_plan() {
            return Err(Error::Config(
                "plan aggregation needs a plan-producing inner metric (not sliced)".into(),
            ));
        }
        Ok(())
    }
}

/// Output of [`mb_distance`].
#[derive(Debug, Clone)]
pub struct MbResult {
    pub loss: f64,
    /// `k×k` coupling between batches with uniform `1/k` marginals.
    pub outer_plan: TransportPlan,
    pub aggregated_plan: Option<TransportPlan>,
    pub batches_x: Vec<MiniBatchIndex>,
    pub batches_y: Vec<MiniBatchIndex>,
    pub cost_matrix: CostMatrix,
}

/// `k` batches of `m` distinct indices in `[0, n)`. Different batches may overlap.
pub fn sample_index_batches<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<Vec<MiniBatchIndex>> {
    if m > n {
        return invalid(format!("batch size {m} exceeds the {n} available points"));
    }
    (0..k)
        .map(|_| MiniBatchIndex::new(index::sample(rng, n, m).into_vec(), n))
        .collect()
}

/// Draws the `k` source and `k` target batches for `cfg`.
pub fn sample_batches(
    n_x: usize,
    n_y: usize,
    cfg: &SchemeConfig,
) -> Result<(Vec<MiniBatchIndex>, Vec<MiniBatchIndex>)> {
    let (tag_x, tag_y) = if cfg.swap_batch_streams {
        (TAG_BATCH_Y, TAG_BATCH_X)
    } else {
        (TAG_BATCH_X, TAG_BATCH_Y)
    };
    let bx = sample_index_batches(n_x, cfg.k, cfg.m, &mut substream(cfg.seed, &[tag_x]))?;
    let by = sample_index_batches(n_y, cfg.k, cfg.m, &mut substream(cfg.seed, &[tag_y]))?;
    Ok((bx, by))
}

/// Batch-pair distances plus, when requested, the inner plans.
#[derive(Debug, Clone)]
pub struct BatchCosts {
    pub cost: CostMatrix,
    /// Row-major: entry `i * k_y + j` belongs to source batch `i`, target batch `j`.
    pub plans: Vec<Option<TransportPlan>>,
}

/// Fills `C[i][j] = d(P_{X_i}, P_{Y_j})`.
///
/// The `k_x·k_y` inner problems run in parallel. Cell `(i, j)` draws from its
/// own stream derived from `(seed, i, j)`, so the output does not depend on
/// the thread schedule.
pub fn batch_cost_matrix(
    data_x: &PointCloud,
    data_y: &PointCloud,
    batches_x: &[MiniBatchIndex],
    batches_y: &[MiniBatchIndex],
    inner: &InnerMetric,
    seed: u64,
    keep_plans: bool,
) -> Result<BatchCosts> {
    let mx: Vec<DiscreteMeasure> = batches_x
        .iter()
        .map(|b| batch_measure(data_x, b))
        .collect::<Result<_>>()?;
    let my: Vec<DiscreteMeasure> = batches_y
        .iter()
        .map(|b| batch_measure(data_y, b))
        .collect::<Result<_>>()?;
    let (kx, ky) = (mx.len(), my.len());

    let cells: Vec<(f64, Option<TransportPlan>)> = (0..kx * ky)
        .into_par_iter()
        .map(|cell| {
            let (i, j) = (cell / ky, cell % ky);
            let mut rng = substream(seed, &[TAG_CELL, i as u64, j as u64]);
            let (d, plan) = inner_distance(&mx[i], &my[j], inner, &mut rng)?;
            Ok((d, plan.filter(|_| keep_plans)))
        })
        .collect::<Result<_>>()?;

    let mut values = Array2::zeros((kx, ky));
    let mut plans = Vec::with_capacity(cells.len());
    for (cell, (d, plan)) in cells.into_iter().enumerate() {
        values[[cell / ky, cell % ky]] = d;
        plans.push(plan);
    }
    Ok(BatchCosts {
        cost: CostMatrix::new(values)?,
        plans,
    })
}

fn require_square(c: &CostMatrix) -> Result<usize> {
    if !c.is_square() || c.rows() == 0 {
        return invalid(format!(
            "outer cost must be square and non-empty, got {}x{}",
            c.rows(),
            c.cols()
        ));
    }
    Ok(c.rows())
}

/// m-OT: the mean of all batch-pair distances, with the uniform `1/k²` coupling.
pub fn mot_loss(c: &CostMatrix) -> Result<(f64, TransportPlan)> {
    let k = require_square(c)?;
    let w = 1.0 / (k * k) as f64;
    let loss = c.values().sum() * w;
    let uniform = vec![1.0 / k as f64; k];
    let plan = TransportPlan::from_dense(
        Array2::from_elem((k, k), w).view(),
        uniform.clone(),
        uniform,
    )?;
    Ok((loss, plan))
}

/// BoMb-OT: exact OT between the uniform measures over batches.
pub fn bomb_loss(c: &CostMatrix) -> Result<(f64, TransportPlan)> {
    require_square(c)?;
    let (plan, report) = exact_ot_uniform(c)?;
    Ok((report.objective, plan))
}

/// eBoMb-OT: `⟨γ, C⟩` for the entropic coupling `γ` with regularization `lambda`.
pub fn ebomb_loss(c: &CostMatrix, lambda: f64) -> Result<(f64, TransportPlan)> {
    let k = require_square(c)?;
    let u = ndarray::Array1::from_elem(k, 1.0 / k as f64);
    let (plan, report) = sinkhorn(
        c,
        u.view(),
        u.view(),
        lambda,
        OUTER_SINKHORN_TOL,
        OUTER_SINKHORN_MAX_ITER,
    )?;
    Ok((report.objective, plan))
}

/// Reduces `c` with the given outer scheme.
pub fn outer_loss(c: &CostMatrix, outer: &OuterScheme) -> Result<(f64, TransportPlan)> {
    match *outer {
        OuterScheme::Average => mot_loss(c),
        OuterScheme::Exact => bomb_loss(c),
        OuterScheme::Entropic { lambda } => ebomb_loss(c, lambda),
    }
}

/// Scatters `Σ_ij γ_ij π_ij` into an `n_x×n_y` plan through the batch indices.
///
/// Masses landing on the same `(row, col)` accumulate. The declared marginals
/// are the outer-weighted mixtures of the inner plans' marginals; with exact
/// solvers the row mass of point `a` is `(#batches containing a)/(k·m)`.
pub fn aggregate_plan(
    outer: &TransportPlan,
    inner_plans: &[Option<TransportPlan>],
    batches_x: &[MiniBatchIndex],
    batches_y: &[MiniBatchIndex],
    n_x: usize,
    n_y: usize,
) -> Result<TransportPlan> {
    let (kx, ky) = (batches_x.len(), batches_y.len());
    if outer.rows() != kx || outer.cols() != ky || inner_plans.len() != kx * ky {
        return Err(Error::Internal(format!(
            "outer plan {}x{} with {} inner plans does not match {kx}x{ky} batches",
            outer.rows(),
            outer.cols(),
            inner_plans.len()
        )));
    }
    let mut mass: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut row_marginal = vec![0.0; n_x];
    let mut col_marginal = vec![0.0; n_y];
    for &(i, j, gamma) in outer.entries() {
        let plan = inner_plans[i * ky + j].as_ref().ok_or_else(|| {
            Error::Internal(format!(
                "missing inner plan for batch pair ({i}, {j}) with outer mass {gamma}"
            ))
        })?;
        let (ix, iy) = (batches_x[i].indices(), batches_y[j].indices());
        if plan.rows() != ix.len() || plan.cols() != iy.len() {
            return Err(Error::Internal(format!(
                "inner plan ({i}, {j}) has the wrong shape"
            )));
        }
        for &(a, b, p) in plan.entries() {
            *mass.entry((ix[a], iy[b])).or_insert(0.0) += gamma * p;
        }
        for (a, w) in plan.row_marginal().iter().enumerate() {
            row_marginal[ix[a]] += gamma * w;
        }
        for (b, w) in plan.col_marginal().iter().enumerate() {
            col_marginal[iy[b]] += gamma * w;
        }
    }
    TransportPlan::from_triplets(
        n_x,
        n_y,
        mass.into_iter().map(|((a, b), p)| (a, b, p)),
        row_marginal,
        col_marginal,
    )
}

/// Samples batches from `cfg.seed` and evaluates the configured scheme.
pub fn mb_distance(x: &PointCloud, y: &PointCloud, cfg: &SchemeConfig) -> Result<MbResult> {
    cfg.validate()?;
    if cfg.m > x.len().min(y.len()) {
        return invalid(format!(
            "batch size {} exceeds cloud sizes ({}, {})",
            cfg.m,
            x.len(),
            y.len()
        ));
    }
    let (bx, by) = sample_batches(x.len(), y.len(), cfg)?;
    mb_distance_with_batches(x, y, cfg, bx, by)
}

/// Like [`mb_distance`] but with caller-supplied batches. `cfg.k` and `cfg.m`
/// are ignored in favour of the batches' own count and size.
pub fn mb_distance_with_batches(
    x: &PointCloud,
    y: &PointCloud,
    cfg: &SchemeConfig,
    batches_x: Vec<MiniBatchIndex>,
    batches_y: Vec<MiniBatchIndex>,
) -> Result<MbResult> {
    cfg.validate()?;
    if x.dim() != y.dim() {
        return invalid(format!("dimensions differ: {} vs {}", x.dim(), y.dim()));
    }
    if batches_x.is_empty() || batches_x.len() != batches_y.len() {
        return invalid(format!(
            "need the same positive number of batches on both sides, got {} and {}",
            batches_x.len(),
            batches_y.len()
        ));
    }
    let costs = batch_cost_matrix(
        x,
        y,
        &batches_x,
        &batches_y,
        &cfg.inner,
        cfg.seed,
        cfg.aggregate_plan,
    )?;
    let (loss, outer_plan) = outer_loss(&costs.cost, &cfg.outer)?;
    let aggregated_plan = if cfg.aggregate_plan {
        Some(aggregate_plan(
            &outer_plan,
            &costs.plans,
            &batches_x,
            &batches_y,
            x.len(),
            y.len(),
        )?)
    } else {
        None
    };
    Ok(MbResult {
        loss,
        outer_plan,
        aggregated_plan,
        batches_x,
        batches_y,
        cost_matrix: costs.cost,
    })
}

/// Every `m`-subset of `[0, n)` in lexicographic order, for tiny `n` and `m`.
pub fn all_batches(n: usize, m: usize) -> Result<Vec<MiniBatchIndex>> {
    if n > EXHAUSTIVE_MAX_N || m > EXHAUSTIVE_MAX_M || m == 0 || m > n {
        return invalid(format!(
            "exhaustive batches need 1 <= m <= {EXHAUSTIVE_MAX_M}, m <= n <= {EXHAUSTIVE_MAX_N}; got n={n} m={m}"
        ));
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        out.push(MiniBatchIndex::new(combo.clone(), n)?);
        let Some(pos) = (0..m).rev().find(|&i| combo[i] < n - m + i) else {
            break;
        };
        combo[pos] += 1;
        for i in pos + 1..m {
            combo[i] = combo[i - 1] + 1;
        }
    }
    Ok(out)
}

/// Evaluates the scheme over all `C(n, m)` batches on each side.
pub fn exhaustive_distance(
    x: &PointCloud,
    y: &PointCloud,
    m: usize,
    inner: InnerMetric,
    outer: OuterScheme,
) -> Result<MbResult> {
    if x.len() != y.len() {
        return invalid("exhaustive mode needs clouds of equal size");
    }
    let bx = all_batches(x.len(), m)?;
    let by = bx.clone();
    let cfg = SchemeConfig::new(bx.len(), m, inner, outer, 0);
    mb_distance_with_batches(x, y, &cfg, bx, by)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::validate_plan;
    use ndarray::array;

    const W2: InnerMetric = InnerMetric::ExactW { p: 2.0 };

    fn line(values: &[f64]) -> PointCloud {
        PointCloud::from_scalars(values).unwrap()
    }

    #[test]
    fn full_batch_is_a_permutation_of_all_indices() {
        let cfg = SchemeConfig::new(1, 4, W2, OuterScheme::Exact, 5);
        let (bx, by) = sample_batches(4, 4, &cfg).unwrap();
        for b in bx.iter().chain(&by) {
            let mut idx = b.indices().to_vec();
            idx.sort_unstable();
            assert_eq!(idx, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let cfg = SchemeConfig::new(3, 2, W2, OuterScheme::Exact, 17);
        assert_eq!(
            sample_batches(10, 10, &cfg).unwrap(),
            sample_batches(10, 10, &cfg).unwrap()
        );

        let many = SchemeConfig::new(100, 2, W2, OuterScheme::Exact, 17);
        let (bx, _) = sample_batches(10, 10, &many).unwrap();
        assert_eq!(bx.len(), 100);
        assert!(bx.iter().flat_map(|b| b.indices()).all(|&i| i < 10));
    }

    #[test]
    fn oversized_batch_is_rejected() {
        let cfg = SchemeConfig::new(1, 5, W2, OuterScheme::Exact, 0);
        assert!(sample_batches(4, 10, &cfg).is_err());
        assert!(mb_distance(&line(&[0.0, 1.0]), &line(&[0.0, 1.0, 2.0]), &cfg).is_err());
    }

    #[test]
    fn mot_loss_examples() {
        let c = CostMatrix::new(array![[0.0, 2.0], [2.0, 0.0]]).unwrap();
        assert_eq!(mot_loss(&c).unwrap().0, 1.0);
        let single = CostMatrix::new(array![[3.5]]).unwrap();
        assert_eq!(mot_loss(&single).unwrap().0, 3.5);
        let constant = CostMatrix::new(Array2::from_elem((3, 3), 0.25)).unwrap();
        assert_eq!(mot_loss(&constant).unwrap().0, 0.25);
        let (_, plan) = mot_loss(&constant).unwrap();
        assert_eq!(plan.nnz(), 9);
        assert!(validate_plan(&plan, 1e-12).valid);
    }

    #[test]
    fn bomb_loss_examples() {
        let c = CostMatrix::new(array![[0.0, 2.0], [2.0, 0.0]]).unwrap();
        let (loss, plan) = bomb_loss(&c).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(plan.entries(), &[(0, 0, 0.5), (1, 1, 0.5)]);

        let c = CostMatrix::new(array![[1.0, 2.0], [3.0, 1.0]]).unwrap();
        assert_eq!(bomb_loss(&c).unwrap().0, 1.0);

        let single = CostMatrix::new(array![[3.5]]).unwrap();
        assert_eq!(bomb_loss(&single).unwrap().0, mot_loss(&single).unwrap().0);
    }

    #[test]
    fn ebomb_interpolates_between_schemes() {
        let c = CostMatrix::new(array![[1.0, 2.0], [3.0, 1.0]]).unwrap();
        let (loss, plan) = ebomb_loss(&c, 1e-4).unwrap();
        assert!((loss - 1.0).abs() < 1e-3);
        assert!(validate_plan(&plan, 1e-9).valid);

        let c = CostMatrix::new(array![[0.0, 2.0], [2.0, 0.0]]).unwrap();
        let (loss, _) = ebomb_loss(&c, 1.0).unwrap();
        assert!(loss > 0.0 && loss < 1.0, "{loss}");
    }

    #[test]
    fn ebomb_large_lambda_recovers_mot() {
        // Unit-scale costs: entries deviate from 1/k² by about (centered cost)/(λk²).
        let c = CostMatrix::new(array![[0.3, 1.0, 0.1], [0.5, 0.2, 0.7], [1.0, 0.4, 0.9]]).unwrap();
        let (mot, _) = mot_loss(&c).unwrap();
        let (loss, plan) = ebomb_loss(&c, 1e3).unwrap();
        assert!((loss - mot).abs() <= 1e-3 * mot);
        for v in plan.to_dense() {
            assert!((v - 1.0 / 9.0).abs() <= 1e-4);
        }
    }

    #[test]
    fn non_square_outer_cost_is_rejected() {
        let c = CostMatrix::new(Array2::zeros((2, 3))).unwrap();
        assert!(mot_loss(&c).is_err());
        assert!(bomb_loss(&c).is_err());
        assert!(ebomb_loss(&c, 1.0).is_err());
    }

    #[test]
    fn single_batch_cost_matrix_matches_one_inner_call() {
        let x = line(&[0.0, 1.0, 4.0]);
        let y = line(&[2.0, 3.0, 9.0]);
        let bx = vec![MiniBatchIndex::new(vec![0, 2], 3).unwrap()];
        let by = vec![MiniBatchIndex::new(vec![1, 2], 3).unwrap()];
        let costs = batch_cost_matrix(&x, &y, &bx, &by, &W2, 0, true).unwrap();
        let a = batch_measure(&x, &bx[0]).unwrap();
        let b = batch_measure(&y, &by[0]).unwrap();
        let (d, plan) = inner_distance(&a, &b, &W2, &mut substream(0, &[])).unwrap();
        assert_eq!(costs.cost.values(), array![[d]]);
        assert_eq!(costs.plans[0], plan);
    }

    #[test]
    fn identical_batches_give_zero_diagonal() {
        let x = PointCloud::from_rows(&[
            vec![0.0, 1.0],
            vec![2.0, 0.0],
            vec![1.0, 1.0],
            vec![3.0, 3.0],
        ])
        .unwrap();
        let cfg = SchemeConfig::new(3, 2, W2, OuterScheme::Exact, 9);
        let (bx, _) = sample_batches(4, 4, &cfg).unwrap();
        let costs = batch_cost_matrix(&x, &x, &bx, &bx, &W2, 0, false).unwrap();
        for i in 0..3 {
            assert_eq!(costs.cost.get(i, i), 0.0);
        }
        assert!(costs.plans.iter().all(Option::is_none));
    }

    #[test]
    fn aggregation_with_one_batch_embeds_the_inner_plan() {
        let x = line(&[0.0, 5.0, 1.0, 7.0]);
        let y = line(&[1.5, 0.5, 9.0, 6.0]);
        let cfg = SchemeConfig::new(1, 2, W2, OuterScheme::Exact, 0).with_aggregation(true);
        let bx = vec![MiniBatchIndex::new(vec![2, 0], 4).unwrap()];
        let by = vec![MiniBatchIndex::new(vec![1, 0], 4).unwrap()];
        let res = mb_distance_with_batches(&x, &y, &cfg, bx, by).unwrap();
        let plan = res.aggregated_plan.unwrap();
        // Sorted matching: 0 -> 0.5 (index 1), 1 -> 1.5 (index 0).
        assert_eq!(plan.entries(), &[(0, 1, 0.5), (2, 0, 0.5)]);
        assert!(validate_plan(&plan, 1e-12).valid);
    }

    #[test]
    fn missing_inner_plan_is_an_internal_error() {
        let outer = TransportPlan::scaled_permutation(&[0]).unwrap();
        let b = vec![MiniBatchIndex::new(vec![0], 1).unwrap()];
        let err = aggregate_plan(&outer, &[None], &b, &b, 1, 1).unwrap_err();
        assert!(matches!(err, Error::Internal(_)));
    }

    #[test]
    fn sliced_inner_with_aggregation_is_a_config_error() {
        let x = line(&[0.0, 1.0]);
        let cfg = SchemeConfig::new(
            1,
            1,
            InnerMetric::Sliced {
                p: 2.0,
                projections: 4,
            },
            OuterScheme::Exact,
            0,
        )
        .with_aggregation(true);
        assert!(matches!(mb_distance(&x, &x, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn identical_inputs_and_batches_give_zero_bomb_loss() {
        let x = PointCloud::from_rows(&[
            vec![0.0, 1.0],
            vec![2.0, 0.0],
            vec![1.0, 1.0],
            vec![3.0, 3.0],
            vec![0.5, 0.0],
        ])
        .unwrap();
        let cfg = SchemeConfig::new(4, 3, W2, OuterScheme::Exact, 3);
        let (bx, _) = sample_batches(5, 5, &cfg).unwrap();
        let res = mb_distance_with_batches(&x, &x, &cfg, bx.clone(), bx).unwrap();
        assert_eq!(res.loss, 0.0);
    }

    #[test]
    fn k_equal_one_schemes_coincide() {
        let x = line(&[0.0, 5.0, 1.0, 7.0, 2.0]);
        let y = line(&[1.5, 0.5, 9.0, 6.0, -1.0]);
        let base = SchemeConfig::new(1, 3, W2, OuterScheme::Average, 21).with_aggregation(true);
        let avg = mb_distance(&x, &y, &base).unwrap();
        let exact = mb_distance(
            &x,
            &y,
            &SchemeConfig {
                outer: OuterScheme::Exact,
                ..base
            },
        )
        .unwrap();
        assert_eq!(avg.loss, exact.loss);
        assert_eq!(avg.outer_plan, exact.outer_plan);
        assert_eq!(avg.aggregated_plan, exact.aggregated_plan);
    }

    #[test]
    fn exhaustive_batch_enumeration() {
        let all = all_batches(5, 2).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0].indices(), &[0, 1]);
        assert_eq!(all[9].indices(), &[3, 4]);
        assert_eq!(all_batches(8, 3).unwrap().len(), 56);
        assert!(all_batches(9, 2).is_err());
        assert!(all_batches(6, 4).is_err());
    }

    #[test]
    fn exhaustive_distance_of_identical_clouds_is_zero() {
        let x = line(&[0.0, 1.0, 3.0, 7.0]);
        let res = exhaustive_distance(&x, &x, 2, W2, OuterScheme::Exact).unwrap();
        assert_eq!(res.loss, 0.0);
        // m-OT does not vanish on identical inputs.
        let avg = exhaustive_distance(&x, &x, 2, W2, OuterScheme::Average).unwrap();
        assert!(avg.loss > 0.0);
    }
}
