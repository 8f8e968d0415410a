//! Inner distance engines: exact OT between uniform measures of equal size,
//! entropic OT, and sliced Wasserstein.
//!
//! All entry points are pure functions of their arguments plus an explicit
//! random generator, and are safe to call from many threads at once.

pub mod assignment;
mod sinkhorn;
mod sliced;

use ndarray::Array2;
use rand::Rng;

pub use sinkhorn::{sinkhorn, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use sliced::{sliced_wasserstein, wasserstein_1d};

use crate::error::{invalid, Result};
use crate::measures::{CostMatrix, DiscreteMeasure, TransportPlan};

/// Tolerance at which exact (assignment) plans satisfy their marginals.
pub const EXACT_TOL: f64 = 1e-9;

/// Diagnostics returned next to a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    /// Transport cost `⟨π, C⟩`, before any `1/p` root.
    pub objective: f64,
    /// `⟨π, C⟩ + τ·KL(π | a⊗b)` for entropic solves.
    pub regularized_objective: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// L1 marginal residual of the returned plan.
    pub marginal_residual: f64,
}

/// Distance used between two mini-batch measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerMetric {
    /// `W_p`, solved exactly by assignment.
    ExactW { p: f64 },
    /// `W_p^τ`, solved by Sinkhorn on the `p`-th power cost.
    EntropicW { p: f64, tau: f64 },
    /// `SW_p` with `projections` random directions.
    Sliced { p: f64, projections: usize },
}

impl InnerMetric {
    pub fn p(&self) -> f64 {
        match *self {
            Self::ExactW { p } | Self::EntropicW { p, .. } | Self::Sliced { p, .. } => p,
        }
    }

    /// Whether the metric yields a transport plan alongside its value.
    pub fn produces_plan(&self) -> bool {
        !matches!(self, Self::Sliced { .. })
    }

    /// Advertised marginal tolerance of the plans this metric produces.
    pub fn plan_tolerance(&self) -> f64 {
        match self {
            Self::ExactW { .. } => EXACT_TOL,
            _ => DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if !(p >= 1.0) || !p.is_finite() {
            return invalid(format!("order p must be at least 1, got {p}"));
        }
        match *self {
            Self::EntropicW { tau, .. } if !(tau > 0.0) || !tau.is_finite() => {
                invalid(format!("tau must be positive, got {tau}"))
            }
            Self::Sliced { projections: 0, .. } => invalid("need at least one projection"),
            _ => Ok(()),
        }
    }
}

pub(crate) fn pow_p(d: f64, p: f64) -> f64 {
    if p == 2.0 {
        d * d
    } else if p == 1.0 {
        d
    } else {
        d.powf(p)
    }
}

pub(crate) fn root_p(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x.sqrt()
    } else if p == 1.0 {
        x
    } else {
        x.powf(1.0 / p)
    }
}

/// Matrix of `‖x_i − y_j‖^p` between the supports of `a` and `b`.
pub fn pairwise_cost(a: &DiscreteMeasure, b: &DiscreteMeasure, p: f64) -> Result<CostMatrix> {
    if a.dim() != b.dim() {
        return invalid(format!("dimensions differ: {} vs {}", a.dim(), b.dim()));
    }
    let xs = a.support().points();
    let ys = b.support().points();
    let mut c = Array2::zeros((xs.nrows(), ys.nrows()));
    for ((i, j), out) in c.indexed_iter_mut() {
        let sq: f64 = xs
            .row(i)
            .iter()
            .zip(ys.row(j).iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        *out = if p == 2.0 { sq } else { pow_p(sq.sqrt(), p) };
    }
    CostMatrix::new(c)
}

/// Exact OT between two uniform measures of equal size `a`.
///
/// The optimum is `(1/a)` times a permutation matrix, found by the assignment
/// solver. The reported objective is `(1/a) Σ_i C[i, σ(i)]`.
pub fn exact_ot_uniform(cost: &CostMatrix) -> Result<(TransportPlan, SolverReport)> {
    if !cost.is_square() {
        return invalid(format!(
            "exact uniform OT needs a square cost matrix, got {}x{}",
            cost.rows(),
            cost.cols()
        ));
    }
    if cost.rows() == 0 {
        return invalid("empty cost matrix");
    }
    let perm = assignment::solve(cost.values());
    let objective = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| cost.get(i, j))
        .sum::<f64>()
        / perm.len() as f64;
    let plan = TransportPlan::scaled_permutation(&perm)?;
    Ok((
        plan,
        SolverReport {
            objective,
            regularized_objective: None,
            iterations: perm.len(),
            converged: true,
            marginal_residual: 0.0,
        },
    ))
}

/// Evaluates `metric` between two measures. Returns the distance (with the
/// `1/p` root applied) and, for plan-producing metrics, the optimal plan.
pub fn inner_distance<R: Rng + ?Sized>(
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    metric: &InnerMetric,
    rng: &mut R,
) -> Result<(f64, Option<TransportPlan>)> {
    metric.validate()?;
    match *metric {
        InnerMetric::ExactW { p } => {
            if a.len() != b.len() || !a.is_uniform() || !b.is_uniform() {
                return invalid("exact inner OT needs uniform measures of equal size");
            }
            let (plan, report) = exact_ot_uniform(&pairwise_cost(a, b, p)?)?;
            Ok((root_p(report.objective, p), Some(plan)))
        }
        InnerMetric::EntropicW { p, tau } => {
            let cost = pairwise_cost(a, b, p)?;
            let (plan, report) = sinkhorn(
                &cost,
                a.weights(),
                b.weights(),
                tau,
                DEFAULT_TOL,
                DEFAULT_MAX_ITER,
            )?;
            Ok((root_p(report.objective, p), Some(plan)))
        }
        InnerMetric::Sliced { p, projections } => {
            Ok((sliced_wasserstein(a, b, p, projections, rng)?, None))
        }
    }
}
