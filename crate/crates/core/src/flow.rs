//! Particle gradient flows driven by a mini-batch transport loss.
//!
//! Each Euler step samples fresh batches, solves the inner and outer problems,
//! and moves every particle along the gradient of the quadratic transport
//! objective with all couplings held at their optima:
//!
//! ```text
//! L(X) = Σ_ij γ_ij Σ_ab π^ij_ab ‖x_a − y_b‖²
//! g_a  = Σ_ij γ_ij Σ_b  π^ij_ab · 2(x_a − y_b)
//! ```
//!
//! The aggregated plan `π̂` already stores `Σ_ij γ_ij π^ij`, so the gradient
//! and the per-particle mass `w_a = Σ_b π̂_ab` are read directly from it.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::measures::{MiniBatchIndex, PointCloud, TransportPlan};
use crate::rng::{derive_seed, substream, TAG_EVAL, TAG_STEP};
use crate::schemes::{mb_distance, mb_distance_with_batches, MbResult, SchemeConfig};
use crate::solvers::{exact_ot_uniform, pairwise_cost, InnerMetric};

/// Step size used when none is given.
pub const DEFAULT_STEP_SIZE: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    /// Number of Euler steps.
    pub steps: usize,
    pub step_size: f64,
    /// Record the W2 score every this many steps (and after the last step).
    pub eval_every: usize,
    pub scheme: SchemeConfig,
    pub seed: u64,
    /// Divide each particle's gradient by its plan mass `w_a`.
    pub normalize_by_mass: bool,
    /// Keep a copy of the particles at every evaluation.
    pub keep_snapshots: bool,
}

impl FlowConfig {
    pub fn new(scheme: SchemeConfig, steps: usize, step_size: f64, seed: u64) -> Self {
        Self {
            steps,
            step_size,
            eval_every: steps.clamp(1, 10),
            scheme,
            seed,
            normalize_by_mass: true,
            keep_snapshots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return invalid(format!(
                "step size must be positive, got {}",
                self.step_size
            ));
        }
        if self.eval_every == 0 {
            return invalid("eval_every must be positive");
        }
        check_scheme(&self.scheme)
    }

    /// Scheme used for step `step`: same settings, fresh batches.
    pub fn step_scheme(&self, step: usize) -> SchemeConfig {
        self.scheme
            .with_seed(derive_seed(
                self.scheme.seed,
                &[TAG_STEP, self.seed, step as u64],
            ))
            .with_aggregation(true)
    }

    fn eval_scheme(&self, step: usize) -> SchemeConfig {
        self.scheme
            .with_seed(derive_seed(
                self.scheme.seed,
                &[TAG_EVAL, self.seed, step as u64],
            ))
            .with_aggregation(false)
    }
}

fn check_scheme(scheme: &SchemeConfig) -> Result<()> {
    match scheme.inner {
        InnerMetric::Sliced { .. } => Err(Error::Config(
            "gradient flow needs a plan-producing inner metric (not sliced)".into(),
        )),
        inner if inner.p() != 2.0 => {
            invalid(format!("gradient flow uses p = 2, got p = {}", inner.p()))
        }
        _ => scheme.validate(),
    }
}

/// Frozen-plan gradient at the current particles.
#[derive(Debug, Clone)]
pub struct FlowGradient {
    /// `n×N`; row `a` is `g_a`.
    pub gradient: Array2<f64>,
    /// Total plan mass `w_a` on each particle.
    pub mass: Array1<f64>,
    /// Scheme loss at the current particles (distances, roots applied).
    pub loss: f64,
    /// The aggregated plan the gradient was taken with.
    pub plan: TransportPlan,
}

/// Gradient of the frozen-plan objective for the batches drawn from `scheme.seed`.
pub fn flow_gradient(
    x: &PointCloud,
    y: &PointCloud,
    scheme: &SchemeConfig,
) -> Result<FlowGradient> {
    check_scheme(scheme)?;
    let res = mb_distance(x, y, &scheme.with_aggregation(true))?;
    gradient_from_result(x, y, res)
}

/// As [`flow_gradient`], with caller-supplied batches.
pub fn flow_gradient_with_batches(
    x: &PointCloud,
    y: &PointCloud,
    scheme: &SchemeConfig,
    batches_x: Vec<MiniBatchIndex>,
    batches_y: Vec<MiniBatchIndex>,
) -> Result<FlowGradient> {
    check_scheme(scheme)?;
    let res = mb_distance_with_batches(x, y, &scheme.with_aggregation(true), batches_x, batches_y)?;
    gradient_from_result(x, y, res)
}

fn gradient_from_result(x: &PointCloud, y: &PointCloud, res: MbResult) -> Result<FlowGradient> {
    let plan = res
        .aggregated_plan
        .ok_or_else(|| Error::Internal("aggregation was requested but no plan came back".into()))?;
    let (xs, ys) = (x.points(), y.points());
    let mut gradient = Array2::zeros(xs.raw_dim());
    let mut mass = Array1::zeros(xs.nrows());
    for &(a, b, p) in plan.entries() {
        let mut g = gradient.row_mut(a);
        g.scaled_add(2.0 * p, &xs.row(a));
        g.scaled_add(-2.0 * p, &ys.row(b));
        mass[a] += p;
    }
    Ok(FlowGradient {
        gradient,
        mass,
        loss: res.loss,
        plan,
    })
}

/// `Σ_ab π_ab ‖x_a − y_b‖²` for a fixed plan.
pub fn frozen_plan_objective(x: &PointCloud, y: &PointCloud, plan: &TransportPlan) -> f64 {
    plan.entries()
        .iter()
        .map(|&(a, b, p)| {
            let d = &x.point(a) - &y.point(b);
            p * d.dot(&d)
        })
        .sum()
}

/// Moves the particles along a precomputed gradient.
pub fn apply_gradient(
    x: &PointCloud,
    grad: &FlowGradient,
    step_size: f64,
    normalize_by_mass: bool,
) -> Result<PointCloud> {
    let mut pts = x.points().to_owned();
    for (a, mut row) in pts.axis_iter_mut(Axis(0)).enumerate() {
        let w = grad.mass[a];
        if w <= 0.0 {
            continue;
        }
        let scale = if normalize_by_mass {
            step_size / w
        } else {
            step_size
        };
        row.scaled_add(-scale, &grad.gradient.row(a));
    }
    PointCloud::new(pts)
}

/// One Euler step `x_a ← x_a − η·g_a / w_a` with fresh batches for `step`.
///
/// Particles that received no plan mass stay where they are.
pub fn flow_step(
    x: &PointCloud,
    y: &PointCloud,
    cfg: &FlowConfig,
    step: usize,
) -> Result<PointCloud> {
    cfg.validate()?;
    let grad = flow_gradient(x, y, &cfg.step_scheme(step))?;
    apply_gradient(x, &grad, cfg.step_size, cfg.normalize_by_mass)
}

/// Exact `W2` between two clouds of equal size, by assignment.
pub fn exact_w2(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    if x.len() != y.len() {
        return invalid(format!(
            "exact W2 score needs equal sizes, got {} and {}",
            x.len(),
            y.len()
        ));
    }
    let cost = pairwise_cost(
        &crate::measures::empirical_measure(x),
        &crate::measures::empirical_measure(y),
        2.0,
    )?;
    Ok(exact_ot_uniform(&cost)?.1.objective.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRecord {
    pub step: usize,
    pub w2: f64,
    pub loss: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub records: Vec<FlowRecord>,
    pub final_positions: PointCloud,
    /// `(step, particles)` at each evaluation, when requested.
    pub snapshots: Vec<(usize, PointCloud)>,
}

/// Runs `cfg.steps` Euler steps from `x0` towards `y`.
///
/// The exact W2 score and the scheme loss are recorded at step 0, every
/// `eval_every` steps, and after the final step.
pub fn run_flow(x0: &PointCloud, y: &PointCloud, cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    let mut x = x0.clone();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut record = |step: usize, x: &PointCloud| -> Result<()> {
        let loss = mb_distance(x, y, &cfg.eval_scheme(step))?.loss;
        records.push(FlowRecord {
            step,
            w2: exact_w2(x, y)?,
            loss,
        });
        if cfg.keep_snapshots {
            snapshots.push((step, x.clone()));
        }
        Ok(())
    };
    record(0, &x)?;
    for step in 0..cfg.steps {
        x = flow_step(&x, y, cfg, step)?;
        let done = step + 1;
        if done % cfg.eval_every == 0 || done == cfg.steps {
            record(done, &x)?;
        }
    }
    Ok(FlowTrace {
        records,
        final_positions: x,
        snapshots,
    })
}

/// Synthetic 2D clouds for demonstrations and tests.
pub mod toy {
    use super::*;

    fn cloud(rows: Vec<[f64; 2]>) -> PointCloud {
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        PointCloud::new(Array2::from_shape_vec((flat.len() / 2, 2), flat).expect("shape"))
            .expect("finite toy data")
    }

    /// Two Gaussian blobs (std 0.3) centred at `(−2, −1)` and `(2, 1)`.
    pub fn two_clusters(n: usize, seed: u64) -> PointCloud {
        let mut rng = substream(seed, &[0x2c]);
        cloud(
            (0..n)
                .map(|i| {
                    let (cx, cy) = if i % 2 == 0 { (-2.0, -1.0) } else { (2.0, 1.0) };
                    let dx: f64 = rng.sample(StandardNormal);
                    let dy: f64 = rng.sample(StandardNormal);
                    [cx + 0.3 * dx, cy + 0.3 * dy]
                })
                .collect(),
        )
    }

    /// Noisy "S" curve: `(sin t, sign(t)(cos t − 1))` for `t` uniform on `[−3π/2, 3π/2]`.
    pub fn s_shape(n: usize, seed: u64) -> PointCloud {
        let mut rng = substream(seed, &[0x5]);
        cloud(
            (0..n)
                .map(|_| {
                    let t = 3.0 * std::f64::consts::PI * (rng.random::<f64>() - 0.5);
                    let dx: f64 = rng.sample(StandardNormal);
                    let dy: f64 = rng.sample(StandardNormal);
                    [
                        t.sin() + 0.05 * dx,
                        t.signum() * (t.cos() - 1.0) + 0.05 * dy,
                    ]
                })
                .collect(),
        )
    }
}
