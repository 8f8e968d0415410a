//! Entropic optimal transport by Sinkhorn scaling, carried out entirely in the
//! log domain.

use ndarray::{Array1, Array2, ArrayView1};

use super::SolverReport;
use crate::error::{invalid, Result};
use crate::measures::{CostMatrix, TransportPlan, SIMPLEX_TOL};

/// Default stopping tolerance on the L1 row-marginal residual.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Stable `log Σ exp(x)`; returns `-∞` when every term is `-∞`.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn check_weights(w: ArrayView1<'_, f64>, len: usize, side: &str) -> Result<()> {
    if w.len() != len {
        return invalid(format!(
            "{side} weights have length {}, expected {len}",
            w.len()
        ));
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) || (w.sum() - 1.0).abs() > SIMPLEX_TOL {
        return invalid(format!("{side} weights are not on the probability simplex"));
    }
    Ok(())
}

/// Iterations spent per intermediate stage of the ε-scaling schedule.
const STAGE_ITER: usize = 200;
/// Ratio between consecutive regularization levels of the schedule.
const STAGE_RATIO: f64 = 4.0;

/// Solves `min ⟨π, C⟩ + τ·KL(π | a⊗b)` over couplings of `a` and `b`.
///
/// Small `τ` is reached through a decreasing schedule of regularization
/// levels, warm-starting the dual potentials at each level. The final
/// scaling iterate is rounded onto the coupling polytope, so the returned
/// plan always has the requested marginals up to rounding error.
/// `marginal_residual` is the L1 row residual of the last iterate before
/// rounding; `converged = false` means it stayed above `tol` when `max_iter`
/// ran out.
///
/// `objective` is the transport cost `⟨π, C⟩`; the regularized value is in
/// `regularized_objective`.
pub fn sinkhorn(
    cost: &CostMatrix,
    a: ArrayView1<'_, f64>,
    b: ArrayView1<'_, f64>,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(TransportPlan, SolverReport)> {
    if !(tau > 0.0) || !tau.is_finite() {
        return invalid(format!(
            "entropic regularization must be positive and finite, got {tau}"
        ));
    }
    let (rows, cols) = (cost.rows(), cost.cols());
    check_weights(a, rows, "row")?;
    check_weights(b, cols, "column")?;

    let log_a: Array1<f64> = a.mapv(f64::ln);
    let log_b: Array1<f64> = b.mapv(f64::ln);
    // Dual potentials f = τ·log u, g = τ·log v carry over between levels.
    let mut f = Array1::<f64>::zeros(rows);
    let mut g = Array1::<f64>::zeros(cols);

    let scale = cost.values().fold(0.0f64, |m, &c| m.max(c));
    let mut levels = Vec::new();
    let mut level = tau;
    while level * STAGE_RATIO < scale {
        level *= STAGE_RATIO;
        levels.push(level);
    }
    levels.reverse();

    let mut iterations = 0;
    for &eps in &levels {
        let budget = STAGE_ITER.min(max_iter.saturating_sub(iterations + 1));
        let (used, _) = scale_iterations(cost, &log_a, &log_b, eps, &mut f, &mut g, tol, budget);
        iterations += used;
    }
    let budget = max_iter.saturating_sub(iterations).max(1);
    let (used, residual) = scale_iterations(cost, &log_a, &log_b, tau, &mut f, &mut g, tol, budget);
    iterations += used;

    let mut dense = Array2::<f64>::zeros((rows, cols));
    for ((i, j), p) in dense.indexed_iter_mut() {
        *p = ((f[i] + g[j] - cost.get(i, j)) / tau).exp();
    }
    round_to_marginals(&mut dense, a, b);

    let mut transport = 0.0;
    let mut kl = 0.0;
    for ((i, j), &p) in dense.indexed_iter() {
        if p > 0.0 {
            transport += p * cost.get(i, j);
            kl += p * (p.ln() - log_a[i] - log_b[j]);
        }
    }

    let plan = TransportPlan::from_dense(dense.view(), a.to_vec(), b.to_vec())?;
    let report = SolverReport {
        objective: transport,
        regularized_objective: Some(transport + tau * kl),
        iterations,
        converged: residual <= tol,
        marginal_residual: residual,
    };
    Ok((plan, report))
}

/// Alternating log-domain updates at a fixed level. Returns the iteration
/// count and the final L1 row residual.
#[allow(clippy::too_many_arguments)]
fn scale_iterations(
    cost: &CostMatrix,
    log_a: &Array1<f64>,
    log_b: &Array1<f64>,
    eps: f64,
    f: &mut Array1<f64>,
    g: &mut Array1<f64>,
    tol: f64,
    max_iter: usize,
) -> (usize, f64) {
    let (rows, cols) = (cost.rows(), cost.cols());
    let c = cost.values();
    let row_lse = |g: &Array1<f64>, i: usize| -> f64 {
        log_sum_exp((0..cols).map(|j| (g[j] - c[[i, j]]) / eps))
    };
    let col_lse = |f: &Array1<f64>, j: usize| -> f64 {
        log_sum_exp((0..rows).map(|i| (f[i] - c[[i, j]]) / eps))
    };

    for i in 0..rows {
        f[i] = eps * (log_a[i] - row_lse(g, i));
    }
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut row_lses = vec![0.0; rows];
    while iterations < max_iter {
        iterations += 1;
        for j in 0..cols {
            g[j] = eps * (log_b[j] - col_lse(f, j));
        }
        for (i, s) in row_lses.iter_mut().enumerate() {
            *s = row_lse(g, i);
        }
        residual = row_lses
            .iter()
            .zip(f.iter())
            .zip(log_a.iter())
            .map(|((s, fi), la)| ((fi / eps + s).exp() - la.exp()).abs())
            .sum();
        if residual <= tol {
            break;
        }
        for i in 0..rows {
            f[i] = eps * (log_a[i] - row_lses[i]);
        }
    }
    (iterations, residual)
}

/// Projects a nonnegative matrix onto the couplings of `a` and `b`: scale
/// down overfull rows, then overfull columns, then spread the missing mass
/// as a rank-one correction.
fn round_to_marginals(p: &mut Array2<f64>, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) {
    for (mut row, &ai) in p.rows_mut().into_iter().zip(a.iter()) {
        let s = row.sum();
        if s > ai {
            row *= ai / s;
        }
    }
    for (mut col, &bj) in p.columns_mut().into_iter().zip(b.iter()) {
        let s = col.sum();
        if s > bj {
            col *= bj / s;
        }
    }
    let err_r: Vec<f64> = p
        .rows()
        .into_iter()
        .zip(a.iter())
        .map(|(r, &ai)| (ai - r.sum()).max(0.0))
        .collect();
    let err_c: Vec<f64> = p
        .columns()
        .into_iter()
        .zip(b.iter())
        .map(|(c, &bj)| (bj - c.sum()).max(0.0))
        .collect();
    let total: f64 = err_r.iter().sum();
    if total > 0.0 {
        for ((i, j), v) in p.indexed_iter_mut() {
            *v += err_r[i] * err_c[j] / total;
        }
    }
}
