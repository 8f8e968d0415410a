//! Closed-form one-dimensional Wasserstein distance and its sliced extension.

use ndarray::Array1;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{pow_p, root_p};
use crate::error::{invalid, Result};
use crate::measures::DiscreteMeasure;

/// `((1/m) Σ_i |x_(i) − y_(i)|^p)^{1/p}` for two sorted samples of equal size.
pub fn wasserstein_1d(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    if x.len() != y.len() {
        return invalid(format!("samples have lengths {} and {}", x.len(), y.len()));
    }
    if x.is_empty() {
        return invalid("samples are empty");
    }
    if !x.is_sorted() || !y.is_sorted() {
        return invalid("samples must be sorted in ascending order");
    }
    Ok(root_p(mean_power_gap(x, y, p), p))
}

fn mean_power_gap(x: &[f64], y: &[f64], p: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| pow_p((a - b).abs(), p))
        .sum::<f64>()
        / x.len() as f64
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Sliced Wasserstein distance between two uniform measures of equal size,
/// averaged over `projections` directions drawn uniformly from the unit sphere.
///
/// In one dimension every direction is `±1` and each slice equals the plain
/// one-dimensional distance, so that value is returned directly.
pub fn sliced_wasserstein<R: Rng + ?Sized>(
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    p: f64,
    projections: usize,
    rng: &mut R,
) -> Result<f64> {
    if a.len() != b.len() {
        return invalid(format!(
            "sliced distance needs equal support sizes, got {} and {}",
            a.len(),
            b.len()
        ));
    }
    if a.dim() != b.dim() {
        return invalid(format!("dimensions differ: {} vs {}", a.dim(), b.dim()));
    }
    if !a.is_uniform() || !b.is_uniform() {
        return invalid("sliced distance is implemented for uniform measures only");
    }
    if projections == 0 {
        return invalid("need at least one projection");
    }
    let xs = a.support().points();
    let ys = b.support().points();
    if a.dim() == 1 {
        let x = sorted(xs.column(0).to_vec());
        let y = sorted(ys.column(0).to_vec());
        return wasserstein_1d(&x, &y, p);
    }

    let mut total = 0.0;
    for _ in 0..projections {
        let theta = random_direction(a.dim(), rng);
        let x = sorted(xs.dot(&theta).to_vec());
        let y = sorted(ys.dot(&theta).to_vec());
        total += mean_power_gap(&x, &y, p);
    }
    Ok(root_p(total / projections as f64, p))
}

/// A normalized standard Gaussian vector.
pub(crate) fn random_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Array1<f64> {
    loop {
        let g: Array1<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.dot(&g).sqrt();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}
