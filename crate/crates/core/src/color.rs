//! Palette-level color transfer.
//!
//! Both images are compressed with K-means. The source palette is then moved
//! towards the target palette by repeated mini-batch barycentric mapping, and
//! every source pixel takes the new color of its cluster.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::measures::PointCloud;
use crate::rng::{derive_seed, TAG_ITER};
use crate::schemes::{batch_cost_matrix, outer_loss, sample_batches, OuterScheme, SchemeConfig};
use crate::solvers::InnerMetric;

/// RGB image with channel values in `[0, 1]`, pixels in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Array2<f64>,
}

impl Image {
    /// `pixels` is `(width·height)×3`.
    pub fn new(width: usize, height: usize, pixels: Array2<f64>) -> Result<Self> {
        if pixels.dim() != (width * height, 3) {
            return invalid(format!(
                "pixel array is {:?}, expected ({}, 3)",
                pixels.dim(),
                width * height
            ));
        }
        if pixels.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return invalid("pixel values must lie in [0, 1]");
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> ArrayView2<'_, f64> {
        self.pixels.view()
    }
}

/// Cluster centers and the nearest-center index of every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub centers: Array2<f64>,
    pub assignments: Vec<usize>,
}

impl Palette {
    pub fn len(&self) -> usize {
        self.centers.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.nrows() == 0
    }
}

fn sq_dist(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: ndarray::ArrayView1<'_, f64>, centers: &Array2<f64>) -> (usize, f64) {
    centers
        .axis_iter(Axis(0))
        .enumerate()
        .map(|(c, center)| (c, sq_dist(point, center)))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

fn assign(points: ArrayView2<'_, f64>, centers: &Array2<f64>) -> (Vec<usize>, f64) {
    let pairs: Vec<(usize, f64)> = (0..points.nrows())
        .into_par_iter()
        .map(|i| nearest(points.row(i), centers))
        .collect();
    let objective = pairs.iter().map(|p| p.1).sum();
    (pairs.into_iter().map(|p| p.0).collect(), objective)
}

/// k-means++ seeding: first center uniform, then proportional to squared distance.
fn seed_centers<R: Rng + ?Sized>(
    points: ArrayView2<'_, f64>,
    k: usize,
    rng: &mut R,
) -> Array2<f64> {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            // Rounding can run past the end; fall back to the last positive weight.
            if d2[pick] == 0.0 {
                pick = d2.iter().rposition(|&w| w > 0.0).unwrap_or(pick);
            }
            pick
        } else {
            // Every remaining point duplicates a center.
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), points.row(next)));
        }
    }
    points.select(Axis(0), &chosen)
}

/// Lloyd's algorithm from k-means++ seeds. Also returns the objective
/// `Σ ‖x − c(x)‖²` after seeding and after each iteration.
pub fn kmeans_with_history<R: Rng + ?Sized>(
    points: ArrayView2<'_, f64>,
    k: usize,
    iters: usize,
    rng: &mut R,
) -> Result<(Palette, Vec<f64>)> {
    let n = points.nrows();
    if k == 0 || k > n {
        return invalid(format!("need 1 <= K <= {n} clusters, got {k}"));
    }
    if iters == 0 {
        return invalid("need at least one Lloyd iteration");
    }
    let mut centers = seed_centers(points, k, rng);
    let (mut assignments, objective) = assign(points, &centers);
    let mut history = vec![objective];
    for _ in 0..iters {
        let mut sums = Array2::<f64>::zeros(centers.raw_dim());
        let mut counts = vec![0usize; k];
        for (i, &c) in assignments.iter().enumerate() {
            let mut row = sums.row_mut(c);
            row += &points.row(i);
            counts[c] += 1;
        }
        for (c, &count) in counts.iter().enumerate() {
            // Empty clusters keep their previous center.
            if count > 0 {
                let mean = &sums.row(c) / count as f64;
                centers.row_mut(c).assign(&mean);
            }
        }
        let (next, next_objective) = assign(points, &centers);
        history.push(next_objective);
        let stable = next == assignments;
        assignments = next;
        if stable {
            break;
        }
    }
    Ok((
        Palette {
            centers,
            assignments,
        },
        history,
    ))
}

/// K-means palette of `points` (one row per pixel).
pub fn kmeans<R: Rng + ?Sized>(
    points: ArrayView2<'_, f64>,
    k: usize,
    iters: usize,
    rng: &mut R,
) -> Result<Palette> {
    kmeans_with_history(points, k, iters, rng).map(|(p, _)| p)
}

/// Settings for [`transfer_palette`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferConfig {
    pub k: usize,
    pub m: usize,
    /// Number of sampling rounds.
    pub iterations: usize,
    pub inner: InnerMetric,
    pub outer: OuterScheme,
    pub seed: u64,
    /// Reuse the source batches as target batches (both palettes must have the same size).
    pub shared_batches: bool,
}

/// Moves source centers towards the target palette by mini-batch barycentric mapping.
///
/// Each round samples `k` batches of `m` centers on both sides, solves the
/// inner plans `π_ij` and the outer coupling `γ`, and sets the centers of
/// source batch `i` to `Σ_j k·m·γ_ij · (π_ij · T_j)`, where `T_j` holds the
/// target centers of batch `j`. When `Σ_j γ_ij = 1/k` the weights of each
/// source center sum to one. Centers not drawn in a round keep their value;
/// a center drawn in several source batches takes the value from the last one.
pub fn transfer_palette(
    source: ArrayView2<'_, f64>,
    target: ArrayView2<'_, f64>,
    cfg: &TransferConfig,
) -> Result<Array2<f64>> {
    if !cfg.inner.produces_plan() {
        return Err(crate::Error::Config(
            "color transfer needs a plan-producing inner metric (not sliced)".into(),
        ));
    }
    if cfg.shared_batches && source.nrows() != target.nrows() {
        return invalid("shared batches need palettes of equal size");
    }
    let src = PointCloud::new(source.to_owned())?;
    let tgt = PointCloud::new(target.to_owned())?;
    if cfg.m > src.len().min(tgt.len()) {
        return invalid(format!("batch size {} exceeds palette sizes", cfg.m));
    }
    let mut mapped = source.to_owned();
    let weight = (cfg.k * cfg.m) as f64;
    for round in 0..cfg.iterations {
        let scheme = SchemeConfig::new(
            cfg.k,
            cfg.m,
            cfg.inner,
            cfg.outer,
            derive_seed(cfg.seed, &[TAG_ITER, round as u64]),
        );
        scheme.validate()?;
        let (bx, mut by) = sample_batches(src.len(), tgt.len(), &scheme)?;
        if cfg.shared_batches {
            by = bx.clone();
        }
        let costs = batch_cost_matrix(&src, &tgt, &bx, &by, &cfg.inner, scheme.seed, true)?;
        let (_, gamma) = outer_loss(&costs.cost, &cfg.outer)?;
        let mut updates: Vec<Option<Array2<f64>>> = vec![None; cfg.k];
        for &(i, j, g) in gamma.entries() {
            let plan = costs.plans[i * cfg.k + j]
                .as_ref()
                .ok_or_else(|| crate::Error::Internal(format!("missing inner plan ({i}, {j})")))?;
            let acc =
                updates[i].get_or_insert_with(|| Array2::zeros((bx[i].len(), source.ncols())));
            let targets = by[j].indices();
            for &(a, b, p) in plan.entries() {
                acc.row_mut(a)
                    .scaled_add(weight * g * p, &tgt.point(targets[b]));
            }
        }
        for (i, update) in updates.into_iter().enumerate() {
            if let Some(values) = update {
                for (a, &center) in bx[i].indices().iter().enumerate() {
                    mapped.row_mut(center).assign(&values.row(a));
                }
            }
        }
    }
    Ok(mapped)
}

/// Replaces each pixel by the new center of its cluster, clamped to `[0, 1]`.
pub fn apply_palette(
    image: &Image,
    palette: &Palette,
    new_centers: ArrayView2<'_, f64>,
) -> Result<Image> {
    if palette.assignments.len() != image.pixels.nrows() {
        return invalid("palette assignments do not match the image size");
    }
    if new_centers.dim() != (palette.len(), 3) {
        return invalid(format!("expected {}x3 new centers", palette.len()));
    }
    if palette.assignments.iter().any(|&c| c >= palette.len()) {
        return invalid("palette assignment out of range");
    }
    let mut pixels = Array2::zeros(image.pixels.raw_dim());
    for (mut px, &c) in pixels.axis_iter_mut(Axis(0)).zip(&palette.assignments) {
        px.assign(&new_centers.row(c).mapv(|v: f64| v.clamp(0.0, 1.0)));
    }
    Image::new(image.width, image.height, pixels)
}

/// Per-channel mean of an image; handy for quick summaries.
pub fn mean_color(image: &Image) -> Array1<f64> {
    image
        .pixels
        .mean_axis(Axis(0))
        .unwrap_or_else(|| Array1::zeros(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use ndarray::array;

    const W2: InnerMetric = InnerMetric::ExactW { p: 2.0 };

    #[test]
    fn kmeans_with_k_equal_n_recovers_points() {
        let pts = array![
            [0.1, 0.2, 0.3],
            [0.9, 0.1, 0.4],
            [0.5, 0.5, 0.5],
            [0.0, 1.0, 0.0]
        ];
        let (pal, hist) = kmeans_with_history(pts.view(), 4, 10, &mut substream(1, &[])).unwrap();
        assert_eq!(*hist.last().unwrap(), 0.0);
        let mut got: Vec<Vec<f64>> = pal.centers.rows().into_iter().map(|r| r.to_vec()).collect();
        let mut want: Vec<Vec<f64>> = pts.rows().into_iter().map(|r| r.to_vec()).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn kmeans_on_identical_pixels_collapses() {
        let pts = Array2::from_elem((6, 3), 0.25);
        let pal = kmeans(pts.view(), 3, 5, &mut substream(2, &[])).unwrap();
        assert!(pal.centers.iter().all(|&v| v == 0.25));
        assert!(pal.assignments.iter().all(|&c| c < 3));
    }

    #[test]
    fn kmeans_one_dimensional_toy() {
        let pts = array![[0.0], [0.1], [0.9], [1.0]];
        for seed in 0..10 {
            let pal = kmeans(pts.view(), 2, 20, &mut substream(seed, &[])).unwrap();
            let mut c: Vec<f64> = pal.centers.column(0).to_vec();
            c.sort_by(f64::total_cmp);
            assert!(
                (c[0] - 0.05).abs() < 1e-12 && (c[1] - 0.95).abs() < 1e-12,
                "seed {seed}: {c:?}"
            );
        }
    }

    #[test]
    fn kmeans_objective_never_increases() {
        let mut rng = substream(4, &[]);
        let pts = Array2::from_shape_fn((300, 3), |_| rng.random::<f64>());
        let (_, hist) = kmeans_with_history(pts.view(), 12, 50, &mut substream(5, &[])).unwrap();
        assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{hist:?}");
    }

    #[test]
    fn kmeans_rejects_too_many_clusters() {
        let pts = array![[0.0], [1.0]];
        assert!(kmeans(pts.view(), 3, 1, &mut substream(0, &[])).is_err());
    }

    #[test]
    fn monotone_matching_in_one_dimension() {
        let src = array![[0.0], [1.0]];
        let tgt = array![[11.0], [10.0]];
        let cfg = TransferConfig {
            k: 1,
            m: 2,
            iterations: 1,
            inner: W2,
            outer: OuterScheme::Exact,
            seed: 3,
            shared_batches: false,
        };
        let out = transfer_palette(src.view(), tgt.view(), &cfg).unwrap();
        assert_eq!(out, array![[10.0], [11.0]]);
    }

    #[test]
    fn identical_palettes_with_shared_batches_are_fixed_points() {
        let mut rng = substream(8, &[]);
        let pal = Array2::from_shape_fn((12, 3), |_| rng.random::<f64>());
        let cfg = TransferConfig {
            k: 3,
            m: 4,
            iterations: 5,
            inner: W2,
            outer: OuterScheme::Exact,
            seed: 1,
            shared_batches: true,
        };
        let out = transfer_palette(pal.view(), pal.view(), &cfg).unwrap();
        for (a, b) in out.iter().zip(pal.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_palette_gathers_and_clamps() {
        let img = Image::new(
            2,
            2,
            array![
                [0.0, 0.0, 0.0],
                [1.0, 1.0, 1.0],
                [0.2, 0.2, 0.2],
                [0.9, 0.9, 0.9]
            ],
        )
        .unwrap();
        let palette = Palette {
            centers: array![[0.1, 0.1, 0.1], [0.95, 0.95, 0.95]],
            assignments: vec![0, 1, 0, 1],
        };
        let same = apply_palette(&img, &palette, palette.centers.view()).unwrap();
        assert_eq!(same.pixels().row(2), array![0.1, 0.1, 0.1]);

        let wild = array![[-0.5, 0.5, 2.0], [0.3, 0.4, 0.5]];
        let out = apply_palette(&img, &palette, wild.view()).unwrap();
        assert_eq!(out.pixels().row(0), array![0.0, 0.5, 1.0]);
        assert_eq!(out.pixels().row(3), array![0.3, 0.4, 0.5]);

        let single = Palette {
            centers: array![[0.4, 0.5, 0.6]],
            assignments: vec![0; 4],
        };
        let flat = apply_palette(&img, &single, single.centers.view()).unwrap();
        assert!(flat
            .pixels()
            .rows()
            .into_iter()
            .all(|r| r == array![0.4, 0.5, 0.6]));
    }

    #[test]
    fn image_rejects_out_of_range_values() {
        assert!(Image::new(1, 1, array![[0.0, 1.5, 0.0]]).is_err());
        assert!(Image::new(2, 1, array![[0.0, 0.5, 0.0]]).is_err());
    }
}
