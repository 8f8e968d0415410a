//! End-to-end acceptance checks. Runs without the libtest harness so that the
//! per-criterion report is always printed; exits non-zero if any check fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use minibatch_ot::abc::{
    percentile, pilot_distances, posterior_w2, rejection_abc, sample_inverse_gamma, simulate,
    true_posterior_params, AbcConfig,
};
use minibatch_ot::color::{transfer_palette, TransferConfig};
use minibatch_ot::flow::{flow_gradient, frozen_plan_objective, run_flow, toy, FlowConfig};
use minibatch_ot::rng::substream;
use minibatch_ot::schemes::{bomb_loss, ebomb_loss, mot_loss};
use minibatch_ot::solvers::{
    assignment, exact_ot_uniform, pairwise_cost, sliced_wasserstein, wasserstein_1d, InnerMetric,
};
use minibatch_ot::{
    empirical_measure, mb_distance, CostMatrix, OuterScheme, PointCloud, SchemeConfig,
};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

const W2: InnerMetric = InnerMetric::ExactW { p: 2.0 };

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn random_cost(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>())
}

fn exact_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in 2..=5 {
        let perms = permutations(a);
        let mut rng = substream(1, &[a as u64]);
        for _ in 0..100 {
            let c = random_cost(a, a, &mut rng);
            let brute = perms
                .iter()
                .map(|p| p.iter().enumerate().map(|(i, &j)| c[[i, j]]).sum::<f64>() / a as f64)
                .fold(f64::INFINITY, f64::min);
            let (_, report) = exact_ot_uniform(&CostMatrix::new(c).unwrap()).unwrap();
            worst = worst.max((report.objective - brute).abs());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |solver - brute force| = {worst:.1e} over 400 matrices"),
    )
}

fn lambda_interpolation() -> Outcome {
    let lambdas = [1e-3, 0.1, 1.0, 10.0, 1e3];
    let mut rng = substream(2, &[]);
    let (mut ordered, mut near_avg, mut near_exact) = (true, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let c = CostMatrix::new(random_cost(8, 8, &mut rng)).unwrap();
        let bomb = bomb_loss(&c).unwrap().0;
        let mot = mot_loss(&c).unwrap().0;
        let values: Vec<f64> = lambdas
            .iter()
            .map(|&l| ebomb_loss(&c, l).unwrap().0)
            .collect();
        ordered &= values.iter().all(|&e| bomb - 1e-9 <= e && e <= mot + 1e-9);
        ordered &= values.windows(2).all(|w| w[0] <= w[1] + 1e-9);
        near_avg = near_avg.max((mot - values[4]).abs() / mot);
        near_exact = near_exact.max((values[0] - bomb).abs());
    }
    outcome(
        ordered && near_avg <= 1e-3 && near_exact <= 1e-3,
        format!(
            "bounds and monotonicity {}; max rel gap at 1e3 = {near_avg:.1e}; max gap at 1e-3 = {near_exact:.1e}",
            if ordered { "hold" } else { "VIOLATED" }
        ),
    )
}

fn random_cloud(n: usize, dim: usize, rng: &mut impl Rng) -> PointCloud {
    PointCloud::new(Array2::from_shape_fn((n, dim), |_| normal(rng))).unwrap()
}

fn plan_sparsity() -> Outcome {
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for seed in 0..50 {
        let mut rng = substream(3, &[seed]);
        let x = random_cloud(10, 2, &mut rng);
        let y = random_cloud(10, 2, &mut rng);
        for (k, m) in [(2, 8), (8, 2), (20, 2)] {
            for (outer, bound) in [
                (OuterScheme::Exact, k * m),
                (OuterScheme::Average, k * k * m),
            ] {
                let cfg = SchemeConfig::new(k, m, W2, outer, seed).with_aggregation(true);
                let nnz = mb_distance(&x, &y, &cfg)
                    .unwrap()
                    .aggregated_plan
                    .unwrap()
                    .nnz();
                violations += usize::from(nnz > bound);
                max_ratio = max_ratio.max(nnz as f64 / bound as f64);
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in 300 plans; max nnz/bound = {max_ratio:.2}"),
    )
}

/// Number of rows whose heaviest entry is off the support of `full`.
fn wrong_matchings(plan: &Array2<f64>, full: &Array2<f64>) -> usize {
    plan.rows()
        .into_iter()
        .enumerate()
        .filter(|(i, row)| {
            let best = (0..row.len())
                .max_by(|&a, &b| row[a].total_cmp(&row[b]))
                .unwrap();
            full[[*i, best]] == 0.0
        })
        .count()
}

fn plan_comparison() -> Vec<(String, Outcome)> {
    let mut rng = substream(2021, &[]);
    let xs: Vec<Vec<f64>> = (0..10)
        .map(|_| vec![normal(&mut rng), normal(&mut rng)])
        .collect();
    // Covariance [[1, -0.8], [-0.8, 1]] via its Cholesky factor.
    let ys: Vec<Vec<f64>> = (0..10)
        .map(|_| {
            let (a, b) = (normal(&mut rng), normal(&mut rng));
            vec![4.0 + a, 4.0 - 0.8 * a + 0.6 * b]
        })
        .collect();
    let x = PointCloud::from_rows(&xs).unwrap();
    let y = PointCloud::from_rows(&ys).unwrap();
    let cost = pairwise_cost(&empirical_measure(&x), &empirical_measure(&y), 2.0).unwrap();
    let full = exact_ot_uniform(&cost).unwrap().0.to_dense();

    let (mut closer, mut fewer_wrong, mut wrong_b, mut wrong_m) = (0, 0, 0, 0);
    for seed in 0..10 {
        let plan = |outer| {
            let cfg = SchemeConfig::new(2, 8, W2, outer, seed).with_aggregation(true);
            mb_distance(&x, &y, &cfg)
                .unwrap()
                .aggregated_plan
                .unwrap()
                .to_dense()
        };
        let (bomb, mot) = (plan(OuterScheme::Exact), plan(OuterScheme::Average));
        let frob = |p: &Array2<f64>| (p - &full).mapv(|v| v * v).sum().sqrt();
        closer += usize::from(frob(&bomb) < frob(&mot));
        let (wb, wm) = (wrong_matchings(&bomb, &full), wrong_matchings(&mot, &full));
        fewer_wrong += usize::from(wb <= wm);
        wrong_b += wb;
        wrong_m += wm;
    }
    vec![
        (
            "4a  plan closer to full OT in Frobenius norm (reported, not asserted)".into(),
            outcome(
                closer >= 8,
                format!("BoMb closer in {closer}/10 seeds (criterion asks >= 8)"),
            ),
        ),
        (
            "4b  plan has no more wrong matchings than m-OT".into(),
            outcome(
                fewer_wrong >= 8 && wrong_b <= wrong_m,
                format!(
                    "BoMb <= m-OT in {fewer_wrong}/10 seeds; total wrong {wrong_b} vs {wrong_m}"
                ),
            ),
        ),
    ]
}

fn gradient_check() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut rng = substream(5, &[seed]);
        let x = random_cloud(16, 2, &mut rng);
        let y = random_cloud(16, 2, &mut rng);
        let grad = flow_gradient(
            &x,
            &y,
            &SchemeConfig::new(2, 4, W2, OuterScheme::Exact, seed),
        )
        .unwrap();
        let mut fd = Array2::<f64>::zeros((16, 2));
        for ((a, d), v) in fd.indexed_iter_mut() {
            let shifted = |delta: f64| {
                let mut pts = x.points().to_owned();
                pts[[a, d]] += delta;
                frozen_plan_objective(&PointCloud::new(pts).unwrap(), &y, &grad.plan)
            };
            *v = (shifted(h) - shifted(-h)) / (2.0 * h);
        }
        let err = (&fd - &grad.gradient)
            .mapv(f64::abs)
            .fold(0.0f64, |m, &v| m.max(v));
        let scale = grad.gradient.mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
        worst = worst.max(err / scale);
    }
    outcome(
        worst <= 1e-5,
        format!("max relative error (sup norm) = {worst:.1e}"),
    )
}

fn gradient_flow() -> Outcome {
    let x0 = toy::two_clusters(100, 11);
    let y = toy::s_shape(100, 12);
    let (mut wins, mut halved) = (0, 0);
    let (mut sum_b, mut sum_m) = (0.0, 0.0);
    for seed in 0..10 {
        let final_w2 = |outer| {
            let mut cfg =
                FlowConfig::new(SchemeConfig::new(4, 16, W2, outer, seed), 500, 0.05, seed);
            cfg.eval_every = 500;
            let trace = run_flow(&x0, &y, &cfg).unwrap();
            let (first, last) = (trace.records[0].w2, trace.records.last().unwrap().w2);
            (last, last < 0.5 * first)
        };
        let ((b, hb), (m, hm)) = (final_w2(OuterScheme::Exact), final_w2(OuterScheme::Average));
        wins += usize::from(b <= m);
        halved += usize::from(hb) + usize::from(hm);
        sum_b += b;
        sum_m += m;
    }
    outcome(
        wins >= 7 && halved == 20,
        format!(
            "BoMb <= m-OT in {wins}/10 seeds; {halved}/20 runs below half the initial W2; mean final {:.3} vs {:.3}",
            sum_b / 10.0,
            sum_m / 10.0
        ),
    )
}

struct AbcCase {
    obs: PointCloud,
    mu: Vec<f64>,
    shape: f64,
    scale: f64,
}

fn abc_case(rep: u64) -> AbcCase {
    let mut rng = substream(100 + rep, &[]);
    let mu: Vec<f64> = (0..2).map(|_| normal(&mut rng)).collect();
    let obs = simulate(4.0, &mu, 100, &mut rng).unwrap();
    let (shape, scale) = true_posterior_params(obs.points(), &mu, 1.0, 1.0).unwrap();
    AbcCase {
        obs,
        mu,
        shape,
        scale,
    }
}

fn abc_run(case: &AbcCase, scheme: SchemeConfig, seed: u64) -> minibatch_ot::abc::PosteriorSample {
    let mut cfg = AbcConfig {
        prior_shape: 1.0,
        prior_scale: 1.0,
        mu_star: case.mu.clone(),
        n_obs: 100,
        scheme,
        epsilon: f64::INFINITY,
        n_posterior: 100,
        max_proposals: 100_000,
        seed,
    };
    let pilot = pilot_distances(&case.obs, &cfg, 500).unwrap();
    cfg.epsilon = percentile(&pilot, 5.0).unwrap();
    rejection_abc(&case.obs, &cfg).unwrap()
}

fn abc_closed_form() -> Outcome {
    let case = abc_case(0);
    let mut sq = 0.0;
    for row in case.obs.points().rows() {
        sq += (row[0] - case.mu[0]).powi(2) + (row[1] - case.mu[1]).powi(2);
    }
    let closed_ok = case.shape == 101.0 && (case.scale - (1.0 + 0.5 * sq)).abs() <= 1e-9;

    let truth_mean = case.scale / (case.shape - 1.0);
    let full = abc_run(
        &case,
        SchemeConfig::new(1, 100, W2, OuterScheme::Exact, 0),
        0,
    );
    let rel = (full.mean() - truth_mean).abs() / truth_mean;

    let mut wins = 0;
    for rep in 0..10 {
        let case = abc_case(rep);
        let mut rng = substream(100 + rep, &[1]);
        let exact: Vec<f64> = (0..100)
            .map(|_| sample_inverse_gamma(case.shape, case.scale, &mut rng))
            .collect();
        let w = |outer| {
            let post = abc_run(&case, SchemeConfig::new(2, 8, W2, outer, rep), rep);
            posterior_w2(&post.values(), &exact).unwrap()
        };
        wins += usize::from(w(OuterScheme::Exact) <= w(OuterScheme::Average));
    }
    outcome(
        closed_ok && rel <= 0.25 && wins >= 7,
        format!(
            "shape {} and scale check {}; full-batch posterior mean {:.3} vs {truth_mean:.3} ({:.0}% off); \
             BoMb posterior_w2 <= m-OT in {wins}/10 at (k,m)=(2,8)",
            case.shape,
            if closed_ok { "ok" } else { "FAILED" },
            full.mean(),
            100.0 * rel
        ),
    )
}

fn color_oracle() -> Outcome {
    let mut rng = substream(8, &[]);
    let source = random_cost(64, 3, &mut rng);
    let target = random_cost(64, 3, &mut rng);
    let cfg = TransferConfig {
        k: 1,
        m: 64,
        iterations: 1,
        inner: W2,
        outer: OuterScheme::Exact,
        seed: 8,
        shared_batches: false,
    };
    let mapped = transfer_palette(source.view(), target.view(), &cfg).unwrap();
    let cost = Array2::from_shape_fn((64, 64), |(i, j)| {
        let d = &source.row(i) - &target.row(j);
        d.dot(&d)
    });
    let perm = assignment::solve(cost.view());
    let oracle_err = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            (&mapped.row(i) - &target.row(j))
                .mapv(f64::abs)
                .fold(0.0f64, |m, &v| m.max(v))
        })
        .fold(0.0f64, f64::max);

    // Support-function test of hull membership for several schemes.
    let directions: Vec<Array1<f64>> = (0..2000)
        .map(|_| Array1::from_shape_fn(3, |_| normal(&mut rng)))
        .collect();
    let support: Vec<f64> = directions
        .iter()
        .map(|u| {
            target
                .rows()
                .into_iter()
                .map(|t| t.dot(u))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let (mut outside, mut moved) = (0, 0);
    for outer in [
        OuterScheme::Average,
        OuterScheme::Exact,
        OuterScheme::Entropic { lambda: 0.1 },
    ] {
        let cfg = TransferConfig {
            k: 4,
            m: 8,
            iterations: 5,
            outer,
            ..cfg
        };
        let mapped = transfer_palette(source.view(), target.view(), &cfg).unwrap();
        // Centers never drawn in a batch keep their source color; only moved ones are checked.
        for (row, original) in mapped.rows().into_iter().zip(source.rows()) {
            if row == original {
                continue;
            }
            moved += 1;
            outside += usize::from(
                directions
                    .iter()
                    .zip(&support)
                    .any(|(u, &s)| row.dot(u) > s + 1e-12),
            );
        }
    }
    outcome(
        oracle_err <= 1e-9 && outside == 0,
        format!("max |transfer - full OT map| = {oracle_err:.1e}; {outside} of {moved} moved centers outside the target hull"),
    )
}

fn sliced_consistency() -> Outcome {
    let mut rng = substream(9, &[]);
    let mut worst_1d: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=6);
        let x: Vec<f64> = (0..m).map(|_| normal(&mut rng)).collect();
        let y: Vec<f64> = (0..m).map(|_| normal(&mut rng)).collect();
        let cost = Array2::from_shape_fn((m, m), |(i, j)| (x[i] - y[j]).powi(2));
        let perm = assignment::solve(cost.view());
        let assigned = (perm
            .iter()
            .enumerate()
            .map(|(i, &j)| cost[[i, j]])
            .sum::<f64>()
            / m as f64)
            .sqrt();
        let closed = wasserstein_1d(&sorted(x), &sorted(y), 2.0).unwrap();
        worst_1d = worst_1d.max((closed - assigned).abs());
    }
    let mut line_exact = true;
    for _ in 0..20 {
        let x: Vec<f64> = (0..7).map(|_| normal(&mut rng)).collect();
        let y: Vec<f64> = (0..7).map(|_| normal(&mut rng)).collect();
        let a = empirical_measure(&PointCloud::from_scalars(&x).unwrap());
        let b = empirical_measure(&PointCloud::from_scalars(&y).unwrap());
        let sw = sliced_wasserstein(&a, &b, 2.0, 10, &mut rng).unwrap();
        line_exact &= sw == wasserstein_1d(&sorted(x), &sorted(y), 2.0).unwrap();
    }
    let mut self_zero = true;
    for _ in 0..20 {
        let a = empirical_measure(&random_cloud(12, 3, &mut rng));
        self_zero &= sliced_wasserstein(&a, &a, 2.0, 20, &mut rng).unwrap() == 0.0;
    }
    outcome(
        worst_1d <= 1e-10 && line_exact && self_zero,
        format!("max |1D closed form - assignment| = {worst_1d:.1e}; SW on the line exact: {line_exact}; SW(A,A)=0: {self_zero}"),
    )
}

fn write_inputs(dir: &Path) {
    let mut rng = substream(10, &[]);
    for (name, shift) in [("a.csv", 0.0), ("b.csv", 4.0)] {
        let text: String = (0..12)
            .map(|_| {
                format!(
                    "{},{}\n",
                    shift + normal(&mut rng),
                    shift + normal(&mut rng)
                )
            })
            .collect();
        std::fs::write(dir.join(name), text).unwrap();
    }
    for (name, w, h) in [("s.ppm", 24, 16), ("t.ppm", 20, 18)] {
        let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
        bytes.extend((0..w * h * 3).map(|_| rng.random::<u8>()));
        std::fs::write(dir.join(name), bytes).unwrap();
    }
}

fn run_cli(dir: &Path, out: &str, threads: usize, args: &[&str]) -> PathBuf {
    let out_dir = dir.join(out);
    let status = Command::new(env!("CARGO_BIN_EXE_mbot"))
        .current_dir(dir)
        .args([
            "--threads",
            &threads.to_string(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .args(args)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    out_dir
}

/// Every file in `dir`; the manifest loses its timing and thread-count fields.
fn primary_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let mut bytes = std::fs::read(&path).unwrap();
            if name == "manifest.json" {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                let obj = v.as_object_mut().unwrap();
                obj.remove("wallclock_seconds");
                obj.remove("threads");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn bench_without_timings(files: Vec<(String, Vec<u8>)>) -> Vec<(String, Vec<u8>)> {
    files
        .into_iter()
        .map(|(name, bytes)| {
            if name != "bench.csv" {
                return (name, bytes);
            }
            let text = String::from_utf8(bytes).unwrap();
            let stripped: String = text
                .lines()
                .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
                .collect();
            (name, stripped.into_bytes())
        })
        .collect()
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_inputs(dir);
    let cases: [(&str, Vec<&str>); 6] = [
        (
            "plan",
            vec![
                "plan",
                "--source",
                "a.csv",
                "--target",
                "b.csv",
                "--k",
                "3",
                "--m",
                "6",
                "--full-ot",
            ],
        ),
        (
            "plan-entropic",
            vec![
                "plan", "--source", "a.csv", "--target", "b.csv", "--inner", "ew2", "--outer",
                "ebomb", "--lambda", "0.5", "--m", "6",
            ],
        ),
        (
            "flow",
            vec![
                "flow",
                "--toy",
                "s-shape",
                "--n",
                "40",
                "--k",
                "4",
                "--m",
                "8",
                "--steps",
                "30",
                "--eta",
                "0.05",
                "--snapshots",
            ],
        ),
        (
            "color",
            vec![
                "color",
                "--source",
                "s.ppm",
                "--target",
                "t.ppm",
                "--palette",
                "16",
                "--k",
                "4",
                "--m",
                "4",
                "--iterations",
                "3",
            ],
        ),
        (
            "abc",
            vec![
                "abc",
                "--n-obs",
                "50",
                "--k",
                "2",
                "--m",
                "8",
                "--n-posterior",
                "30",
                "--pilot",
                "200",
                "--seed",
                "4",
            ],
        ),
        (
            "bench",
            vec![
                "bench",
                "--k-grid",
                "2,4",
                "--m-grid",
                "8,16",
                "--n",
                "32",
                "--repeats",
                "1",
            ],
        ),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &cases {
        let runs: Vec<_> = [(1, "r1"), (1, "r2"), (8, "r8")]
            .iter()
            .map(|&(threads, tag)| {
                let out = run_cli(dir, &format!("{name}-{tag}"), threads, args);
                bench_without_timings(primary_outputs(&out))
            })
            .collect();
        if runs[0] != runs[1] || runs[0] != runs[2] || runs[0].len() < 2 {
            mismatched.push(*name);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} subcommand configurations x 3 runs (threads 1, 1, 8); mismatches: {mismatched:?}",
            cases.len()
        ),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, u64); 9] = [
        (
            "1   exact solver equals permutation oracle",
            exact_oracle_equivalence,
            5,
        ),
        (
            "2   entropic outer coupling interpolates",
            lambda_interpolation,
            10,
        ),
        ("3   aggregated plan sparsity", plan_sparsity, 5),
        (
            "5   flow gradient matches finite differences",
            gradient_check,
            10,
        ),
        (
            "6   gradient flow: BoMb ends closer than m-OT",
            gradient_flow,
            180,
        ),
        ("7   ABC closed form and recovery", abc_closed_form, 180),
        ("8   color transfer oracle and hull", color_oracle, 5),
        ("9   1D and sliced consistency", sliced_consistency, 5),
        ("10  CLI outputs are deterministic", cli_determinism, 120),
    ];
    let mut failures = 0;
    let mut report =
        |name: &str, result: Outcome, elapsed: Duration, budget: u64, asserted: bool| {
            let in_time = elapsed.as_secs_f64() < budget as f64;
            let pass = result.pass && in_time;
            if asserted && !pass {
                failures += 1;
            }
            println!(
                "criterion {name:<58} {} ({:.2}s, budget {budget}s) {}",
                if pass { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64(),
                result.detail
            );
        };
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        report(name, result, start.elapsed(), budget, true);
        if name.starts_with('3') {
            let start = Instant::now();
            let mut parts = plan_comparison().into_iter();
            let elapsed = start.elapsed();
            let (frob_name, frob) = parts.next().unwrap();
            let (name, result) = parts.next().unwrap();
            report(&frob_name, frob, elapsed, 10, false);
            report(&name, result, elapsed, 10, true);
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all asserted acceptance criteria passed");
}
