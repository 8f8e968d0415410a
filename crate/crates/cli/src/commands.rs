use std::time::Instant;

use minibatch_ot::abc::{
    percentile, pilot_distances, posterior_w2, rejection_abc, sample_inverse_gamma, simulate,
    true_posterior_params, AbcConfig,
};
use minibatch_ot::color::{apply_palette, kmeans, transfer_palette, TransferConfig};
use minibatch_ot::flow::{run_flow, toy, FlowConfig};
use minibatch_ot::io;
use minibatch_ot::rng::{substream, TAG_DATA, TAG_PALETTE};
use minibatch_ot::solvers::{exact_ot_uniform, pairwise_cost};
use minibatch_ot::{empirical_measure, mb_distance, Error, PointCloud, Result};
use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::args::{AbcArgs, BenchArgs, ColorArgs, FlowArgs, PlanArgs, Toy};
use crate::output::Output;

/// Largest problem `--full-ot` will solve.
const FULL_OT_MAX_N: usize = 2048;

/// Seeds and headline results for the manifest.
pub struct Summary {
    pub seeds: Value,
    pub results: Value,
}

pub fn plan(args: &PlanArgs, out: &mut Output) -> Result<Summary> {
    let x = io::load_point_cloud(&args.source)?;
    let y = io::load_point_cloud(&args.target)?;
    let cfg = args.scheme.scheme().with_aggregation(true);
    let res = mb_distance(&x, &y, &cfg)?;
    let plan = res.aggregated_plan.as_ref().expect("aggregation requested");

    io::write_plan(out.create("plan.csv")?, plan)?;
    io::write_plan(out.create("outer_plan.csv")?, &res.outer_plan)?;
    io::write_matrix(out.create("batch_costs.csv")?, res.cost_matrix.values())?;

    let mut results = json!({
        "loss": res.loss,
        "nnz": plan.nnz(),
        "n_source": x.len(),
        "n_target": y.len(),
    });
    if args.full_ot {
        if x.len() != y.len() || x.len() > FULL_OT_MAX_N {
            return Err(Error::InvalidInput(format!(
                "--full-ot needs clouds of equal size at most {FULL_OT_MAX_N}, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        let p = cfg.inner.p();
        let cost = pairwise_cost(&empirical_measure(&x), &empirical_measure(&y), p)?;
        let (full, report) = exact_ot_uniform(&cost)?;
        io::write_plan(out.create("full_plan.csv")?, &full)?;
        results["full_ot_distance"] = json!(report.objective.powf(1.0 / p));
        results["full_ot_nnz"] = json!(full.nnz());
    }
    Ok(Summary {
        seeds: json!({ "scheme": cfg.seed }),
        results,
    })
}

pub fn flow(args: &FlowArgs, out: &mut Output) -> Result<Summary> {
    let (x0, y) = match (&args.source, &args.target, args.toy) {
        (Some(s), Some(t), _) => (io::load_point_cloud(s)?, io::load_point_cloud(t)?),
        (_, _, Some(Toy::SShape)) => {
            if args.n == 0 {
                return Err(Error::InvalidInput("--n must be positive".into()));
            }
            (
                toy::two_clusters(args.n, args.data_seed),
                toy::s_shape(args.n, args.data_seed),
            )
        }
        _ => {
            return Err(Error::InvalidInput(
                "give --source and --target, or --toy".into(),
            ))
        }
    };
    let scheme = args.scheme.scheme();
    let mut cfg = FlowConfig::new(scheme, args.steps, args.eta, scheme.seed);
    if let Some(every) = args.eval_every {
        cfg.eval_every = every;
    }
    cfg.normalize_by_mass = !args.no_normalize;
    cfg.keep_snapshots = args.snapshots;
    let trace = run_flow(&x0, &y, &cfg)?;

    io::write_records(
        out.create("trace.csv")?,
        &["step", "w2", "loss"],
        trace
            .records
            .iter()
            .map(|r| vec![r.step.to_string(), io::fmt_f64(r.w2), io::fmt_f64(r.loss)]),
    )?;
    io::write_point_cloud(out.create("source.csv")?, &x0)?;
    io::write_point_cloud(out.create("target.csv")?, &y)?;
    io::write_point_cloud(out.create("final.csv")?, &trace.final_positions)?;
    for (step, cloud) in &trace.snapshots {
        io::write_point_cloud(out.create(&format!("snapshot_{step:06}.csv"))?, cloud)?;
    }

    let first = trace.records.first().expect("initial evaluation");
    let last = trace.records.last().expect("initial evaluation");
    Ok(Summary {
        seeds: json!({ "scheme": scheme.seed, "data": args.data_seed }),
        results: json!({
            "initial_w2": first.w2,
            "final_w2": last.w2,
            "evaluations": trace.records.len(),
        }),
    })
}

pub fn color(args: &ColorArgs, out: &mut Output) -> Result<Summary> {
    let source = io::load_ppm(&args.source)?;
    let target = io::load_ppm(&args.target)?;
    let palette_size = args.palette;
    if palette_size == 0 || palette_size > source.pixels().nrows().min(target.pixels().nrows()) {
        return Err(Error::InvalidInput(format!(
            "palette size {palette_size} must be between 1 and the smaller pixel count"
        )));
    }
    // Both palettes come from the same stream, so identical images get identical palettes.
    let seed = args.scheme.seed;
    let src_palette = kmeans(
        source.pixels(),
        palette_size,
        args.kmeans_iters,
        &mut substream(seed, &[TAG_PALETTE]),
    )?;
    let tgt_palette = kmeans(
        target.pixels(),
        palette_size,
        args.kmeans_iters,
        &mut substream(seed, &[TAG_PALETTE]),
    )?;

    let scheme = args.scheme.scheme();
    let cfg = TransferConfig {
        k: scheme.k,
        m: scheme.m,
        iterations: args.iterations,
        inner: scheme.inner,
        outer: scheme.outer,
        seed,
        shared_batches: args.shared_batches,
    };
    let mapped = transfer_palette(src_palette.centers.view(), tgt_palette.centers.view(), &cfg)?;
    let result = apply_palette(&source, &src_palette, mapped.view())?;

    out.write_bytes("transferred.ppm", &io::encode_ppm(&result))?;
    io::write_palette(
        out.create("palette_source.csv")?,
        src_palette.centers.view(),
    )?;
    io::write_palette(
        out.create("palette_target.csv")?,
        tgt_palette.centers.view(),
    )?;
    io::write_palette(out.create("palette_after.csv")?, mapped.view())?;
    Ok(Summary {
        seeds: json!({ "scheme": seed, "palette": seed }),
        results: json!({
            "width": result.width(),
            "height": result.height(),
            "palette_size": palette_size,
        }),
    })
}

pub fn abc(args: &AbcArgs, out: &mut Output) -> Result<Summary> {
    let seed = args.scheme.seed;
    let mut rng = substream(seed, &[TAG_DATA]);
    let mu_star = match &args.mu_star {
        Some(mu) => mu.clone(),
        None => (0..args.dims)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect(),
    };
    let obs = match &args.obs {
        Some(path) => io::load_point_cloud(path)?,
        None => {
            if !(args.sigma2_star > 0.0) {
                return Err(Error::InvalidInput("--sigma2-star must be positive".into()));
            }
            simulate(args.sigma2_star, &mu_star, args.n_obs, &mut rng)?
        }
    };
    let mut cfg = AbcConfig {
        prior_shape: args.prior_shape,
        prior_scale: args.prior_scale,
        mu_star: mu_star.clone(),
        n_obs: obs.len(),
        scheme: args.scheme.scheme(),
        epsilon: f64::INFINITY,
        n_posterior: args.n_posterior,
        max_proposals: args.max_proposals,
        seed,
    };
    let (epsilon, source) = match args.epsilon {
        Some(eps) => (eps, "fixed"),
        None => {
            if args.pilot == 0 {
                return Err(Error::InvalidInput("--pilot must be positive".into()));
            }
            let pilot = pilot_distances(&obs, &cfg, args.pilot)?;
            (percentile(&pilot, args.eps_percentile)?, "pilot percentile")
        }
    };
    cfg.epsilon = epsilon;
    let (shape, scale) =
        true_posterior_params(obs.points(), &mu_star, args.prior_shape, args.prior_scale)?;

    io::write_point_cloud(out.create("observations.csv")?, &obs)?;
    let post = rejection_abc(&obs, &cfg)?;
    io::write_records(
        out.create("samples.csv")?,
        &["index", "sigma2", "distance"],
        post.accepted.iter().map(|p| {
            vec![
                p.index.to_string(),
                io::fmt_f64(p.sigma2),
                io::fmt_f64(p.distance),
            ]
        }),
    )?;

    let mut exact_rng = substream(seed, &[TAG_DATA, 1]);
    let exact: Vec<f64> = (0..post.accepted.len())
        .map(|_| sample_inverse_gamma(shape, scale, &mut exact_rng))
        .collect();
    let true_mean = if shape > 1.0 {
        scale / (shape - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(Summary {
        seeds: json!({ "scheme": seed }),
        results: json!({
            "shape": shape,
            "scale": scale,
            "mu_star": mu_star,
            "epsilon": epsilon,
            "epsilon_source": source,
            "accepted": post.accepted.len(),
            "proposals_used": post.proposals_used,
            "acceptance_rate": post.acceptance_rate,
            "complete": post.complete,
            "posterior_mean": post.mean(),
            "true_posterior_mean": true_mean,
            "posterior_w2": posterior_w2(&post.values(), &exact)?,
        }),
    })
}

pub fn bench(args: &BenchArgs, out: &mut Output) -> Result<Summary> {
    if args.k_grid.is_empty() || args.m_grid.is_empty() || args.repeats == 0 || args.dims == 0 {
        return Err(Error::InvalidInput(
            "grids, --repeats and --dims must be non-empty/positive".into(),
        ));
    }
    let n = args.m_grid.iter().copied().fold(args.n, usize::max);
    let mut rng = substream(args.scheme.seed, &[TAG_DATA]);
    let mut cloud = |shift: f64| -> Result<PointCloud> {
        PointCloud::new(Array2::from_shape_fn((n, args.dims), |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z + shift
        }))
    };
    let (x, y) = (cloud(0.0)?, cloud(1.0)?);

    let mut rows = Vec::new();
    for &k in &args.k_grid {
        for &m in &args.m_grid {
            let mut scheme = args.scheme.scheme();
            scheme.k = k;
            scheme.m = m;
            let mut best = f64::INFINITY;
            for _ in 0..args.repeats {
                let start = Instant::now();
                mb_distance(&x, &y, &scheme)?;
                best = best.min(start.elapsed().as_secs_f64());
            }
            rows.push(vec![
                k.to_string(),
                m.to_string(),
                args.scheme.inner.clone(),
                format!("{:?}", args.scheme.outer).to_lowercase(),
                io::fmt_f64(best),
            ]);
        }
    }
    let cells = rows.len();
    io::write_records(
        out.create("bench.csv")?,
        &["k", "m", "inner", "outer", "seconds"],
        rows.into_iter(),
    )?;
    Ok(Summary {
        seeds: json!({ "scheme": args.scheme.seed, "data": args.scheme.seed }),
        results: json!({ "cells": cells, "n": n }),
    })
}
