//! Experiments on the cut-tree: its scalar functionals, the exact coupling
//! with the fire dynamics and the moment identity it yields.

use firetree_core::cut_tree::build_cut_tree;
use firetree_core::dynamics::{draw_edge_randomness, run_fire_dynamics_with, DynamicsOptions};
use firetree_core::laws::{ks_statistic, ReferenceLaw};
use firetree_core::tree::generate_recursive_tree;
use firetree_core::walk::run_walk_to;
use rand::Rng;
use serde_json::json;

use super::{ln, simulate, strings};
use crate::config::ExperimentConfig;
use crate::report::ExperimentReport;
use crate::runner::run_trials;
use crate::stats::{chi_square_test, histogram, median, quantile, MeanEstimate, TestReport};
use crate::Result;

/// Largest reduced-tree leaf count.
pub const MAX_LEAVES: usize = 3;
/// The first root-path block is binned on `1..=FIRST_BLOCK_CELLS` plus a tail.
pub const FIRST_BLOCK_CELLS: usize = 20;
/// Tree size cap of the coupling check.
pub const COUPLING_MAX_N: usize = 500;

/// `P(ξ = k) = 1/(k(k+1))` on `1..=cells` followed by the tail `1/(cells+1)`.
pub fn xi_cells(cells: usize) -> Vec<f64> {
    let mut probs: Vec<f64> = (1..=cells).map(|k| 1.0 / (k * (k + 1)) as f64).collect();
    probs.push(1.0 / (cells + 1) as f64);
    probs
}

/// Reduced trees, `ζ`, and the first root-path block of cut-trees of random
/// recursive trees.
pub fn cut_tree_laws(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let rows = run_trials(cfg.trials, cfg.seed, cfg.workers, |i, seed, rng| {
        let tree = generate_recursive_tree(n, rng)?;
        let r = draw_edge_randomness(&tree, 0.0, rng)?;
        let cut = build_cut_tree(&tree, &r)?;
        let mut reduced = [(0usize, 0usize); MAX_LEAVES];
        for (k, slot) in reduced.iter_mut().enumerate() {
            *slot = cut.reduced_tree(k + 1, rng)?;
        }
        let first = cut.root_path_blocks().first().map_or(0, |b| b.0);
        let walk = run_walk_to(n as u64, rng)?;
        Ok((i, seed, cut.zeta(), reduced, first, walk.lambda, walk.undershoot))
    })?;
    let mut header = strings(["trial", "n", "seed", "zeta", "first_block", "lambda", "undershoot"]);
    for k in 1..=MAX_LEAVES {
        header.push(format!("L_{k}"));
        header.push(format!("X_{k}"));
    }
    let mut rep = ExperimentReport::new(cfg, None, header);
    for (i, seed, zeta, reduced, first, lambda, under) in &rows {
        let mut row = vec![
            i.to_string(),
            n.to_string(),
            seed.to_string(),
            zeta.to_string(),
            first.to_string(),
            lambda.to_string(),
            under.to_string(),
        ];
        for (l, x) in reduced {
            row.push(l.to_string());
            row.push(x.to_string());
        }
        rep.rows.push(row);
    }
    let scale = ln(n) / n as f64;
    let len = rows.len();

    for k in 1..=MAX_LEAVES {
        let ls: Vec<f64> = rows.iter().map(|r| r.3[k - 1].0 as f64 * scale).collect();
        let d = ks_statistic(&ls, &ReferenceLaw::Beta { k: k as f64 })?;
        rep.push(TestReport::at_most(format!("ks_L_{k}_vs_beta_{k}_1"), d, 0.1, len));
    }

    let zetas: Vec<f64> = rows.iter().map(|r| r.2 as f64 * scale).collect();
    let squares: Vec<f64> = zetas.iter().map(|z| z * z).collect();
    let (m1, m2) = (MeanEstimate::of(&zetas), MeanEstimate::of(&squares));
    rep.note("scaled_zeta", json!({ "mean": m1.mean, "se": m1.se, "second_moment": m2.mean, "second_moment_se": m2.se }));
    rep.push(TestReport::within("mean_scaled_zeta", m1.mean, 1.0, 0.1, len));
    rep.push(TestReport::within("second_moment_scaled_zeta", m2.mean, 1.0, 0.2, len));

    let observed = histogram(
        rows.iter().map(|r| r.4.clamp(1, FIRST_BLOCK_CELLS + 1) - 1),
        FIRST_BLOCK_CELLS + 1,
    );
    let chi = chi_square_test(&observed, &xi_cells(FIRST_BLOCK_CELLS))?;
    rep.push(chi.report("chi2_first_root_path_block_vs_xi", len));

    // λ ≤ ζ ≤ λ + undershoot holds in law; compared through medians
    let lambdas: Vec<f64> = rows.iter().map(|r| r.5 as f64 * scale).collect();
    let uppers: Vec<f64> = rows.iter().map(|r| (r.5 as f64 + r.6 as f64) * scale).collect();
    let (lo, mid, hi) = (median(&lambdas), median(&zetas), median(&uppers));
    rep.note("sandwich_medians", json!({ "lambda": lo, "zeta": mid, "lambda_plus_undershoot": hi }));
    rep.note(
        "scaled_zeta_quantiles",
        json!({ "q10": quantile(&zetas, 0.1), "q50": mid, "q90": quantile(&zetas, 0.9) }),
    );
    rep.push(TestReport::info("sandwich_median_zeta_minus_lambda", mid - lo, None, len));
    rep.push(TestReport::info("sandwich_median_upper_minus_zeta", hi - mid, None, len));
    Ok(rep)
}

/// Compares the direct dynamics with the outcome read off the marked
/// cut-tree on random instances. Trial 0 has no marks, trial 1 marks every
/// edge.
pub fn coupling_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n_max = cfg.n.min(COUPLING_MAX_N);
    let full = DynamicsOptions::default();
    let rows = run_trials(cfg.trials, cfg.seed, cfg.workers, |i, seed, rng| {
        let n = rng.random_range(1..=n_max);
        let p = match i {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        };
        let tree = generate_recursive_tree(n, rng)?;
        let r = draw_edge_randomness(&tree, p, rng)?;
        let direct = run_fire_dynamics_with(&tree, &r, &full)?;
        let cut = build_cut_tree(&tree, &r)?;
        let derived = cut.apply_mark_process(&r)?.fire_outcome(&tree, &full)?;
        Ok((i, seed, n, p, direct.num_fires(), direct.fireproof_count, direct == derived))
    })?;
    let mut rep = ExperimentReport::new(
        cfg,
        None,
        strings(["trial", "seed", "n", "p", "fires", "I_n", "match"]),
    );
    for (i, seed, n, p, fires, fireproof, ok) in &rows {
        rep.rows.push(vec![
            i.to_string(),
            seed.to_string(),
            n.to_string(),
            p.to_string(),
            fires.to_string(),
            fireproof.to_string(),
            (*ok as u8).to_string(),
        ]);
    }
    let mismatches = rows.iter().filter(|r| !r.6).count();
    rep.note("instances", rows.len());
    rep.note("mismatches", mismatches);
    rep.push(TestReport::at_most("coupling_mismatches", mismatches as f64, 0.0, rows.len()));
    Ok(rep)
}

/// `E[(I/n)^k]` against `E[(1 − p)^{X_{n,k}}]` on the same trees.
pub fn moment_identity(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let log_keep = (-p).ln_1p();
    let rows = run_trials(cfg.trials, cfg.seed, cfg.workers, |i, seed, rng| {
        let (tree, r, out) = simulate(cfg.n, p, rng)?;
        let cut = build_cut_tree(&tree, &r)?;
        let mut xs = [0usize; 2];
        for (k, x) in xs.iter_mut().enumerate() {
            *x = cut.reduced_tree(k + 1, rng)?.1;
        }
        Ok((i, seed, out.fireproof_count, xs))
    })?;
    let mut rep = ExperimentReport::new(cfg, Some(p), strings(["trial", "n", "p", "seed", "I_n", "X_1", "X_2"]));
    for (i, seed, fireproof, xs) in &rows {
        rep.rows.push(vec![
            i.to_string(),
            cfg.n.to_string(),
            p.to_string(),
            seed.to_string(),
            fireproof.to_string(),
            xs[0].to_string(),
            xs[1].to_string(),
        ]);
    }
    let n = cfg.n as f64;
    for k in 1..=2 {
        let direct: Vec<f64> =
            rows.iter().map(|r| (r.2 as f64 / n).powi(k as i32)).collect();
        let reduced: Vec<f64> =
            rows.iter().map(|r| (log_keep * r.3[k - 1] as f64).exp()).collect();
        let (a, b) = (MeanEstimate::of(&direct), MeanEstimate::of(&reduced));
        rep.note(
            &format!("moment_{k}"),
            json!({ "direct": a.mean, "direct_se": a.se, "reduced_tree": b.mean, "reduced_tree_se": b.se }),
        );
        rep.push(TestReport::at_most(
            format!("moment_{k}_identity_pooled_se"),
            a.z_distance(&b),
            3.0,
            rows.len(),
        ));
    }
    Ok(rep)
}
