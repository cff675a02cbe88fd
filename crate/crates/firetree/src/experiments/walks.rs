//! The ξ-walk, its last-passage time and the stick-breaking process.

use firetree_core::tree::generate_recursive_tree;
use firetree_core::walk::{
    max_step_measure, run_walk_to, sample_xi, stick_breaking, walk_partial_sum, MAX_STEP_EPS,
};
use serde_json::json;

use super::{ln, strings};
use crate::config::ExperimentConfig;
use crate::report::ExperimentReport;
use crate::runner::{run_trials, trial_seed};
use crate::stats::{
    chi_square_test, chi_square_two_sample, covariance, covariance_se, histogram, median,
    MeanEstimate, TestReport,
};
use crate::Result;

/// Intervals of scaled steps whose counts are recorded; the intensity
/// `x^{-2} dx` gives them means 2 and 1.
pub const STEP_INTERVALS: [(f64, f64); 2] = [(0.25, 0.5), (0.5, 1.0)];
/// Relative tolerance on the interval counts.
pub const INTERVAL_TOLERANCE: f64 = 0.15;
/// `(k, trials)` of the law of large numbers for `S_k`.
pub const PARTIAL_SUM_K: usize = 100_000;
pub const PARTIAL_SUM_TRIALS: usize = 200;
/// Draws of `ξ` for its pmf and cells `1..=XI_CELLS` plus a tail.
pub const XI_DRAWS: usize = 100_000;
pub const XI_CELLS: usize = 30;
/// Stick length and trials of the stick-breaking comparison.
pub const STICK_N: usize = 50;
pub const STICK_TRIALS: usize = 100_000;

fn interval_target(a: f64, b: f64) -> f64 {
    1.0 / a - 1.0 / b
}

pub fn walk_laws(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let scale = ln(n) / n as f64;
    let walks = run_trials(cfg.trials, cfg.seed, cfg.workers, |i, seed, rng| {
        let path = run_walk_to(n as u64, rng)?;
        let big = max_step_measure(&path, n as u64, MAX_STEP_EPS);
        let counts = STEP_INTERVALS
            .map(|(a, b)| big.iter().filter(|&&x| a < x && x < b).count());
        Ok((i, seed, path.lambda, path.undershoot, path.degenerate, counts))
    })?;
    let mut header = strings(["trial", "n", "seed", "lambda", "undershoot"]);
    header.extend(STEP_INTERVALS.iter().map(|(a, b)| format!("steps_in_{a}_{b}")));
    let mut rep = ExperimentReport::new(cfg, None, header);
    let kept: Vec<_> = walks.iter().filter(|w| !w.4).collect();
    rep.dropped = walks.len() - kept.len();
    for (i, seed, lambda, under, _, counts) in &kept {
        let mut row = vec![
            i.to_string(),
            n.to_string(),
            seed.to_string(),
            lambda.to_string(),
            under.to_string(),
        ];
        row.extend(counts.iter().map(|c| c.to_string()));
        rep.rows.push(row);
    }
    let len = kept.len();

    let lambdas: Vec<f64> = kept.iter().map(|w| w.2 as f64 * scale).collect();
    let m = MeanEstimate::of(&lambdas);
    rep.note("scaled_lambda", json!({ "mean": m.mean, "se": m.se }));
    rep.push(TestReport::within("mean_scaled_lambda", m.mean, 1.0, 0.1, len));

    let unders: Vec<f64> = kept.iter().map(|w| w.3 as f64 * scale).collect();
    rep.push(TestReport::at_most("median_scaled_undershoot", median(&unders), 0.1, len));

    let mut count_series = Vec::new();
    for (j, &(a, b)) in STEP_INTERVALS.iter().enumerate() {
        let cs: Vec<f64> = kept.iter().map(|w| w.5[j] as f64).collect();
        let m = MeanEstimate::of(&cs);
        let target = interval_target(a, b);
        let t = TestReport::within(
            format!("mean_steps_in_{a}_{b}"),
            m.mean,
            target,
            INTERVAL_TOLERANCE * target,
            len,
        );
        // the graded interval is (0.5, 1)
        rep.push(if a == 0.5 { t } else { t.as_info() });
        count_series.push(cs);
    }
    let cov = covariance(&count_series[0], &count_series[1]);
    let se = covariance_se(&count_series[0], &count_series[1]);
    rep.note("interval_count_covariance", json!({ "covariance": cov, "se": se }));
    rep.push(TestReport::at_most("interval_counts_covariance_se", cov.abs() / se, 3.0, len));

    let sums = run_trials(PARTIAL_SUM_TRIALS, trial_seed(cfg.seed, 1), cfg.workers, |_, _, rng| {
        let k = PARTIAL_SUM_K as f64;
        Ok(walk_partial_sum(PARTIAL_SUM_K, rng) as f64 / (k * k.ln()))
    })?;
    let ms = MeanEstimate::of(&sums);
    let med = median(&sums);
    rep.note("partial_sum_ratio", json!({ "mean": ms.mean, "median": med, "k": PARTIAL_SUM_K }));
    rep.push(TestReport::within("mean_partial_sum_ratio", ms.mean, 1.0, 0.1, sums.len()));
    rep.push(TestReport::within("median_partial_sum_ratio", med, 1.0, 0.1, sums.len()).as_info());

    let xis = run_trials(XI_DRAWS, trial_seed(cfg.seed, 2), cfg.workers, |_, _, rng| {
        Ok(sample_xi(rng))
    })?;
    let observed = histogram(
        xis.iter().map(|&x| (x as usize).min(XI_CELLS + 1) - 1),
        XI_CELLS + 1,
    );
    let mut law: Vec<f64> = (1..=XI_CELLS).map(|k| 1.0 / (k * (k + 1)) as f64).collect();
    law.push(1.0 / (XI_CELLS + 1) as f64);
    rep.push(chi_square_test(&observed, &law)?.report("chi2_xi_pmf", xis.len()));
    let ones = observed[0] as f64 / xis.len() as f64;
    rep.push(TestReport::within("p_xi_equals_1", ones, 0.5, 0.005, xis.len()));

    let sticks = run_trials(STICK_TRIALS, trial_seed(cfg.seed, 3), cfg.workers, |_, _, rng| {
        let s = stick_breaking(STICK_N, rng)?;
        let t = generate_recursive_tree(STICK_N + 1, rng)?.root_branch_sizes();
        Ok((s.parts().len(), s.parts()[0], t.len(), t[0]))
    })?;
    let cells = STICK_N + 1;
    for (name, a, b) in [
        ("parts", histogram(sticks.iter().map(|s| s.0), cells), histogram(sticks.iter().map(|s| s.2), cells)),
        ("first_part", histogram(sticks.iter().map(|s| s.1), cells), histogram(sticks.iter().map(|s| s.3), cells)),
    ] {
        let chi = chi_square_two_sample(&a, &b)?;
        rep.push(chi.report(format!("chi2_stick_breaking_vs_tree_{name}"), sticks.len()));
    }
    Ok(rep)
}
