//! Monte Carlo checks against exact finite-n laws.

use std::collections::BTreeMap;

use firetree_core::laws::{brute_force_avg_over_trees, ExactLaw, BRUTE_FORCE_AVG_MAX_N};
use firetree_core::tree::generate_recursive_tree;
use firetree_core::walk::{size_biased_pick, stick_breaking, LogFactorials};
use rand::Rng;
use serde_json::json;

use super::{simulate, strings};
use crate::config::ExperimentConfig;
use crate::report::ExperimentReport;
use crate::runner::{run_trials, trial_seed};
use crate::stats::{chi_square_test, histogram, TestReport};
use crate::Result;

/// Fire probabilities of the oracle grid.
pub const ORACLE_PS: [f64; 3] = [0.1, 0.4, 0.8];
/// Parts of the stick-breaking process whose size-biased pick is tested.
pub const STICK_N: usize = 10;
/// Draws of the size-biased pick.
pub const STICK_DRAWS: usize = 1_000_000;
/// `(n, v)` of the subtree-size check.
pub const SUBTREE_N: usize = 50;
pub const SUBTREE_V: usize = 10;
/// Tree size of the common-ancestor check.
pub const ANCESTOR_N: usize = 10_000;

fn dense(law: &BTreeMap<usize, f64>, len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    for (&k, &p) in law {
        v[k] = p;
    }
    v
}

fn histogram_rows(
    rep: &mut ExperimentReport,
    n: usize,
    p: f64,
    quantity: &str,
    observed: &[u64],
    probs: &[f64],
) {
    let total: u64 = observed.iter().sum();
    for (k, (&o, &q)) in observed.iter().zip(probs).enumerate() {
        rep.rows.push(vec![
            n.to_string(),
            p.to_string(),
            quantity.to_string(),
            k.to_string(),
            o.to_string(),
            (q * total as f64).to_string(),
        ]);
    }
}

/// Monte Carlo against the exact law averaged over all recursive trees,
/// for `n` in `2..=min(cfg.n, 6)` and the fire probabilities of
/// [`ORACLE_PS`] plus the configured one.
pub fn oracle_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut ps = ORACLE_PS.to_vec();
    let own = cfg.p()?;
    if !ps.contains(&own) {
        ps.push(own);
    }
    let mut rep = ExperimentReport::new(
        cfg,
        Some(own),
        strings(["n", "p", "quantity", "value", "observed", "expected"]),
    );
    let mut combo = 0u64;
    for n in 2..=cfg.n.min(BRUTE_FORCE_AVG_MAX_N) {
        for &p in &ps {
            combo += 1;
            let exact: ExactLaw = brute_force_avg_over_trees(n, p)?;
            let samples = run_trials(cfg.trials, trial_seed(cfg.seed, combo), cfg.workers, |_, _, rng| {
                let (_, _, out) = simulate(n, p, rng)?;
                Ok((out.fireproof_count as u32, out.root_burnt_size as u32))
            })?;
            let i_obs = histogram(samples.iter().map(|s| s.0 as usize), n + 1);
            let b_obs = histogram(samples.iter().map(|s| s.1 as usize), n + 1);
            let burn_obs = [b_obs[1..].iter().sum::<u64>(), b_obs[0]];
            let i_law = dense(&exact.i_law(), n + 1);
            let b_law = dense(&exact.root_burnt_size_law(), n + 1);
            let burn_law = [1.0 - b_law[0], b_law[0]];
            let tag = format!("n{n}_p{p}");
            for (quantity, obs, law) in [
                ("I", &i_obs[..], &i_law[..]),
                ("b0", &b_obs[..], &b_law[..]),
                ("root_burns", &burn_obs[..], &burn_law[..]),
            ] {
                histogram_rows(&mut rep, n, p, quantity, obs, law);
                let chi = chi_square_test(obs, law)?;
                rep.push(chi.report(format!("chi2_{quantity}_{tag}"), samples.len()));
            }
        }
    }
    Ok(rep)
}

/// Exact laws at finite `n`: the first fire time, the size-biased pick of a
/// stick-breaking process, the subtree size of a fixed vertex and the
/// height of the common ancestor of two uniform vertices.
pub fn exact_laws(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let n = cfg.n;
    let mut rep = ExperimentReport::new(
        cfg,
        Some(p),
        strings(["n", "p", "quantity", "value", "observed", "expected"]),
    );

    // θ_1 = n − 1 encodes a run without fire
    let thetas = run_trials(cfg.trials, trial_seed(cfg.seed, 1), cfg.workers, |_, _, rng| {
        let (_, _, out) = simulate(n, p, rng)?;
        Ok(out.fires.first().map_or(n - 1, |f| f.theta))
    })?;
    let log_keep = (-p).ln_1p();
    let mut law: Vec<f64> = (0..n - 1).map(|k| p * (log_keep * k as f64).exp()).collect();
    law.push((log_keep * (n - 1) as f64).exp());
    let observed = histogram(thetas.iter().copied(), n);
    histogram_rows(&mut rep, n, p, "theta_1", &observed, &law);
    let chi = chi_square_test(&observed, &law)?;
    rep.push(chi.report("chi2_theta_1_truncated_geometric", thetas.len()));

    let picks = run_trials(STICK_DRAWS, trial_seed(cfg.seed, 2), cfg.workers, |_, _, rng| {
        Ok(size_biased_pick(&stick_breaking(STICK_N, rng)?, rng) as u8)
    })?;
    let observed = histogram(picks.iter().map(|&s| s as usize - 1), STICK_N);
    let uniform = vec![1.0 / STICK_N as f64; STICK_N];
    histogram_rows(&mut rep, STICK_N, p, "size_biased_pick", &observed, &uniform);
    let chi = chi_square_test(&observed, &uniform)?;
    rep.push(chi.report("chi2_size_biased_pick_uniform", picks.len()));

    let sizes = run_trials(cfg.trials, trial_seed(cfg.seed, 3), cfg.workers, |_, _, rng| {
        Ok(generate_recursive_tree(SUBTREE_N, rng)?.subtree_size(SUBTREE_V)?)
    })?;
    let law = LogFactorials::new(SUBTREE_N).subtree_size_law(SUBTREE_N, SUBTREE_V)?;
    let observed = histogram(sizes.iter().map(|&s| s - 1), law.len());
    histogram_rows(&mut rep, SUBTREE_N, p, "subtree_size_minus_1", &observed, &law);
    let chi = chi_square_test(&observed, &law)?;
    rep.push(chi.report("chi2_subtree_size_beta_binomial", sizes.len()));

    // one pair per tree keeps the draws independent
    let hits = run_trials(cfg.trials, trial_seed(cfg.seed, 4), cfg.workers, |_, _, rng| {
        let tree = generate_recursive_tree(ANCESTOR_N, rng)?;
        let u = rng.random_range(1..=ANCESTOR_N);
        let v = rng.random_range(1..=ANCESTOR_N);
        Ok(tree.lca_height(u, v)? >= 1)
    })?;
    let target = (ANCESTOR_N - 1) as f64 / (2 * ANCESTOR_N) as f64;
    let count = hits.iter().filter(|&&h| h).count() as u64;
    let total = hits.len() as u64;
    let observed = [count, total - count];
    let law = [target, 1.0 - target];
    histogram_rows(&mut rep, ANCESTOR_N, p, "ancestor_height_at_least_1", &observed, &law);
    let estimate = count as f64 / total as f64;
    rep.note("ancestor_height_at_least_1", json!({ "estimate": estimate, "target": target }));
    rep.push(TestReport::within("p_ancestor_height_at_least_1", estimate, target, 0.01, hits.len()));
    let chi = chi_square_test(&observed, &law)?;
    rep.push(chi.report("chi2_ancestor_height_at_least_1", hits.len()));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Regime;

    #[test]
    fn oracle_check_small() {
        let cfg = ExperimentConfig::new("oracle_check", 4, Regime::Explicit { p: 0.4 }, 20_000, 9);
        let r = oracle_check(&cfg).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        // n = 2, 3, 4 with three grid values of p, three checks each
        assert_eq!(r.tests.len(), 27);
        let extra = ExperimentConfig::new("oracle_check", 2, Regime::Explicit { p: 0.5 }, 1000, 9);
        assert_eq!(oracle_check(&extra).unwrap().tests.len(), 12);
    }

    #[test]
    fn dense_fills_gaps() {
        let law: BTreeMap<usize, f64> = [(0, 0.25), (2, 0.75)].into_iter().collect();
        assert_eq!(dense(&law, 4), vec![0.25, 0.0, 0.75, 0.0]);
    }
}
