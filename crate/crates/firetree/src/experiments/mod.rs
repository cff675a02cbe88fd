//! Named experiments. Each takes an [`ExperimentConfig`] and returns an
//! [`ExperimentReport`] with per-trial rows, summary estimates and tests.

use firetree_core::dynamics::{draw_edge_randomness, run_fire_dynamics_with, DynamicsOptions};
use firetree_core::tree::generate_recursive_tree;
use firetree_core::{EdgeRandomness, FireOutcome, Tree};
use rand::Rng;

use crate::config::{ExperimentConfig, Regime};
use crate::error::config;
use crate::report::ExperimentReport;
use crate::Result;

mod cuts;
mod exact;
mod fires;
mod walks;

pub use cuts::{coupling_check, cut_tree_laws, moment_identity};
pub use exact::{exact_laws, oracle_check};
pub use fires::{
    burnt_sequence, connectivity, largest_fireproof, phase_transition, root_component,
    subcritical_scaling,
};
pub use walks::walk_laws;

type Runner = fn(&ExperimentConfig) -> Result<ExperimentReport>;

/// `(name, runner, default n, default regime, default trials)`.
pub const EXPERIMENTS: &[(&str, Runner, usize, Regime, usize)] = &[
    ("phase_transition", phase_transition, 100_000, Regime::Critical { c: 1.0 }, 2000),
    ("subcritical_scaling", subcritical_scaling, 1_000_000, Regime::Subcritical { a: 0.5 }, 1000),
    ("root_component", root_component, 100_000, Regime::Critical { c: 1.0 }, 2000),
    ("connectivity", connectivity, 100_000, Regime::Critical { c: 1.0 }, 2000),
    ("largest_fireproof", largest_fireproof, 100_000, Regime::Critical { c: 1.0 }, 1000),
    ("burnt_sequence", burnt_sequence, 100_000, Regime::Critical { c: 1.0 }, 5000),
    ("cut_tree_laws", cut_tree_laws, 100_000, Regime::Critical { c: 1.0 }, 2000),
    ("coupling_check", coupling_check, 500, Regime::Critical { c: 1.0 }, 1000),
    ("oracle_check", oracle_check, 6, Regime::Explicit { p: 0.4 }, 1_000_000),
    ("exact_laws", exact_laws, 100, Regime::Explicit { p: 0.1 }, 100_000),
    ("moment_identity", moment_identity, 1000, Regime::Explicit { p: 0.01 }, 20_000),
    ("walk_laws", walk_laws, 1_000_000, Regime::Critical { c: 1.0 }, 1000),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    EXPERIMENTS.iter().map(|e| e.0)
}

/// Default configuration of a named experiment.
pub fn default_config(name: &str, seed: u64) -> Result<ExperimentConfig> {
    let &(name, _, n, regime, trials) = EXPERIMENTS
        .iter()
        .find(|e| e.0 == name)
        .ok_or_else(|| config(format!("unknown experiment `{name}`")))?;
    Ok(ExperimentConfig::new(name, n, regime, trials, seed))
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let runner = EXPERIMENTS
        .iter()
        .find(|e| e.0 == cfg.experiment)
        .map(|e| e.1)
        .ok_or_else(|| config(format!("unknown experiment `{}`", cfg.experiment)))?;
    runner(cfg)
}

/// Dynamics options for bulk runs: burnt vertex lists are never kept.
pub(crate) fn lean() -> DynamicsOptions {
    DynamicsOptions { block_cap: Some(0) }
}

/// A fresh random recursive tree with its edge randomness and outcome.
pub fn simulate<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<(Tree, EdgeRandomness, FireOutcome)> {
    let tree = generate_recursive_tree(n, rng)?;
    let randomness = draw_edge_randomness(&tree, p, rng)?;
    let outcome = run_fire_dynamics_with(&tree, &randomness, &lean())?;
    Ok((tree, randomness, outcome))
}

pub(crate) fn strings<const N: usize>(cols: [&str; N]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn ln(x: usize) -> f64 {
    (x as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_consistent() {
        for name in names() {
            let cfg = default_config(name, 1).unwrap();
            assert_eq!(cfg.experiment, name);
            cfg.validate().unwrap();
        }
        assert!(default_config("nope", 0).is_err());
        let mut cfg = default_config("coupling_check", 0).unwrap();
        cfg.experiment = "nope".into();
        assert!(run(&cfg).is_err());
    }
}
