//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs every criterion at full size; expect a long run on a single core.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use firetree::experiments::{default_config, run};
use firetree::{ExperimentConfig, ExperimentReport, Regime, Result};

const SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

fn config(name: &str, n: usize, regime: Regime, trials: usize) -> Result<ExperimentConfig> {
    let mut cfg = default_config(name, SEED)?;
    cfg.n = n;
    cfg.regime = regime;
    cfg.trials = trials;
    Ok(cfg)
}

fn timed(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Duration)> {
    let start = Instant::now();
    let report = run(cfg)?;
    Ok((report, start.elapsed()))
}

/// Checks the named tests of a report; a missing test counts as a failure.
fn check(report: &ExperimentReport, names: &[&str], detail: &mut Vec<String>) -> bool {
    let mut ok = true;
    for &name in names {
        match report.test(name) {
            Some(t) => {
                ok &= t.passed();
                let pv = t.p_value.map_or(String::new(), |p| format!(", p={p:.4}"));
                let mark = if t.passed() { "ok" } else { "FAILED" };
                detail.push(format!("{name}={:.4} vs {:.4}{pv} {mark}", t.statistic, t.threshold));
            }
            None => {
                ok = false;
                detail.push(format!("{name} missing"));
            }
        }
    }
    ok
}

/// Every graded test of the report.
fn check_all(report: &ExperimentReport, detail: &mut Vec<String>) -> bool {
    let failures: Vec<String> = report.failures().map(|t| t.name.clone()).collect();
    let graded = report.tests.iter().filter(|t| t.verdict != firetree::Verdict::Info).count();
    detail.push(format!("{}/{} tests passed", graded - failures.len(), graded));
    if !failures.is_empty() {
        detail.push(format!("failed: {}", failures.join(", ")));
    }
    failures.is_empty()
}

fn within_time(elapsed: Duration, limit: Duration, detail: &mut Vec<String>) -> bool {
    detail.push(format!("{:.1}s of {}s", elapsed.as_secs_f64(), limit.as_secs()));
    elapsed <= limit
}

fn finish(ok: bool, detail: Vec<String>) -> Outcome {
    Outcome { passed: ok, detail: detail.join("; ") }
}

fn coupling() -> Result<Outcome> {
    let (r, t) = timed(&config("coupling_check", 500, Regime::Critical { c: 1.0 }, 1000)?)?;
    let mut d = Vec::new();
    let ok = check(&r, &["coupling_mismatches"], &mut d) & within_time(t, Duration::from_secs(60), &mut d);
    Ok(finish(ok, d))
}

fn oracle() -> Result<Outcome> {
    let (r, t) = timed(&config("oracle_check", 6, Regime::Explicit { p: 0.4 }, 1_000_000)?)?;
    let mut d = Vec::new();
    let ok = check_all(&r, &mut d) & within_time(t, Duration::from_secs(300), &mut d);
    Ok(finish(ok && r.tests.len() == 45, d))
}

fn exact_laws() -> Result<Outcome> {
    let (r, _) = timed(&config("exact_laws", 100, Regime::Explicit { p: 0.1 }, 100_000)?)?;
    let mut d = Vec::new();
    let ok = check(
        &r,
        &[
            "chi2_theta_1_truncated_geometric",
            "chi2_size_biased_pick_uniform",
            "chi2_subtree_size_beta_binomial",
            "p_ancestor_height_at_least_1",
            "chi2_ancestor_height_at_least_1",
        ],
        &mut d,
    );
    Ok(finish(ok, d))
}

fn moment_identity() -> Result<Outcome> {
    let (r, _) = timed(&config("moment_identity", 1000, Regime::Explicit { p: 0.01 }, 20_000)?)?;
    let mut d = Vec::new();
    let ok = check(&r, &["moment_1_identity_pooled_se", "moment_2_identity_pooled_se"], &mut d);
    Ok(finish(ok, d))
}

fn phase_transition() -> Result<Outcome> {
    let n = 100_000usize;
    let ln = (n as f64).ln();
    let runs = [
        (Regime::Explicit { p: 1.0 / n as f64 }, 500, "mean_I_over_n_supercritical"),
        (Regime::Explicit { p: ln * ln / n as f64 }, 500, "mean_I_over_n_subcritical"),
        (Regime::Critical { c: 1.0 }, 2000, "ks_I_over_n_vs_eps_c_min_1"),
    ];
    let mut d = Vec::new();
    let mut ok = true;
    let mut total = Duration::ZERO;
    for (regime, trials, test) in runs {
        let (r, t) = timed(&config("phase_transition", n, regime, trials)?)?;
        total += t;
        ok &= check(&r, &[test], &mut d);
    }
    ok &= within_time(total, Duration::from_secs(600), &mut d);
    Ok(finish(ok, d))
}

fn subcritical_scaling() -> Result<Outcome> {
    let (r, _) = timed(&config("subcritical_scaling", 1_000_000, Regime::Subcritical { a: 0.5 }, 1000)?)?;
    let mut d = Vec::new();
    let ok = check(&r, &["ks_scaled_I_vs_exp1"], &mut d);
    Ok(finish(ok, d))
}

fn connectivity() -> Result<Outcome> {
    let (r, _) = timed(&config("connectivity", 100_000, Regime::Critical { c: 1.0 }, 2000)?)?;
    let mut d = Vec::new();
    let ok = check(&r, &["p_same_component", "estimators_agree_pooled_se"], &mut d);
    Ok(finish(ok, d))
}

fn burnt_sequence() -> Result<Outcome> {
    let (r, _) = timed(&config("burnt_sequence", 100_000, Regime::Critical { c: 1.0 }, 5000)?)?;
    let mut d = Vec::new();
    let mut names = vec!["ks_theta_1_vs_gamma_1".to_string(), "chi2_root_fire_index".to_string()];
    names.extend((1..=5).map(|j| format!("q_{j}_series_vs_monte_carlo_se")));
    names.push("q_30_vs_exp_minus_c".to_string());
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let ok = check(&r, &names, &mut d);
    Ok(finish(ok, d))
}

fn walk_laws() -> Result<Outcome> {
    let mut d = Vec::new();
    let (walks, _) = timed(&config("walk_laws", 1_000_000, Regime::Critical { c: 1.0 }, 1000)?)?;
    let mut ok = check(&walks, &["mean_scaled_lambda", "mean_steps_in_0.5_1"], &mut d);
    let (cuts, _) = timed(&config("cut_tree_laws", 100_000, Regime::Critical { c: 1.0 }, 2000)?)?;
    ok &= check(&cuts, &["mean_scaled_zeta", "second_moment_scaled_zeta"], &mut d);
    Ok(finish(ok, d))
}

fn determinism() -> Result<Outcome> {
    let cases = [
        config("phase_transition", 20_000, Regime::Critical { c: 1.0 }, 200)?,
        config("cut_tree_laws", 5_000, Regime::Critical { c: 1.0 }, 100)?,
        config("walk_laws", 100_000, Regime::Critical { c: 1.0 }, 100)?,
    ];
    let mut d = Vec::new();
    let mut ok = true;
    for cfg in cases {
        let mut outputs = Vec::new();
        for workers in [1, 8, 1, 8] {
            outputs.push(run(&cfg.clone().with_workers(workers))?.csv_bytes()?);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        d.push(format!("{} {} bytes {}", cfg.experiment, outputs[0].len(), if same { "identical" } else { "DIFFER" }));
        ok &= same;
    }
    Ok(finish(ok, d))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("exact coupling of cut-tree marks and direct dynamics", coupling),
        ("Monte Carlo against the brute-force oracle", oracle),
        ("exact finite-n laws", exact_laws),
        ("moment identity through reduced trees", moment_identity),
        ("phase transition of the fireproof density", phase_transition),
        ("subcritical scaling of the fireproof count", subcritical_scaling),
        ("root and uniform vertex in one fireproof subtree", connectivity),
        ("fire times and root fire index", burnt_sequence),
        ("walk and cut-tree laws", walk_laws),
        ("determinism across worker counts", determinism),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.passed);
        println!(
            "[{tag}] criterion {}: {title} ({:.0}s) {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
