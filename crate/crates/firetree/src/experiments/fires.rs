//! Experiments on the fire dynamics of large random recursive trees.

use firetree_core::laws::{ks_statistic, q_j, root_burn_index_law, ReferenceLaw};
use firetree_core::walk::spine_cut_count;
use rand::Rng;
use serde_json::json;

use super::{ln, simulate, strings};
use crate::config::{ExperimentConfig, RegimeClass};
use crate::error::config;
use crate::report::ExperimentReport;
use crate::runner::{run_trials, trial_rng};
use crate::stats::{chi_square_test, histogram, ks_p_value, quantile, MeanEstimate, TestReport};
use crate::textio::OutcomeRow;
use crate::Result;

/// Runs the dynamics once per trial and keeps the summary rows.
fn outcome_trials(cfg: &ExperimentConfig, p: f64) -> Result<Vec<OutcomeRow>> {
    run_trials(cfg.trials, cfg.seed, cfg.workers, |i, seed, rng| {
        let (_, _, out) = simulate(cfg.n, p, rng)?;
        Ok(OutcomeRow::new(i, seed, p, &out, cfg.k))
    })
}

fn outcome_report(cfg: &ExperimentConfig, p: f64, rows: &[OutcomeRow]) -> ExperimentReport {
    let mut rep = ExperimentReport::new(cfg, Some(p), OutcomeRow::header(cfg.k));
    rep.rows = rows.iter().map(|r| r.record(cfg.k)).collect();
    rep
}

fn note_mean(rep: &mut ExperimentReport, key: &str, m: &MeanEstimate) {
    let (lo, hi) = m.ci95();
    rep.note(key, json!({ "mean": m.mean, "se": m.se, "ci95": [lo, hi], "n": m.n }));
}

fn ks_with_p(sample: &[f64], law: &ReferenceLaw) -> Result<(f64, f64)> {
    let d = ks_statistic(sample, law)?;
    Ok((d, ks_p_value(d, sample.len() as f64)))
}

/// Proportion of fireproof vertices across the three regimes.
pub fn phase_transition(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let rows = outcome_trials(cfg, p)?;
    let mut rep = outcome_report(cfg, p, &rows);
    let n = cfg.n as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.fireproof as f64 / n).collect();
    let m = MeanEstimate::of(&xs);
    note_mean(&mut rep, "I_over_n", &m);
    match cfg.class() {
        RegimeClass::Supercritical => {
            rep.push(TestReport::at_least("mean_I_over_n_supercritical", m.mean, 0.9, xs.len()))
        }
        RegimeClass::Subcritical => {
            rep.push(TestReport::at_most("mean_I_over_n_subcritical", m.mean, 0.1, xs.len()))
        }
        RegimeClass::Critical { c } => {
            let law = ReferenceLaw::TruncatedExpWithAtom { c };
            let d = ks_statistic(&xs, &law)?;
            rep.note("reference_mean", law.mean());
            rep.push(TestReport::at_most("ks_I_over_n_vs_eps_c_min_1", d, 0.05, xs.len()));
        }
    }
    Ok(rep)
}

/// `p I / ln(1/p)` against its exponential limit.
pub fn subcritical_scaling(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let rows = outcome_trials(cfg, p)?;
    let mut rep = outcome_report(cfg, p, &rows);
    let scale = p / (1.0 / p).ln();
    let xs: Vec<f64> = rows.iter().map(|r| r.fireproof as f64 * scale).collect();
    note_mean(&mut rep, "scaled_I", &MeanEstimate::of(&xs));
    match cfg.class() {
        RegimeClass::Critical { c } => {
            // (ε_1 ∧ c) / c has the law of ε_c ∧ 1
            let ys: Vec<f64> = xs.iter().map(|x| x / c).collect();
            let d = ks_statistic(&ys, &ReferenceLaw::TruncatedExpWithAtom { c })?;
            rep.push(TestReport::at_most("ks_scaled_I_vs_eps1_min_c", d, 0.1, xs.len()));
        }
        class => {
            let (d, pv) = ks_with_p(&xs, &ReferenceLaw::Exponential { rate: 1.0 })?;
            let t = TestReport::at_most("ks_scaled_I_vs_exp1", d, 0.1, xs.len());
            rep.note("ks_p_value", pv);
            rep.push(if class == RegimeClass::Subcritical { t } else { t.as_info() });
        }
    }
    Ok(rep)
}

/// Joint behaviour of the root's fate, `I/n` and the root's burnt block.
pub fn root_component(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let rows = outcome_trials(cfg, p)?;
    let mut rep = outcome_report(cfg, p, &rows);
    let n = cfg.n as f64;
    let burnt: Vec<&OutcomeRow> = rows.iter().filter(|r| r.root_fire_index.is_some()).collect();
    let p_burn = burnt.len() as f64 / rows.len() as f64;
    let sums: Vec<f64> = burnt
        .iter()
        .map(|r| (r.fireproof + r.root_burnt_size) as f64 / n)
        .collect();
    let m = MeanEstimate::of(&sums);
    rep.note("p_root_burns", p_burn);
    note_mean(&mut rep, "I_plus_b0_over_n_given_root_burnt", &m);
    let b0: Vec<f64> = burnt.iter().map(|r| r.root_burnt_size as f64 / n).collect();
    note_mean(&mut rep, "b0_over_n_given_root_burnt", &MeanEstimate::of(&b0));
    let (target, graded) = match cfg.class() {
        RegimeClass::Critical { c } => (-(-c).exp_m1(), true),
        RegimeClass::Supercritical => (0.0, false),
        RegimeClass::Subcritical => (1.0, false),
    };
    let t1 = TestReport::within("p_root_burns", p_burn, target, 0.03, rows.len());
    let t2 = TestReport::within("mean_I_plus_b0_given_root_burnt", m.mean, 1.0, 0.05, sums.len());
    rep.push(if graded { t1 } else { t1.as_info() });
    rep.push(if graded { t2 } else { t2.as_info() });
    Ok(rep)
}

/// Probability that the root and a uniform vertex share a fireproof subtree,
/// directly and through the spinal decomposition identity.
pub fn connectivity(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let log_keep = (-p).ln_1p();
    let results = run_trials(cfg.trials, cfg.seed, cfg.workers, |i, seed, rng| {
        let (tree, _, out) = simulate(cfg.n, p, rng)?;
        let x = rng.random_range(1..=cfg.n);
        let same = out.same_fireproof_component(&tree, 1, x)?;
        let cuts = spine_cut_count(cfg.n, rng)?;
        let weight = (log_keep * cuts as f64).exp();
        Ok((i, seed, x, same, cuts, weight))
    })?;
    let mut rep = ExperimentReport::new(
        cfg,
        Some(p),
        strings(["trial", "n", "p", "seed", "x", "same_component", "spine_cuts", "spine_weight"]),
    );
    for &(i, seed, x, same, cuts, w) in &results {
        rep.rows.push(vec![
            i.to_string(),
            cfg.n.to_string(),
            p.to_string(),
            seed.to_string(),
            x.to_string(),
            (same as u8).to_string(),
            cuts.to_string(),
            w.to_string(),
        ]);
    }
    let direct: Vec<f64> = results.iter().map(|r| r.3 as u8 as f64).collect();
    let spine: Vec<f64> = results.iter().map(|r| r.5).collect();
    let scaled: Vec<f64> = results.iter().map(|r| r.4 as f64 * ln(cfg.n) / cfg.n as f64).collect();
    let (md, ms) = (MeanEstimate::of(&direct), MeanEstimate::of(&spine));
    note_mean(&mut rep, "direct", &md);
    note_mean(&mut rep, "spine_identity", &ms);
    let m1 = MeanEstimate::of(&scaled);
    let second: Vec<f64> = scaled.iter().map(|x| x * x).collect();
    let m2 = MeanEstimate::of(&second);
    note_mean(&mut rep, "scaled_spine_cuts", &m1);
    note_mean(&mut rep, "scaled_spine_cuts_second_moment", &m2);
    let len = direct.len();
    rep.push(TestReport::within("mean_scaled_spine_cuts", m1.mean, 1.0, 0.1, len));
    rep.push(TestReport::within("second_moment_scaled_spine_cuts", m2.mean, 1.0, 0.2, len));
    match cfg.class() {
        RegimeClass::Critical { c } => {
            rep.note("target", (-c).exp());
            rep.push(TestReport::within("p_same_component", md.mean, (-c).exp(), 0.05, len));
        }
        RegimeClass::Supercritical => {
            rep.push(TestReport::at_least("p_same_component", md.mean, 0.9, len));
        }
        RegimeClass::Subcritical => {
            rep.push(TestReport::info("p_same_component", md.mean, None, len));
        }
    }
    rep.push(TestReport::at_most("estimators_agree_pooled_se", md.z_distance(&ms), 3.0, len));
    Ok(rep)
}

/// Size of the largest fireproof subtree under the regime's scaling.
pub fn largest_fireproof(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = cfg.p()?;
    let rows = outcome_trials(cfg, p)?;
    let mut rep = outcome_report(cfg, p, &rows);
    let n = cfg.n as f64;
    let quantiles = |xs: &[f64]| {
        json!({
            "q01": quantile(xs, 0.01), "q10": quantile(xs, 0.1), "q50": quantile(xs, 0.5),
            "q90": quantile(xs, 0.9), "q99": quantile(xs, 0.99),
        })
    };
    let over_n: Vec<f64> = rows.iter().map(|r| r.largest_fireproof as f64 / n).collect();
    rep.note("f1_over_n_quantiles", quantiles(&over_n));
    match cfg.class() {
        RegimeClass::Supercritical => {
            let m = MeanEstimate::of(&over_n);
            note_mean(&mut rep, "f1_over_n", &m);
            rep.push(TestReport::at_least("mean_f1_over_n", m.mean, 0.9, over_n.len()));
        }
        RegimeClass::Subcritical => {
            let scaled: Vec<f64> = rows.iter().map(|r| r.largest_fireproof as f64 * p).collect();
            rep.note("p_f1_quantiles", quantiles(&scaled));
            let q99 = quantile(&scaled, 0.99);
            rep.push(TestReport::at_most("q99_p_times_f1", q99, 50.0, scaled.len()));
        }
        RegimeClass::Critical { .. } => {
            let (fireproof, burnt): (Vec<&OutcomeRow>, Vec<&OutcomeRow>) =
                rows.iter().partition(|r| r.root_fire_index.is_none());
            let a: Vec<f64> = fireproof.iter().map(|r| r.largest_fireproof as f64 / n).collect();
            let b: Vec<f64> = burnt
                .iter()
                .map(|r| r.largest_fireproof as f64 * ln(cfg.n) / n)
                .collect();
            rep.note("root_fireproof_rate", a.len() as f64 / rows.len() as f64);
            rep.note("f1_over_n_given_root_fireproof", quantiles(&a));
            rep.note("f1_log_n_over_n_given_root_burnt", quantiles(&b));
            let m = MeanEstimate::of(&a);
            rep.push(TestReport::at_least(
                "mean_f1_over_n_given_root_fireproof",
                m.mean,
                0.85,
                a.len(),
            ));
        }
    }
    Ok(rep)
}

/// Largest root-fire index whose conditional laws are examined.
pub const CONDITIONAL_MAX_J: usize = 3;
/// Size of the Monte Carlo reference samples for the conditional laws.
pub const REFERENCE_SAMPLES: usize = 20_000;
/// Chains used to cross-check the `q_j` series.
pub const Q_CHAINS: usize = 1_000_000;

/// Draws `count` samples of `(e^{-γ_j}, Z_1..Z_kmax)` under the law of
/// `(γ_i)` tilted by `e^{-γ_j} Π_{i<j} (1 − e^{-γ_i})`, by rejection.
fn tilted_reference<R: Rng + ?Sized>(
    c: f64,
    j: usize,
    kmax: usize,
    count: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let exp = ReferenceLaw::Exponential { rate: c };
    let mut root = Vec::with_capacity(count);
    let mut z = vec![Vec::with_capacity(count); kmax + 1];
    let mut gammas = vec![0.0; kmax + 1];
    while root.len() < count {
        for i in 1..=kmax {
            gammas[i] = gammas[i - 1] + exp.sample(rng)?;
        }
        let weight: f64 =
            (-gammas[j]).exp() * (1..j).map(|i| -(-gammas[i]).exp_m1()).product::<f64>();
        if rng.random::<f64>() >= weight {
            continue;
        }
        root.push((-gammas[j]).exp());
        for i in 1..=kmax {
            if i != j {
                z[i].push(ReferenceLaw::ConditionedExp { rate: gammas[i] }.sample(rng)?);
            }
        }
    }
    Ok((root, z))
}

fn two_sample_report(name: String, a: &[f64], b: &[f64]) -> Result<TestReport> {
    let d = firetree_core::laws::ks_two_sample(a, b)?;
    let eff = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    Ok(TestReport::info(name, d, Some(ks_p_value(d, eff)), a.len()))
}

/// Fire times, the index of the fire that reaches the root and the sizes
/// of the burnt subtrees in the critical regime.
pub fn burnt_sequence(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let RegimeClass::Critical { c } = cfg.class() else {
        return Err(config("burnt_sequence needs a critical regime"));
    };
    if cfg.k < CONDITIONAL_MAX_J + 1 {
        return Err(config(format!("burnt_sequence needs K >= {}", CONDITIONAL_MAX_J + 1)));
    }
    let p = cfg.p()?;
    let rows = outcome_trials(cfg, p)?;
    let mut rep = outcome_report(cfg, p, &rows);
    let (n, log_n) = (cfg.n as f64, ln(cfg.n));
    let total = rows.len();

    for i in 1..=cfg.k {
        let xs: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.thetas.get(i - 1))
            .map(|&t| t as f64 * log_n / n)
            .collect();
        if xs.is_empty() {
            continue;
        }
        let law = ReferenceLaw::Gamma { shape: i as u32, rate: c };
        let (d, pv) = ks_with_p(&xs, &law)?;
        let name = format!("ks_theta_{i}_vs_gamma_{i}");
        rep.push(if i == 1 {
            TestReport::at_most(name, d, 0.05, xs.len())
        } else {
            TestReport::info(name, d, Some(pv), xs.len())
        });
    }

    let first = rows.iter().filter(|r| r.root_fire_index == Some(1)).count() as f64 / total as f64;
    rep.push(TestReport::within("p_root_burns_with_fire_1", first, c / (c + 1.0), 0.03, total));

    let jmax = 5;
    let law = root_burn_index_law(c, jmax)?;
    // cell j - 1 for fire j, last cell for later fires or none
    let observed = histogram(
        rows.iter().map(|r| r.root_fire_index.map_or(jmax, |j| (j - 1).min(jmax))),
        jmax + 1,
    );
    rep.note("root_fire_index_histogram", observed.clone());
    rep.note("root_fire_index_limit_law", law.clone());
    let chi = chi_square_test(&observed, &law)?;
    rep.push(chi.report("chi2_root_fire_index", total));

    let mut rng = trial_rng(cfg.seed, u64::MAX);
    for j in 1..=CONDITIONAL_MAX_J {
        let hits: Vec<&OutcomeRow> = rows.iter().filter(|r| r.root_fire_index == Some(j)).collect();
        rep.note(&format!("acceptance_root_fire_{j}"), hits.len() as f64 / total as f64);
        if hits.len() < 2 {
            continue;
        }
        let (root_ref, z_ref) = tilted_reference(c, j, cfg.k, REFERENCE_SAMPLES, &mut rng)?;
        let b: Vec<f64> = hits.iter().map(|r| r.sizes[j - 1] as f64 / n).collect();
        rep.push(two_sample_report(format!("ks_b{j}_over_n_given_root_fire_{j}"), &b, &root_ref)?);
        for i in (1..=cfg.k.min(j + 2)).filter(|&i| i != j) {
            let logs: Vec<f64> = hits
                .iter()
                .filter_map(|r| r.sizes.get(i - 1))
                .map(|&s| (s as f64).ln() / log_n)
                .collect();
            if logs.len() >= 2 {
                let name = format!("ks_log_b{i}_given_root_fire_{j}");
                rep.push(two_sample_report(name, &logs, &z_ref[i])?);
            }
        }
    }

    let mut sums = [0.0f64; 6];
    let mut squares = [0.0f64; 6];
    let exp = ReferenceLaw::Exponential { rate: c };
    for _ in 0..Q_CHAINS {
        let (mut gamma, mut prod) = (0.0, 1.0);
        for j in 1..=5 {
            gamma += exp.sample(&mut rng)?;
            prod *= -(-gamma).exp_m1();
            sums[j] += prod;
            squares[j] += prod * prod;
        }
    }
    for j in 1..=5 {
        let m = sums[j] / Q_CHAINS as f64;
        let se = ((squares[j] / Q_CHAINS as f64 - m * m) / Q_CHAINS as f64).sqrt();
        let q = q_j(c, j)?;
        rep.push(TestReport::at_most(
            format!("q_{j}_series_vs_monte_carlo_se"),
            (q - m).abs() / se,
            3.0,
            Q_CHAINS,
        ));
    }
    let q30 = q_j(c, 30)?;
    rep.note("q_30", q30);
    rep.push(TestReport::within("q_30_vs_exp_minus_c", q30, (-c).exp(), 1e-3, 0));
    Ok(rep)
}
