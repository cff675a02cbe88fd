//! Experiment configuration and regime resolution.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::config;
use crate::Result;

/// Below this value of `n p / ln n` an explicit `p` counts as supercritical.
pub const SUPERCRITICAL_BELOW: f64 = 0.25;
/// Above this value of `n p / ln n` an explicit `p` counts as subcritical.
pub const SUBCRITICAL_ABOVE: f64 = 4.0;

/// How the fire probability is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regime {
    /// `p = c ln n / n`.
    Critical { c: f64 },
    /// `p = n^{-a}`.
    Subcritical { a: f64 },
    Explicit { p: f64 },
}

/// Which limit theorem applies to a resolved `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum RegimeClass {
    Supercritical,
    Critical { c: f64 },
    Subcritical,
}

impl Regime {
    pub fn p(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            Regime::Critical { c } => c * nf.ln() / nf,
            Regime::Subcritical { a } => nf.powf(-a),
            Regime::Explicit { p } => p,
        }
    }

    /// Critical for an explicit `c`; otherwise decided by `c_eff = n p / ln n`.
    pub fn classify(&self, n: usize) -> RegimeClass {
        if let Regime::Critical { c } = *self {
            return RegimeClass::Critical { c };
        }
        let c_eff = self.p(n) * n as f64 / (n as f64).ln();
        if c_eff <= SUPERCRITICAL_BELOW {
            RegimeClass::Supercritical
        } else if c_eff >= SUBCRITICAL_ABOVE {
            RegimeClass::Subcritical
        } else {
            RegimeClass::Critical { c: c_eff }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n: usize,
    pub regime: Regime,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Number of fires recorded per trial.
    pub k: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: &str, n: usize, regime: Regime, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            n,
            regime,
            trials,
            seed,
            workers: 1,
            out: None,
            k: 8,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// The fire probability, checked to lie in `(0, 1)`.
    pub fn p(&self) -> Result<f64> {
        let p = self.regime.p(self.n);
        if !(p > 0.0 && p < 1.0) {
            return Err(config(format!("resolved p = {p} is not in (0, 1)")));
        }
        Ok(p)
    }

    pub fn class(&self) -> RegimeClass {
        self.regime.classify(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        if self.n < 2 {
            return Err(config("n must be at least 2"));
        }
        if self.workers == 0 {
            return Err(config("workers must be at least 1"));
        }
        match self.regime {
            Regime::Critical { c } if !(c > 0.0 && c.is_finite()) => {
                return Err(config("c must be positive"))
            }
            Regime::Subcritical { a } if !(a > 0.0 && a.is_finite()) => {
                return Err(config("the subcritical exponent must be positive"))
            }
            _ => {}
        }
        self.p().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_and_classes() {
        let n = 100_000;
        let ln = (n as f64).ln();
        assert!((Regime::Critical { c: 1.0 }.p(n) - ln / n as f64).abs() < 1e-18);
        assert!((Regime::Subcritical { a: 0.5 }.p(n) - 1.0 / (n as f64).sqrt()).abs() < 1e-15);
        assert_eq!(Regime::Explicit { p: 1.0 / n as f64 }.classify(n), RegimeClass::Supercritical);
        assert_eq!(Regime::Explicit { p: ln * ln / n as f64 }.classify(n), RegimeClass::Subcritical);
        assert_eq!(Regime::Subcritical { a: 0.5 }.classify(n), RegimeClass::Subcritical);
        match (Regime::Explicit { p: 2.0 * ln / n as f64 }).classify(n) {
            RegimeClass::Critical { c } => assert!((c - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::new("x", 1000, Regime::Critical { c: 1.0 }, 10, 0);
        ok.validate().unwrap();
        let mut bad = ok.clone();
        bad.trials = 0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.regime = Regime::Explicit { p: 1.0 };
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.regime = Regime::Critical { c: -1.0 };
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.n = 1;
        assert!(bad.validate().is_err());
    }
}
