//! Goodness-of-fit tests and summary statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Default p-value floor for chi-square tests.
pub const P_VALUE_FLOOR: f64 = 1e-3;
/// Smallest expected count allowed in a chi-square bin.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for reference only; never affects the exit status.
    Info,
}

/// Outcome of one statistical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub n_samples: usize,
    pub verdict: Verdict,
}

impl TestReport {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64, n: usize) -> Self {
        Self::build(name, statistic, threshold, None, n, statistic <= threshold)
    }

    /// Passes when `statistic >= threshold`.
    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64, n: usize) -> Self {
        Self::build(name, statistic, threshold, None, n, statistic >= threshold)
    }

    /// Passes when `|estimate - target| <= tolerance`; the statistic is the
    /// absolute deviation.
    pub fn within(
        name: impl Into<String>,
        estimate: f64,
        target: f64,
        tolerance: f64,
        n: usize,
    ) -> Self {
        let dev = (estimate - target).abs();
        Self::build(name, dev, tolerance, None, n, dev <= tolerance)
    }

    /// Passes when `p_value > floor`.
    pub fn p_value_above(
        name: impl Into<String>,
        statistic: f64,
        p_value: f64,
        floor: f64,
        n: usize,
    ) -> Self {
        Self::build(name, statistic, floor, Some(p_value), n, p_value > floor)
    }

    pub fn info(name: impl Into<String>, statistic: f64, p_value: Option<f64>, n: usize) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            threshold: f64::NAN,
            p_value,
            n_samples: n,
            verdict: Verdict::Info,
        }
    }

    /// Turns a pass/fail report into an informational one.
    pub fn as_info(mut self) -> Self {
        self.verdict = Verdict::Info;
        self
    }

    fn build(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        p_value: Option<f64>,
        n: usize,
        pass: bool,
    ) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            threshold,
            p_value,
            n_samples: n,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Chi-square statistic and p-value after merging bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub bins: usize,
}

impl ChiSquare {
    pub fn report(&self, name: impl Into<String>, n: usize) -> TestReport {
        TestReport::p_value_above(name, self.statistic, self.p_value, P_VALUE_FLOOR, n)
    }
}

fn chi2_sf(statistic: f64, df: usize) -> Result<f64> {
    let law = ChiSquared::new(df as f64).map_err(|e| Error::Stats(e.to_string()))?;
    Ok(law.sf(statistic))
}

/// Groups consecutive indices until `enough` holds for each group;
/// a short tail is folded into the last group.
fn merge_groups(len: usize, mut enough: impl FnMut(&[usize]) -> bool) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for i in 0..len {
        current.push(i);
        if enough(&current) {
            groups.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        match groups.last_mut() {
            Some(last) => last.extend(current),
            None => groups.push(current),
        }
    }
    groups
}

/// Pearson goodness-of-fit test of `observed` counts against cell
/// probabilities `expected`, merging adjacent cells until every expected
/// count is at least [`MIN_EXPECTED`].
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() {
        return Err(Error::Stats(format!(
            "{} observed cells but {} probabilities",
            observed.len(),
            expected.len()
        )));
    }
    if expected.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::Stats("probabilities must be finite and non-negative".into()));
    }
    let total_p: f64 = expected.iter().sum();
    if (total_p - 1.0).abs() > 1e-9 {
        return Err(Error::Stats(format!("probabilities sum to {total_p}, not 1")));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::Stats("no observations".into()));
    }
    if observed.iter().zip(expected).any(|(&o, &p)| o > 0 && p == 0.0) {
        // an observation outside the support rejects outright
        return Ok(ChiSquare {
            statistic: f64::INFINITY,
            df: expected.len().saturating_sub(1).max(1),
            p_value: 0.0,
            bins: expected.len(),
        });
    }
    let nf = n as f64;
    let groups = merge_groups(expected.len(), |g| {
        g.iter().map(|&i| expected[i]).sum::<f64>() * nf >= MIN_EXPECTED
    });
    let cells: Vec<(f64, f64)> = groups
        .iter()
        .map(|g| {
            (
                g.iter().map(|&i| observed[i] as f64).sum(),
                g.iter().map(|&i| expected[i]).sum::<f64>() * nf,
            )
        })
        .collect();
    if cells.len() < 2 || cells.iter().any(|&(_, e)| e < MIN_EXPECTED) {
        return Err(Error::Stats(
            "degenerate bins: fewer than two cells with enough expected count".into(),
        ));
    }
    let statistic = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let df = cells.len() - 1;
    Ok(ChiSquare { statistic, df, p_value: chi2_sf(statistic, df)?, bins: cells.len() })
}

/// Chi-square test of homogeneity between two histograms on the same cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() {
        return Err(Error::Stats("histograms have different lengths".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Stats("no observations".into()));
    }
    let total = na + nb;
    let min_row = na.min(nb);
    let groups = merge_groups(a.len(), |g| {
        let col: u64 = g.iter().map(|&i| a[i] + b[i]).sum();
        col as f64 * min_row / total >= MIN_EXPECTED
    });
    let mut statistic = 0.0;
    let mut cells = 0;
    for g in &groups {
        let oa: f64 = g.iter().map(|&i| a[i] as f64).sum();
        let ob: f64 = g.iter().map(|&i| b[i] as f64).sum();
        let col = oa + ob;
        let (ea, eb) = (col * na / total, col * nb / total);
        if ea.min(eb) < MIN_EXPECTED {
            return Err(Error::Stats("degenerate bins in two-sample test".into()));
        }
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::Stats("degenerate bins: fewer than two cells".into()));
    }
    let df = cells - 1;
    Ok(ChiSquare { statistic, df, p_value: chi2_sf(statistic, df)?, bins: cells })
}

/// Asymptotic Kolmogorov p-value `P(sqrt(n) D > sqrt(n) d)` for effective
/// sample size `n`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Histogram of values `0..len`, with everything at or above `len - 1`
/// counted in the last cell.
pub fn histogram(values: impl IntoIterator<Item = usize>, len: usize) -> Vec<u64> {
    let mut h = vec![0u64; len];
    for v in values {
        h[v.min(len - 1)] += 1;
    }
    h
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        MeanEstimate { mean, se: (var / n as f64).sqrt(), n }
    }

    /// Normal 95% confidence interval.
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.se, self.mean + 1.96 * self.se)
    }

    /// Distance between two means in units of the pooled standard error.
    pub fn z_distance(&self, other: &MeanEstimate) -> f64 {
        let pooled = (self.se * self.se + other.se * other.se).sqrt();
        if pooled == 0.0 {
            if self.mean == other.mean {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - other.mean).abs() / pooled
        }
    }
}

/// Empirical quantile by the nearest-rank rule.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Sample covariance of paired observations.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (n - 1) as f64
}

/// Standard error of the sample covariance, estimated from the spread of
/// the centred products.
pub fn covariance_se(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let prods: Vec<f64> = xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    MeanEstimate::of(&prods).se
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_match_gives_zero_statistic() {
        let r = chi_square_test(&[25, 25, 50], &[0.25, 0.25, 0.5]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(r.df, 2);
    }

    #[test]
    fn disjoint_support_gives_tiny_p_value() {
        let r = chi_square_test(&[1000, 0], &[0.0, 1.0]).unwrap();
        assert!(r.p_value < 1e-12);
    }

    #[test]
    fn small_cells_are_merged() {
        let p = [0.5, 0.3, 0.1, 0.05, 0.03, 0.02];
        let r = chi_square_test(&[50, 30, 10, 5, 3, 2], &p).unwrap();
        // with n = 100 the last two cells (3 and 2 expected) fold together
        assert_eq!(r.bins, 5);
        let r = chi_square_test(&[50, 30, 10, 5, 3, 2], &[0.5, 0.3, 0.1, 0.04, 0.04, 0.02]).unwrap();
        assert_eq!(r.bins, 4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(chi_square_test(&[1, 2], &[0.5]).is_err());
        assert!(chi_square_test(&[1, 2], &[0.5, 0.6]).is_err());
        assert!(chi_square_test(&[0, 0], &[0.5, 0.5]).is_err());
        assert!(chi_square_test(&[3, 2], &[0.5, 0.5]).is_err());
        assert!(chi_square_test(&[3, 2], &[-0.5, 1.5]).is_err());
        assert!(chi_square_two_sample(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn null_p_values_are_uniform() {
        let probs = [0.1, 0.2, 0.3, 0.4];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ps: Vec<f64> = (0..1000)
            .map(|_| {
                let mut counts = [0u64; 4];
                for _ in 0..500 {
                    let u: f64 = rng.random();
                    let cell = if u < 0.1 {
                        0
                    } else if u < 0.3 {
                        1
                    } else if u < 0.6 {
                        2
                    } else {
                        3
                    };
                    counts[cell] += 1;
                }
                chi_square_test(&counts, &probs).unwrap().p_value
            })
            .collect();
        ps.sort_unstable_by(f64::total_cmp);
        let ks = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| ((i + 1) as f64 / 1000.0 - p).abs().max((p - i as f64 / 1000.0).abs()))
            .fold(0.0, f64::max);
        assert!(ks <= 0.05, "{ks}");
    }

    #[test]
    fn two_sample_homogeneity() {
        let same = chi_square_two_sample(&[100, 200, 300], &[100, 200, 300]).unwrap();
        assert!(same.statistic.abs() < 1e-12);
        let diff = chi_square_two_sample(&[300, 200, 100], &[100, 200, 300]).unwrap();
        assert!(diff.p_value < 1e-12);
    }

    #[test]
    fn kolmogorov_p_values() {
        assert!((ks_p_value(0.0, 100.0) - 1.0).abs() < 1e-12);
        // 1.36 / sqrt(n) is the classical 5% critical value
        let p = ks_p_value(1.358 / 1000f64.sqrt(), 1000.0);
        assert!((p - 0.05).abs() < 0.005, "{p}");
    }

    #[test]
    fn report_verdicts() {
        assert!(TestReport::at_most("a", 0.01, 0.05, 10).passed());
        assert!(!TestReport::at_most("a", 0.06, 0.05, 10).passed());
        assert!(TestReport::within("b", 0.52, 0.5, 0.03, 10).passed());
        assert!(!TestReport::within("b", 0.54, 0.5, 0.03, 10).passed());
        assert!(TestReport::at_least("c", 0.95, 0.9, 1).passed());
        assert!(TestReport::at_most("d", 1.0, 0.0, 1).as_info().passed());
        let json = serde_json::to_value(TestReport::p_value_above("e", 3.0, 0.2, 1e-3, 5)).unwrap();
        assert_eq!(json["verdict"], "pass");
        assert_eq!(json["p_value"], 0.2);
        for key in ["name", "statistic", "threshold", "p_value", "n_samples", "verdict"] {
            assert!(json.get(key).is_some());
        }
    }

    #[test]
    fn summaries() {
        let m = MeanEstimate::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.99), 4.0);
        assert!((covariance(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-15);
        assert_eq!(histogram([0, 1, 1, 7], 3), vec![1, 2, 1]);
    }
}
