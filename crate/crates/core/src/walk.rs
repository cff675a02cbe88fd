//! The heavy-tailed walk with step law `P(ξ = k) = 1/(k(k+1))`, discrete
//! stick-breaking, and the law of subtree sizes in a random recursive tree.

use alloc::vec;
use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;

use crate::cut_tree::build_cut_tree;
use crate::dynamics::draw_edge_randomness;
use crate::tree::generate_recursive_tree;
use crate::{Error, Result};

/// `⌊1/u⌋` for `u ∈ (0, 1]`, saturating at `u64::MAX`.
pub fn xi_from_uniform(u: f64) -> Result<u64> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::invalid("xi needs a uniform value in (0, 1]"));
    }
    let x = libm::floor(1.0 / u);
    Ok(if x >= u64::MAX as f64 { u64::MAX } else { x as u64 })
}

/// One draw of `ξ`, with `P(ξ = k) = 1/(k(k+1))` for `k ≥ 1`.
pub fn sample_xi<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    let u: f64 = rng.sample(Open01);
    xi_from_uniform(u).expect("Open01 never returns 0")
}

/// A walk `S_j = ξ_1 + … + ξ_j` stopped at its last passage below a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    /// `ξ_1, …, ξ_λ`.
    pub steps: Vec<u64>,
    /// `λ(n) = max{j ≥ 1 : S_j < n}`, or 0 when `ξ_1 ≥ n`.
    pub lambda: usize,
    /// `n − S_λ`; equal to `n` in the degenerate case.
    pub undershoot: u64,
    /// Set when already `ξ_1 ≥ n`, so that `λ(n)` is undefined.
    pub degenerate: bool,
    level: u64,
}

impl WalkPath {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// `S_j` for `0 ≤ j ≤ λ`.
    pub fn partial_sum(&self, j: usize) -> u64 {
        self.steps[..j].iter().sum()
    }

    pub fn partial_sums(&self) -> Vec<u64> {
        self.steps
            .iter()
            .scan(0u64, |s, &x| {
                *s += x;
                Some(*s)
            })
            .collect()
    }
}

/// Draws steps until the partial sum reaches `n`.
pub fn run_walk_to<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<WalkPath> {
    if n < 2 {
        return Err(Error::invalid("the walk level must be at least 2"));
    }
    let mut steps = Vec::new();
    let mut sum = 0u64;
    loop {
        let x = sample_xi(rng);
        if x >= n - sum {
            break;
        }
        sum += x;
        steps.push(x);
    }
    let lambda = steps.len();
    Ok(WalkPath {
        steps,
        lambda,
        undershoot: n - sum,
        degenerate: lambda == 0,
        level: n,
    })
}

/// `S_k` for a fresh walk; saturates rather than overflowing.
pub fn walk_partial_sum<R: Rng + ?Sized>(k: usize, rng: &mut R) -> u64 {
    (0..k).fold(0u64, |s, _| s.saturating_add(sample_xi(rng)))
}

/// Scaled steps `(ln n / n) ξ_i` of the path that exceed `eps`.
pub fn max_step_measure(path: &WalkPath, n: u64, eps: f64) -> Vec<f64> {
    let scale = libm::log(n as f64) / n as f64;
    path.steps
        .iter()
        .map(|&x| x as f64 * scale)
        .filter(|&y| y > eps)
        .collect()
}

/// Default threshold for [`max_step_measure`].
pub const MAX_STEP_EPS: f64 = 0.1;

/// A composition of `n`: part `i` is uniform on `1..=` what is left after
/// the previous parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StickBreaking {
    parts: Vec<usize>,
}

impl StickBreaking {
    pub fn from_parts(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::invalid("stick-breaking parts must be positive and non-empty"));
        }
        Ok(StickBreaking { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Index of the last part.
    pub fn kappa(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

pub fn stick_breaking<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StickBreaking> {
    if n == 0 {
        return Err(Error::invalid("stick-breaking needs n >= 1"));
    }
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.random_range(1..=left);
        parts.push(s);
        left -= s;
    }
    Ok(StickBreaking { parts })
}

/// Returns a part with probability proportional to its size.
pub fn size_biased_pick<R: Rng + ?Sized>(sticks: &StickBreaking, rng: &mut R) -> usize {
    let mut u = rng.random_range(0..sticks.total());
    for &s in &sticks.parts {
        if u < s {
            return s;
        }
        u -= s;
    }
    unreachable!("u is below the total")
}

/// `ln k!` for `k ≤ max`, accumulated in double-double.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl LogFactorials {
    pub fn new(max: usize) -> Self {
        let mut hi = vec![0.0; max + 1];
        let mut lo = vec![0.0; max + 1];
        let (mut h, mut l) = (0.0, 0.0);
        for k in 2..=max {
            let (s, e) = two_sum(h, libm::log(k as f64));
            let (s, e2) = two_sum(s, e + l);
            h = s;
            l = e2;
            hi[k] = h;
            lo[k] = l;
        }
        LogFactorials { hi, lo }
    }

    pub fn max(&self) -> usize {
        self.hi.len() - 1
    }

    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.hi[k] + self.lo[k]
    }

    /// `ln(a!/b!)` without cancellation loss in the high part.
    pub fn ln_ratio(&self, a: usize, b: usize) -> f64 {
        (self.hi[a] - self.hi[b]) + (self.lo[a] - self.lo[b])
    }

    /// `ln((a!/b!) / (c!/d!))`, with the high parts combined exactly so
    /// that only the final result is rounded.
    pub fn ln_ratio_of_ratios(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let (x, xe) = two_sum(self.hi[a], -self.hi[b]);
        let (y, ye) = two_sum(self.hi[c], -self.hi[d]);
        let (z, ze) = two_sum(x, -y);
        z + (ze + (xe - ye) + ((self.lo[a] - self.lo[b]) - (self.lo[c] - self.lo[d])))
    }

    /// `P(|τ_n(v)| = ℓ + 1)` for the subtree `τ_n(v)` rooted at `v` in a
    /// random recursive tree on `n` vertices.
    pub fn subtree_size_pmf(&self, n: usize, v: usize, ell: usize) -> Result<f64> {
        check_subtree_args(n, v, ell)?;
        if n - 1 > self.max() {
            return Err(Error::TooLarge { n, max: self.max() + 1 });
        }
        let ln = libm::log((v - 1) as f64)
            + self.ln_ratio_of_ratios(n - v, n - v - ell, n - 1, n - ell - 2);
        Ok(libm::exp(ln))
    }

    /// The whole pmf of `|τ_n(v)| - 1` on `0..=n-v`.
    pub fn subtree_size_law(&self, n: usize, v: usize) -> Result<Vec<f64>> {
        (0..=n.saturating_sub(v))
            .map(|ell| self.subtree_size_pmf(n, v, ell))
            .collect()
    }
}

fn check_subtree_args(n: usize, v: usize, ell: usize) -> Result<()> {
    if v < 2 || v > n {
        return Err(Error::invalid("subtree law needs 2 <= v <= n"));
    }
    if ell > n - v {
        return Err(Error::invalid("subtree law needs ell <= n - v"));
    }
    Ok(())
}

/// One-off evaluation of the beta-binomial subtree law
/// `(v−1) (n−v)!/(n−v−ℓ)! · (n−ℓ−2)!/(n−1)!`.
pub fn beta_binomial_pmf(n: usize, v: usize, ell: usize) -> Result<f64> {
    check_subtree_args(n, v, ell)?;
    LogFactorials::new(n).subtree_size_pmf(n, v, ell)
}

/// `h(X) + Σ_i ζ_i(|T_i|)` for a uniform vertex `X` of a fresh random
/// recursive tree on `n` vertices, where the `T_i` are the pieces of its
/// spinal decomposition and each `ζ_i` is the root-isolation cut count of
/// an independent random recursive tree of that size.
pub fn spine_cut_count<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<usize> {
    let tree = generate_recursive_tree(n, rng)?;
    let x = rng.random_range(1..=n);
    let spine = tree.spinal_decomposition(x)?;
    let mut total = spine.height();
    for &size in &spine.component_sizes {
        total += zeta_of_fresh_tree(size, rng)?;
    }
    Ok(total)
}

/// `ζ(k)` of an independent random recursive tree on `k` vertices.
pub fn zeta_of_fresh_tree<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<usize> {
    if k == 1 {
        return Ok(0);
    }
    let t = generate_recursive_tree(k, rng)?;
    let r = draw_edge_randomness(&t, 0.0, rng)?;
    Ok(build_cut_tree(&t, &r)?.zeta())
}

/// `trials` independent values of `(ln n / n)(h(X) + Σ ζ_i(|T_i|))`.
pub fn spine_cut_count_estimate<R: Rng + ?Sized>(
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let scale = libm::log(n as f64) / n as f64;
    (0..trials)
        .map(|_| spine_cut_count(n, rng).map(|c| c as f64 * scale))
        .collect()
}
