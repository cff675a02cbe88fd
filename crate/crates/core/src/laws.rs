//! Reference limit laws, closed-form constants, Kolmogorov–Smirnov
//! distances and an exhaustive oracle for the dynamics on small trees.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;

use crate::dynamics::check_probability;
use crate::tree::Tree;
use crate::{Error, Result};

/// A limit law with closed-form distribution function and exact sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceLaw {
    /// Exponential with the given rate.
    Exponential { rate: f64 },
    /// `min(ε_c, 1)`: exponential with rate `c` capped at 1, atom `e^{-c}` at 1.
    TruncatedExpWithAtom { c: f64 },
    /// Beta(k, 1), with distribution function `x^k` on `[0, 1]`.
    Beta { k: f64 },
    /// Erlang: sum of `shape` independent exponentials with the given rate.
    Gamma { shape: u32, rate: f64 },
    /// Exponential with the given rate conditioned to be smaller than 1.
    ConditionedExp { rate: f64 },
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("{what} must be positive and finite, got {x}")))
    }
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

fn exp_sample<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    -libm::log(open01(rng)) / rate
}

impl ReferenceLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ReferenceLaw::Exponential { rate } => positive(rate, "rate"),
            ReferenceLaw::TruncatedExpWithAtom { c } => positive(c, "c"),
            ReferenceLaw::Beta { k } => positive(k, "k"),
            ReferenceLaw::Gamma { shape, rate } => {
                if shape == 0 {
                    return Err(Error::invalid("gamma shape must be at least 1"));
                }
                positive(rate, "rate")
            }
            ReferenceLaw::ConditionedExp { rate } => positive(rate, "rate"),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            ReferenceLaw::Exponential { rate } => exp_sample(rate, rng),
            ReferenceLaw::TruncatedExpWithAtom { c } => exp_sample(c, rng).min(1.0),
            ReferenceLaw::Beta { k } => libm::pow(open01(rng), 1.0 / k),
            ReferenceLaw::Gamma { shape, rate } => {
                (0..shape).map(|_| exp_sample(rate, rng)).sum()
            }
            ReferenceLaw::ConditionedExp { rate } => {
                let mass = -libm::expm1(-rate);
                -libm::log1p(-open01(rng) * mass) / rate
            }
        })
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-rate * x)
                }
            }
            ReferenceLaw::TruncatedExpWithAtom { c } => {
                if x >= 1.0 {
                    1.0
                } else if x <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-c * x)
                }
            }
            ReferenceLaw::Beta { k } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    libm::pow(x, k)
                }
            }
            ReferenceLaw::Gamma { shape, rate } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let y = rate * x;
                let mut term = 1.0;
                let mut sum = 1.0;
                for m in 1..shape {
                    term *= y / m as f64;
                    sum += term;
                }
                (1.0 - libm::exp(-y) * sum).max(0.0)
            }
            ReferenceLaw::ConditionedExp { rate } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    libm::expm1(-rate * x) / libm::expm1(-rate)
                }
            }
        }
    }

    /// `P(X < x)`; differs from [`cdf`](Self::cdf) only at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match *self {
            ReferenceLaw::TruncatedExpWithAtom { c } if x == 1.0 => -libm::expm1(-c),
            _ => self.cdf(x),
        }
    }

    /// Atoms as `(location, mass)`.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match *self {
            ReferenceLaw::TruncatedExpWithAtom { c } => vec![(1.0, libm::exp(-c))],
            _ => Vec::new(),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ReferenceLaw::Exponential { rate } => 1.0 / rate,
            ReferenceLaw::TruncatedExpWithAtom { c } => -libm::expm1(-c) / c,
            ReferenceLaw::Beta { k } => k / (k + 1.0),
            ReferenceLaw::Gamma { shape, rate } => shape as f64 / rate,
            ReferenceLaw::ConditionedExp { rate } => {
                1.0 / rate - libm::exp(-rate) / -libm::expm1(-rate)
            }
        }
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `sample` and
/// `law`, exact also when the law has atoms.
pub fn ks_statistic(sample: &[f64], law: &ReferenceLaw) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::invalid("KS statistic of an empty sample"));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("KS statistic of a sample containing NaN"));
    }
    let mut xs = sample.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d
            .max((law.cdf_left(x) - below).abs())
            .max((upto - law.cdf(x)).abs());
        i = j;
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("KS statistic of an empty sample"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `E[(ε_c ∧ 1)^k] = e^{-c} + ∫_0^1 c e^{-cx} x^k dx`.
pub fn moment_eps_min_one(c: f64, k: u32) -> Result<f64> {
    positive(c, "c")?;
    if k == 0 {
        return Err(Error::invalid("moment order must be at least 1"));
    }
    let integral = integrate(
        |x| c * libm::exp(-c * x) * libm::pow(x, k as f64),
        0.0,
        1.0,
        1e-12,
    );
    Ok(libm::exp(-c) + integral)
}

/// `q_j = E[Π_{i ≤ j} (1 − e^{−γ_i})]` where `γ_i` are the points of a
/// rate-`c` Poisson process on the half-line.
///
/// Expanding the product gives a signed sum over subsets `S ⊆ {1..j}` of
/// `Π_m c/(c + #{i ∈ S : i ≥ m})`; it is evaluated by dynamic programming
/// over `m` from `j` down to 1 with state `#{i ∈ S : i ≥ m}`. The sum of
/// absolute values of all terms stays below `e^c`.
pub fn q_j(c: f64, j: usize) -> Result<f64> {
    positive(c, "c")?;
    // w[k]: signed weight of all partial subsets with k chosen indices so far
    let mut w = vec![0.0; j + 1];
    w[0] = 1.0;
    for step in 0..j {
        for k in (0..=step + 1).rev() {
            let keep = if k <= step { w[k] } else { 0.0 };
            let take = if k >= 1 { -w[k - 1] } else { 0.0 };
            w[k] = (keep + take) * (c / (c + k as f64));
        }
    }
    Ok(w.iter().sum())
}

/// Limit probability that the root burns with fire `j`, for `j = 1..=jmax`,
/// followed by the mass `q_{jmax}` of the root surviving the first `jmax` fires.
pub fn root_burn_index_law(c: f64, jmax: usize) -> Result<Vec<f64>> {
    let q: Vec<f64> = (0..=jmax).map(|j| q_j(c, j)).collect::<Result<_>>()?;
    let mut law: Vec<f64> = q.windows(2).map(|w| w[0] - w[1]).collect();
    law.push(q[jmax]);
    Ok(law)
}

/// Joint law of `(I, b0, root fire index)`: fireproof count, size of the
/// burnt block containing the root (0 if the root is fireproof) and the
/// 1-based index of the fire that burns it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExactLaw {
    pub joint: BTreeMap<(usize, usize, Option<usize>), f64>,
}

impl ExactLaw {
    fn marginal<K: Ord>(&self, key: impl Fn(&(usize, usize, Option<usize>)) -> K) -> BTreeMap<K, f64> {
        let mut out = BTreeMap::new();
        for (k, &p) in &self.joint {
            *out.entry(key(k)).or_insert(0.0) += p;
        }
        out
    }

    pub fn i_law(&self) -> BTreeMap<usize, f64> {
        self.marginal(|k| k.0)
    }

    pub fn root_burnt_size_law(&self) -> BTreeMap<usize, f64> {
        self.marginal(|k| k.1)
    }

    pub fn root_fire_index_law(&self) -> BTreeMap<Option<usize>, f64> {
        self.marginal(|k| k.2)
    }

    pub fn total_mass(&self) -> f64 {
        self.joint.values().sum()
    }
}

/// Largest tree accepted by [`brute_force_i_distribution`].
pub const BRUTE_FORCE_MAX_N: usize = 8;
/// Largest size accepted by [`brute_force_avg_over_trees`].
pub const BRUTE_FORCE_AVG_MAX_N: usize = 6;

type Partial = BTreeMap<(usize, usize, Option<usize>), f64>;

struct Oracle<'a> {
    tree: &'a Tree,
    p: f64,
    memo: BTreeMap<u32, Partial>,
}

impl Oracle<'_> {
    /// Law of `(burnt from now on, b0, root fire index counted from now)`
    /// given the set of undecided edges.
    fn solve(&mut self, alive: u32) -> Partial {
        if alive == 0 {
            let mut done = Partial::new();
            done.insert((0, 0, None), 1.0);
            return done;
        }
        if let Some(hit) = self.memo.get(&alive) {
            return hit.clone();
        }
        let count = alive.count_ones() as f64;
        let mut out = Partial::new();
        let mut rest = alive;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let w = 1.0 / count;
            if self.p < 1.0 {
                for ((a, b, r), q) in self.solve(alive & !(1 << e)) {
                    *out.entry((a, b, r)).or_insert(0.0) += w * (1.0 - self.p) * q;
                }
            }
            if self.p > 0.0 {
                let (comp, vertices, has_root) = self.component(alive, e);
                for ((a, b, r), q) in self.solve(alive & !comp) {
                    let key = if has_root {
                        (a + vertices, vertices, Some(0))
                    } else {
                        (a + vertices, b, r.map(|i| i + 1))
                    };
                    *out.entry(key).or_insert(0.0) += w * self.p * q;
                }
            }
        }
        self.memo.insert(alive, out.clone());
        out
    }

    /// Edge mask, vertex count and root membership of the component of `e`
    /// in the forest of alive edges.
    fn component(&self, alive: u32, e: usize) -> (u32, usize, bool) {
        let n = self.tree.n();
        let mut in_comp = vec![false; n];
        let mut mask = 0u32;
        let (c, p) = (e + 1, self.tree.parent_index(e + 1).expect("edge has a parent"));
        in_comp[c] = true;
        in_comp[p] = true;
        mask |= 1 << e;
        let mut grew = true;
        while grew {
            grew = false;
            for f in 0..n - 1 {
                if alive & (1 << f) == 0 || mask & (1 << f) != 0 {
                    continue;
                }
                let (x, y) = (f + 1, self.tree.parent_index(f + 1).expect("edge has a parent"));
                if in_comp[x] || in_comp[y] {
                    in_comp[x] = true;
                    in_comp[y] = true;
                    mask |= 1 << f;
                    grew = true;
                }
            }
        }
        (mask, in_comp.iter().filter(|&&b| b).count(), in_comp[0])
    }
}

/// Exact joint law of `(I, b0, root fire index)` for the dynamics on a fixed
/// tree with at most [`BRUTE_FORCE_MAX_N`] vertices.
pub fn brute_force_i_distribution(tree: &Tree, p: f64) -> Result<ExactLaw> {
    check_probability(p)?;
    let n = tree.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX_N });
    }
    let mut oracle = Oracle { tree, p, memo: BTreeMap::new() };
    let all = if n == 1 { 0 } else { (1u32 << (n - 1)) - 1 };
    let joint = oracle
        .solve(all)
        .into_iter()
        .map(|((burnt, b0, r), q)| ((n - burnt, b0, r.map(|i| i + 1)), q))
        .collect();
    Ok(ExactLaw { joint })
}

/// Average of [`brute_force_i_distribution`] over all `(n−1)!` recursive trees.
pub fn brute_force_avg_over_trees(n: usize, p: f64) -> Result<ExactLaw> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::invalid("a tree needs at least one vertex"));
    }
    if n > BRUTE_FORCE_AVG_MAX_N {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_AVG_MAX_N });
    }
    let trees = all_recursive_trees(n);
    let w = 1.0 / trees.len() as f64;
    let mut joint = BTreeMap::new();
    for parents in trees {
        let t = Tree::from_parents(&parents)?;
        for (k, q) in brute_force_i_distribution(&t, p)?.joint {
            *joint.entry(k).or_insert(0.0) += w * q;
        }
    }
    Ok(ExactLaw { joint })
}

/// Parent arrays (parents of `2..=n`) of every recursive tree on `n` vertices.
pub fn all_recursive_trees(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for v in 2..=n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (1..v).map(move |u| {
                    let mut next = prefix.clone();
                    next.push(u);
                    next
                })
            })
            .collect();
    }
    out
}
