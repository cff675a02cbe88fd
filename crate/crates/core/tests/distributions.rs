use firetree_core::cut_tree::build_cut_tree;
use firetree_core::dynamics::draw_edge_randomness;
use firetree_core::tree::generate_recursive_tree;
use firetree_core::walk::{run_walk_to, sample_xi, stick_breaking, walk_partial_sum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pearson p-value; every expected count must be at least 5.
fn chi_square_p(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            assert!(e >= 5.0, "expected count {e} too small");
            (o as f64 - e).powi(2) / e
        })
        .sum();
    ChiSquared::new((probs.len() - 1) as f64).unwrap().sf(stat)
}

/// `1/(k(k+1))` on `1..=cells`, then the tail.
fn xi_cells(cells: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (1..=cells).map(|k| 1.0 / (k * (k + 1)) as f64).collect();
    p.push(1.0 / (cells + 1) as f64);
    p
}

fn bin(value: usize, cells: usize) -> usize {
    value.clamp(1, cells + 1) - 1
}

#[test]
fn xi_pmf() {
    let mut g = rng(1);
    let mut counts = vec![0u64; 31];
    for _ in 0..100_000 {
        counts[bin(sample_xi(&mut g) as usize, 30)] += 1;
    }
    assert!(chi_square_p(&counts, &xi_cells(30)) > 0.001);
    assert!((counts[0] as f64 / 1e5 - 0.5).abs() <= 0.005);
}

/// The first cut removes the minimum-priority edge, so the first block off
/// the root path is the subtree below that edge.
#[test]
fn first_root_path_block_is_the_subtree_below_the_first_cut() {
    let mut g = rng(2);
    for _ in 0..200 {
        let n = g.random_range(2..400);
        let t = generate_recursive_tree(n, &mut g).unwrap();
        let r = draw_edge_randomness(&t, 0.0, &mut g).unwrap();
        let cut = build_cut_tree(&t, &r).unwrap();
        let first = r.decision_order()[0] as usize;
        let (child, _) = t.edge_endpoints(first).unwrap();
        assert_eq!(cut.root_path_blocks()[0].0, t.subtree_size(child).unwrap());
    }
}

#[test]
fn first_root_path_block_law() {
    let n = 10_000;
    let mut g = rng(3);
    let mut counts = vec![0u64; 21];
    for _ in 0..100_000 {
        let t = generate_recursive_tree(n, &mut g).unwrap();
        // every edge is equally likely to be cut first
        let v = g.random_range(2..=n);
        counts[bin(t.subtree_size(v).unwrap(), 20)] += 1;
    }
    assert!(chi_square_p(&counts, &xi_cells(20)) > 0.001);
}

#[test]
fn first_root_path_block_law_from_cut_trees() {
    let n = 10_000;
    let mut g = rng(4);
    let mut counts = vec![0u64; 6];
    for _ in 0..3000 {
        let t = generate_recursive_tree(n, &mut g).unwrap();
        let r = draw_edge_randomness(&t, 0.0, &mut g).unwrap();
        let first = build_cut_tree(&t, &r).unwrap().root_path_blocks()[0].0;
        counts[bin(first, 5)] += 1;
    }
    assert!(chi_square_p(&counts, &xi_cells(5)) > 0.001);
}

#[test]
fn last_passage_time_and_undershoot() {
    let n = 1_000_000u64;
    let scale = (n as f64).ln() / n as f64;
    let mut g = rng(5);
    let mut lambdas = Vec::new();
    let mut unders = Vec::new();
    for _ in 0..500 {
        let w = run_walk_to(n, &mut g).unwrap();
        if !w.degenerate {
            lambdas.push(w.lambda as f64 * scale);
            unders.push(w.undershoot as f64 * scale);
        }
    }
    let mean = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
    assert!((mean - 1.0).abs() <= 0.1, "{mean}");
    unders.sort_by(f64::total_cmp);
    assert!(unders[unders.len() / 2] <= 0.1);
}

/// `E[min(ξ, k)] = H_k`, so truncated partial sums have mean `k H_k` and
/// finite variance.
#[test]
fn truncated_partial_sums_have_mean_k_harmonic_k() {
    let k = 100_000usize;
    let harmonic: f64 = (1..=k).map(|j| 1.0 / j as f64).sum();
    let mut g = rng(6);
    let ratios: Vec<f64> = (0..200)
        .map(|_| (0..k).map(|_| sample_xi(&mut g).min(k as u64)).sum::<u64>() as f64 / (k as f64 * harmonic))
        .collect();
    let mean = ratios.iter().sum::<f64>() / 200.0;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 199.0;
    assert!((mean - 1.0).abs() <= 3.0 * (var / 200.0).sqrt(), "{mean}");
}

#[test]
fn partial_sum_is_a_sum_of_steps() {
    let (mut a, mut b) = (rng(9), rng(9));
    let direct: u64 = (0..1000).map(|_| sample_xi(&mut a)).fold(0, u64::saturating_add);
    assert_eq!(walk_partial_sum(1000, &mut b), direct);
}

/// `E[ζ(n)]` from `ζ(n) = 1 + ζ(n − K)`, where the subtree below a uniform
/// edge has `P(K = k) = n / ((n − 1) k (k + 1))`.
fn expected_zeta(n: usize) -> f64 {
    let mut e = vec![0.0f64; n + 1];
    for m in 2..=n {
        let s: f64 = (1..m).map(|k| e[m - k] / (k * (k + 1)) as f64).sum();
        e[m] = 1.0 + m as f64 / (m - 1) as f64 * s;
    }
    e[n]
}

#[test]
fn expected_zeta_frozen_values() {
    assert_eq!(expected_zeta(2), 1.0);
    // ζ(3) = 1 only for a path whose root edge is cut first
    assert!((expected_zeta(3) - 1.75).abs() < 1e-15);
    assert!((expected_zeta(10) - 5.334665835791621).abs() < 1e-12);
    assert!((expected_zeta(100) - 30.185633794993397).abs() < 1e-10);
}

#[test]
fn mean_zeta_matches_the_recursion() {
    let n = 1000;
    let mut g = rng(7);
    let zs: Vec<f64> = (0..4000)
        .map(|_| {
            let t = generate_recursive_tree(n, &mut g).unwrap();
            let r = draw_edge_randomness(&t, 0.0, &mut g).unwrap();
            build_cut_tree(&t, &r).unwrap().zeta() as f64
        })
        .collect();
    let mean = zs.iter().sum::<f64>() / zs.len() as f64;
    let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (zs.len() - 1) as f64;
    let se = (var / zs.len() as f64).sqrt();
    assert!((mean - expected_zeta(n)).abs() <= 3.0 * se, "{mean} vs {}", expected_zeta(n));
}

#[test]
fn reduced_tree_heights_grow_with_leaves() {
    let n = 5000;
    let mut g = rng(10);
    let mut sums = [0.0f64; 3];
    for _ in 0..300 {
        let t = generate_recursive_tree(n, &mut g).unwrap();
        let r = draw_edge_randomness(&t, 0.0, &mut g).unwrap();
        let cut = build_cut_tree(&t, &r).unwrap();
        for (k, s) in sums.iter_mut().enumerate() {
            *s += cut.reduced_tree(k + 1, &mut g).unwrap().0 as f64;
        }
    }
    // E[β_k] = k / (k + 1) orders the means the same way
    assert!(sums[0] < sums[1] && sums[1] < sums[2]);
    let scale = (n as f64).ln() / n as f64 / 300.0;
    assert!(sums[0] * scale > 0.4 && sums[0] * scale < 0.8);
}

#[test]
fn stick_breaking_first_part_is_uniform() {
    let mut g = rng(8);
    let mut counts = vec![0u64; 10];
    for _ in 0..100_000 {
        counts[stick_breaking(10, &mut g).unwrap().parts()[0] - 1] += 1;
    }
    assert!(chi_square_p(&counts, &[0.1; 10]) > 0.001);
}
