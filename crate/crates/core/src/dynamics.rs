//! Direct simulation of the fire dynamics.
//!
//! Edges are decided in increasing priority. An undecided edge whose
//! component has already burnt is never decided. A fireproof decision
//! deletes the edge; a fire decision burns the edge's whole component of
//! undecided edges.

use alloc::vec;
use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;

use crate::tree::Tree;
use crate::{Error, Result};

/// Per-edge randomness driving one run: a priority (the decision order) and
/// a fire mark (Bernoulli(p)).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRandomness {
    p: f64,
    priority: Vec<f64>,
    mark: Vec<bool>,
}

impl EdgeRandomness {
    /// Builds randomness from explicit values. Priorities must lie in `(0, 1)`.
    pub fn new(p: f64, priority: Vec<f64>, mark: Vec<bool>) -> Result<Self> {
        check_probability(p)?;
        if priority.len() != mark.len() {
            return Err(Error::SizeMismatch {
                expected: priority.len(),
                found: mark.len(),
            });
        }
        if let Some(bad) = priority.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
            return Err(Error::invalid(alloc::format!(
                "priority {bad} is not in (0, 1)"
            )));
        }
        Ok(EdgeRandomness { p, priority, mark })
    }

    /// Randomness where edge `e` is decided `order.position(e)`-th.
    pub fn from_order(p: f64, order: &[usize], mark: Vec<bool>) -> Result<Self> {
        let m = order.len();
        let mut priority = vec![f64::NAN; m];
        for (rank, &e) in order.iter().enumerate() {
            if e >= m || !priority[e].is_nan() {
                return Err(Error::invalid("order is not a permutation of the edge ids"));
            }
            priority[e] = (rank as f64 + 1.0) / (m as f64 + 1.0);
        }
        EdgeRandomness::new(p, priority, mark)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn num_edges(&self) -> usize {
        self.priority.len()
    }

    pub fn priorities(&self) -> &[f64] {
        &self.priority
    }

    pub fn marks(&self) -> &[bool] {
        &self.mark
    }

    /// Edge ids sorted by increasing priority, ties broken by id.
    pub fn decision_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.priority.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            self.priority[a as usize]
                .total_cmp(&self.priority[b as usize])
                .then(a.cmp(&b))
        });
        order
    }

    pub(crate) fn check_size(&self, tree: &Tree) -> Result<()> {
        if self.num_edges() != tree.num_edges() {
            return Err(Error::SizeMismatch {
                expected: tree.num_edges(),
                found: self.num_edges(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(alloc::format!("p = {p} is not in [0, 1]")));
    }
    Ok(())
}

/// Draws i.i.d. uniform priorities and Bernoulli(p) marks, edge by edge in id order.
pub fn draw_edge_randomness<R: Rng + ?Sized>(
    tree: &Tree,
    p: f64,
    rng: &mut R,
) -> Result<EdgeRandomness> {
    check_probability(p)?;
    let m = tree.num_edges();
    let mut priority = Vec::with_capacity(m);
    let mut mark = Vec::with_capacity(m);
    for _ in 0..m {
        priority.push(rng.sample::<f64, _>(Open01));
        mark.push(rng.random::<f64>() < p);
    }
    Ok(EdgeRandomness { p, priority, mark })
}

/// Final state of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    Fireproof,
    /// Burnt by the fire with this 1-based index.
    Burnt(usize),
}

/// What happened to an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFate {
    Fireproof,
    /// The edge was decided and started fire `j`.
    Ignited(usize),
    /// The edge burnt in fire `j` without being decided.
    Burnt(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FireEvent {
    pub ignited_edge: usize,
    /// Number of fireproof decisions made strictly before this fire.
    pub theta: usize,
    pub size: usize,
    /// Sorted labels of the burnt vertices, unless the block exceeded the cap.
    pub vertices: Option<Vec<u32>>,
}

/// Tuning of the outcome record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DynamicsOptions {
    /// Blocks larger than this keep only their size. `None` keeps every block.
    pub block_cap: Option<usize>,
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FireOutcome {
    /// `vertex_fire[v - 1]` is `0` for fireproof vertices, otherwise the index
    /// of the fire that burnt `v`.
    vertex_fire: Vec<u32>,
    pub fires: Vec<FireEvent>,
    pub edge_fate: Vec<EdgeFate>,
    /// `I_n`: number of fireproof vertices.
    pub fireproof_count: usize,
    /// Size of the burnt block containing the root, `0` if the root is fireproof.
    pub root_burnt_size: usize,
    pub root_fire_index: Option<usize>,
    /// Sizes of the fireproof forest components, non-increasing.
    pub fireproof_components: Vec<usize>,
}

impl FireOutcome {
    /// Assembles the outcome fields that are functions of the tree and the
    /// per-vertex fire index.
    pub(crate) fn assemble(
        tree: &Tree,
        vertex_fire: Vec<u32>,
        fires: Vec<FireEvent>,
        edge_fate: Vec<EdgeFate>,
    ) -> FireOutcome {
        let burnt: usize = fires.iter().map(|f| f.size).sum();
        let root_fire_index = match vertex_fire[0] {
            0 => None,
            j => Some(j as usize),
        };
        let root_burnt_size = root_fire_index.map_or(0, |j| fires[j - 1].size);
        let fireproof_components = fireproof_components(tree, &vertex_fire);
        FireOutcome {
            fireproof_count: tree.n() - burnt,
            vertex_fire,
            fires,
            edge_fate,
            root_burnt_size,
            root_fire_index,
            fireproof_components,
        }
    }

    pub fn n(&self) -> usize {
        self.vertex_fire.len()
    }

    pub fn num_fires(&self) -> usize {
        self.fires.len()
    }

    pub fn fate(&self, v: usize) -> Result<Fate> {
        if v == 0 || v > self.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            });
        }
        Ok(match self.vertex_fire[v - 1] {
            0 => Fate::Fireproof,
            j => Fate::Burnt(j as usize),
        })
    }

    pub fn is_fireproof(&self, v: usize) -> Result<bool> {
        Ok(self.fate(v)? == Fate::Fireproof)
    }

    /// Per-vertex fire index (`0` = fireproof), indexed by `label - 1`.
    pub fn vertex_fires(&self) -> &[u32] {
        &self.vertex_fire
    }

    /// `f↓₁`: size of the largest fireproof component, `0` if every vertex burnt.
    pub fn largest_fireproof_component(&self) -> usize {
        self.fireproof_components.first().copied().unwrap_or(0)
    }

    /// Whether `u` and `v` lie in the same component of the fireproof forest.
    pub fn same_fireproof_component(&self, tree: &Tree, u: usize, v: usize) -> Result<bool> {
        tree.check_vertex(u)?;
        tree.check_vertex(v)?;
        if tree.n() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: tree.n(),
            });
        }
        // Every edge between two fireproof vertices was decided fireproof, so
        // it suffices that the whole path is fireproof.
        let fireproof = |i: usize| self.vertex_fire[i] == 0;
        let top = tree.lca_index(u - 1, v - 1);
        for start in [u - 1, v - 1] {
            let mut x = start;
            loop {
                if !fireproof(x) {
                    return Ok(false);
                }
                if x == top {
                    break;
                }
                x = tree.parent_index(x).expect("walk stops at the common ancestor");
            }
        }
        Ok(true)
    }
}

/// Component sizes of the forest induced on fireproof vertices, non-increasing.
pub(crate) fn fireproof_components(tree: &Tree, vertex_fire: &[u32]) -> Vec<usize> {
    let mut acc = vec![0u32; tree.n()];
    let mut sizes = Vec::new();
    for &v in tree.bfs_order().iter().rev() {
        let v = v as usize;
        if vertex_fire[v] != 0 {
            continue;
        }
        acc[v] += 1;
        match tree.parent_index(v) {
            Some(p) if vertex_fire[p] == 0 => acc[p] += acc[v],
            _ => sizes.push(acc[v] as usize),
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

pub(crate) fn block_record(vertices: &[u32], opts: &DynamicsOptions) -> Option<Vec<u32>> {
    match opts.block_cap {
        Some(cap) if vertices.len() > cap => None,
        _ => {
            let mut labels: Vec<u32> = vertices.iter().map(|&i| i + 1).collect();
            labels.sort_unstable();
            Some(labels)
        }
    }
}

/// Runs the dynamics with default options.
pub fn run_fire_dynamics(tree: &Tree, randomness: &EdgeRandomness) -> Result<FireOutcome> {
    run_fire_dynamics_with(tree, randomness, &DynamicsOptions::default())
}

pub fn run_fire_dynamics_with(
    tree: &Tree,
    randomness: &EdgeRandomness,
    opts: &DynamicsOptions,
) -> Result<FireOutcome> {
    randomness.check_size(tree)?;
    let m = tree.num_edges();

    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Undecided,
        Done,
    }
    let mut state = vec![State::Undecided; m];
    let mut edge_fate = vec![EdgeFate::Fireproof; m];
    let mut vertex_fire = vec![0u32; tree.n()];
    let mut fires = Vec::new();
    let mut fireproof_decisions = 0usize;
    let mut block = Vec::new();
    let mut stack = Vec::new();

    for e in randomness.decision_order() {
        let e = e as usize;
        if state[e] == State::Done {
            continue;
        }
        state[e] = State::Done;
        if !randomness.mark[e] {
            edge_fate[e] = EdgeFate::Fireproof;
            fireproof_decisions += 1;
            continue;
        }

        let j = fires.len() + 1;
        edge_fate[e] = EdgeFate::Ignited(j);
        // Burn the component of undecided edges around e. Fireproof edges
        // are already Done, so the traversal cannot leave the component.
        let child = e + 1;
        let parent = tree.parent_index(child).expect("edge child has a parent");
        block.clear();
        stack.clear();
        for x in [child, parent] {
            vertex_fire[x] = j as u32;
            block.push(x as u32);
            stack.push(x);
        }
        while let Some(x) = stack.pop() {
            tree.for_each_neighbour(x, |y, f| {
                if state[f] == State::Undecided {
                    state[f] = State::Done;
                    edge_fate[f] = EdgeFate::Burnt(j);
                    vertex_fire[y] = j as u32;
                    block.push(y as u32);
                    stack.push(y);
                }
            });
        }
        fires.push(FireEvent {
            ignited_edge: e,
            theta: fireproof_decisions,
            size: block.len(),
            vertices: block_record(&block, opts),
        });
    }

    Ok(FireOutcome::assemble(tree, vertex_fire, fires, edge_fate))
}
