//! Cut-trees: the genealogy of vertex blocks produced by deleting the edges
//! of a tree one by one.
//!
//! The root of the cut-tree is the block of all vertices, every internal
//! node is split by the edge of smallest priority inside its block, and the
//! leaves are singletons. The tree is built bottom-up by merging components
//! in decreasing priority order, which produces the same genealogy as the
//! top-down deletion process.
//!
//! Node blocks are not stored explicitly. Leaves are laid out in depth-first
//! order so that every node owns a contiguous interval of that layout.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dynamics::{
    block_record, fireproof_components, DynamicsOptions, EdgeFate, EdgeRandomness, FireEvent,
    FireOutcome,
};
use crate::tree::Tree;
use crate::union_find::UnionFind;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
struct Internal {
    split_edge: u32,
    split_priority: f64,
    children: [u32; 2],
}

/// Binary genealogy of blocks.
///
/// Node ids `0..n` are the leaves (`id = label - 1`); ids `n..2n-1` are
/// internal nodes, numbered so that every parent has a larger id than its
/// children. The root is the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTree {
    n: usize,
    internals: Vec<Internal>,
    parent: Vec<u32>,
    /// `[start, end)` interval of each node in `leaf_order`.
    interval: Vec<(u32, u32)>,
    leaf_order: Vec<u32>,
}

/// A cut-tree with the marks that survive the filtering step: an internal
/// node is marked if its splitting edge carries a fire mark and no strict
/// ancestor is marked.
#[derive(Debug, Clone)]
pub struct MarkedCutTree<'a> {
    cut: &'a CutTree,
    marked: Vec<bool>,
}

/// Builds the cut-tree of `tree` under deletion by increasing priority.
pub fn build_cut_tree(tree: &Tree, randomness: &EdgeRandomness) -> Result<CutTree> {
    randomness.check_size(tree)?;
    let n = tree.n();
    let order = randomness.decision_order();
    let mut internals = Vec::with_capacity(n - 1);
    let mut parent = vec![NONE; 2 * n - 1];
    let mut top: Vec<u32> = (0..n as u32).collect();
    let mut uf = UnionFind::new(n);

    for &e in order.iter().rev() {
        let child = e as usize + 1;
        let up = tree.parent_index(child).expect("edge child has a parent");
        let a = uf.find(child as u32);
        let b = uf.find(up as u32);
        let id = (n + internals.len()) as u32;
        let kids = [top[a as usize], top[b as usize]];
        parent[kids[0] as usize] = id;
        parent[kids[1] as usize] = id;
        internals.push(Internal {
            split_edge: e,
            split_priority: randomness.priorities()[e as usize],
            children: kids,
        });
        let r = uf.union_roots(a, b);
        top[r as usize] = id;
    }

    let mut cut = CutTree {
        n,
        internals,
        parent,
        interval: vec![(0, 0); 2 * n - 1],
        leaf_order: Vec::with_capacity(n),
    };
    cut.layout_leaves();
    Ok(cut)
}

impl CutTree {
    fn layout_leaves(&mut self) {
        let mut stack = vec![(self.root() as u32, false)];
        while let Some((node, done)) = stack.pop() {
            let x = node as usize;
            if x < self.n {
                let pos = self.leaf_order.len() as u32;
                self.interval[x] = (pos, pos + 1);
                self.leaf_order.push(node);
            } else if done {
                let [a, b] = self.internals[x - self.n].children;
                self.interval[x] = (self.interval[a as usize].0, self.interval[b as usize].1);
            } else {
                let [a, b] = self.internals[x - self.n].children;
                stack.push((node, true));
                stack.push((b, false));
                stack.push((a, false));
            }
        }
    }

    /// Number of leaves, i.e. vertices of the underlying tree.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        2 * self.n - 1
    }

    pub fn root(&self) -> usize {
        self.num_nodes() - 1
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node < self.n
    }

    /// Node id of the singleton leaf `{v}`.
    pub fn leaf(&self, v: usize) -> Result<usize> {
        if v == 0 || v > self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(v - 1)
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        match self.parent[node] {
            NONE => None,
            p => Some(p as usize),
        }
    }

    pub fn children(&self, node: usize) -> Option<[usize; 2]> {
        self.internal(node)
            .map(|i| [i.children[0] as usize, i.children[1] as usize])
    }

    /// Id of the edge splitting an internal node.
    pub fn split_edge(&self, node: usize) -> Option<usize> {
        self.internal(node).map(|i| i.split_edge as usize)
    }

    pub fn split_priority(&self, node: usize) -> Option<f64> {
        self.internal(node).map(|i| i.split_priority)
    }

    fn internal(&self, node: usize) -> Option<&Internal> {
        node.checked_sub(self.n).and_then(|k| self.internals.get(k))
    }

    pub fn block_size(&self, node: usize) -> usize {
        let (a, b) = self.interval[node];
        (b - a) as usize
    }

    /// Vertex labels of a node's block, in leaf-layout order.
    pub fn block(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = self.interval[node];
        self.leaf_order[a as usize..b as usize]
            .iter()
            .map(|&l| l as usize + 1)
    }

    /// Whether `ancestor` is a weak ancestor of `node`.
    pub fn contains(&self, ancestor: usize, node: usize) -> bool {
        let (a, b) = self.interval[ancestor];
        let (c, d) = self.interval[node];
        a <= c && d <= b
    }

    /// Distance from a node to the root.
    pub fn depth(&self, mut node: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(node) {
            node = p;
            d += 1;
        }
        d
    }

    /// `ζ`: depth of the leaf `{1}`, the number of cuts needed to isolate the root.
    pub fn zeta(&self) -> usize {
        self.depth(0)
    }

    /// Block sizes along the path from the root to `{1}`: for each internal
    /// node on that path, `(size of the child not containing 1, size of the
    /// child containing 1)`.
    pub fn root_path_blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut node = self.root();
        while let Some([a, b]) = self.children(node) {
            let (with_root, other) = if self.contains(a, 0) { (a, b) } else { (b, a) };
            out.push((self.block_size(other), self.block_size(with_root)));
            node = with_root;
        }
        out
    }

    /// Length `L` and internal node count `X` of the subtree spanned by the
    /// root and `k` leaves drawn uniformly with replacement.
    pub fn reduced_tree<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<(usize, usize)> {
        self.reduced_tree_with(k, LeafSampling::WithReplacement, rng)
    }

    pub fn reduced_tree_with<R: Rng + ?Sized>(
        &self,
        k: usize,
        sampling: LeafSampling,
        rng: &mut R,
    ) -> Result<(usize, usize)> {
        if k == 0 {
            return Err(Error::invalid("the reduced tree needs at least one leaf"));
        }
        let leaves: Vec<usize> = match sampling {
            LeafSampling::WithReplacement => {
                (0..k).map(|_| rng.random_range(0..self.n)).collect()
            }
            LeafSampling::Distinct => {
                if k > self.n {
                    return Err(Error::invalid("more distinct leaves than vertices"));
                }
                rand::seq::index::sample(rng, self.n, k).into_vec()
            }
        };
        Ok(self.span(&leaves))
    }

    /// `(L, X)` of the subtree spanned by the root and the given leaf ids.
    pub fn span(&self, leaves: &[usize]) -> (usize, usize) {
        let mut visited: Vec<usize> = Vec::new();
        let mut nodes = 0;
        let mut distinct_leaves = 0;
        for &leaf in leaves {
            let mut x = leaf;
            if visited.contains(&x) {
                continue;
            }
            distinct_leaves += 1;
            loop {
                if visited.contains(&x) {
                    break;
                }
                visited.push(x);
                nodes += 1;
                match self.parent(x) {
                    Some(p) => x = p,
                    None => break,
                }
            }
            // keep `visited` small: only the branch nodes are ever needed,
            // but a linear scan is fine for the small k used here
        }
        (nodes - 1, nodes - distinct_leaves)
    }

    /// Checks the structural invariants; used by tests and by callers
    /// ingesting cut-trees from elsewhere.
    pub fn validate(&self, tree: &Tree) -> Result<()> {
        let fail = |msg: &str| Err(Error::invalid(alloc::format!("invalid cut-tree: {msg}")));
        if self.leaf_order.len() != self.n || self.block_size(self.root()) != self.n {
            return fail("root block is not the whole vertex set");
        }
        let mut sorted = self.leaf_order.clone();
        sorted.sort_unstable();
        if sorted.iter().enumerate().any(|(i, &l)| l as usize != i) {
            return fail("leaves are not the n singletons");
        }
        for node in self.n..self.num_nodes() {
            let [a, b] = self.children(node).expect("internal");
            if self.block_size(a) + self.block_size(b) != self.block_size(node) {
                return fail("child sizes do not add up");
            }
            if self.parent(a) != Some(node) || self.parent(b) != Some(node) {
                return fail("parent links disagree with children");
            }
            let e = self.split_edge(node).expect("internal");
            let (u, w) = tree.edge_endpoints(e)?;
            let (iu, iw) = (self.interval_of_leaf(u - 1), self.interval_of_leaf(w - 1));
            let in_a = |x: u32| self.interval[a].0 <= x && x < self.interval[a].1;
            let in_b = |x: u32| self.interval[b].0 <= x && x < self.interval[b].1;
            if !((in_a(iu) && in_b(iw)) || (in_a(iw) && in_b(iu))) {
                return fail("splitting edge does not join the two children");
            }
        }
        Ok(())
    }

    fn interval_of_leaf(&self, leaf: usize) -> u32 {
        self.interval[leaf].0
    }

    pub fn apply_mark_process<'a>(&'a self, randomness: &EdgeRandomness) -> Result<MarkedCutTree<'a>> {
        if randomness.num_edges() + 1 != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n - 1,
                found: randomness.num_edges(),
            });
        }
        let marks = randomness.marks();
        let mut marked = vec![false; self.num_nodes()];
        // covered[x]: some strict ancestor of x is marked
        let mut covered = vec![false; self.num_nodes()];
        for x in (self.n..self.num_nodes()).rev() {
            if let Some(p) = self.parent(x) {
                covered[x] = covered[p] || marked[p];
            }
            let e = self.internals[x - self.n].split_edge as usize;
            marked[x] = marks[e] && !covered[x];
        }
        Ok(MarkedCutTree { cut: self, marked })
    }
}

/// How `reduced_tree` picks its leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeafSampling {
    #[default]
    WithReplacement,
    Distinct,
}

/// Free-function form of [`CutTree::apply_mark_process`].
pub fn apply_mark_process<'a>(
    cut: &'a CutTree,
    randomness: &EdgeRandomness,
) -> Result<MarkedCutTree<'a>> {
    cut.apply_mark_process(randomness)
}

impl<'a> MarkedCutTree<'a> {
    pub fn cut_tree(&self) -> &'a CutTree {
        self.cut
    }

    pub fn is_marked(&self, node: usize) -> bool {
        self.marked[node]
    }

    pub fn marked_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.marked
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    /// Reads the fire outcome off the marks: marked blocks are the burnt
    /// subtrees, leaves without a marked ancestor are the fireproof
    /// vertices, and fire times count the unmarked, uncovered splits that
    /// happen before each marked one.
    ///
    /// The tree is needed only for the fireproof forest, which the
    /// cut-tree alone does not record.
    pub fn fire_outcome(&self, tree: &Tree, opts: &DynamicsOptions) -> Result<FireOutcome> {
        let cut = self.cut;
        if tree.n() != cut.n {
            return Err(Error::SizeMismatch {
                expected: cut.n,
                found: tree.n(),
            });
        }
        let n = cut.n;
        let priority = |x: usize| cut.internals[x - n].split_priority;
        let split = |x: usize| cut.internals[x - n].split_edge;

        let mut fires: Vec<usize> = self.marked_nodes().collect();
        fires.sort_by(|&a, &b| priority(a).total_cmp(&priority(b)).then(split(a).cmp(&split(b))));
        let mut fire_of = vec![0u32; cut.num_nodes()];
        for (j, &x) in fires.iter().enumerate() {
            fire_of[x] = j as u32 + 1;
        }

        // Propagate the governing fire down the tree; parents have larger ids.
        let mut edge_fate = vec![EdgeFate::Fireproof; n - 1];
        let mut free_priorities = Vec::new();
        for x in (0..cut.num_nodes()).rev() {
            let inherited = cut.parent(x).map_or(0, |p| fire_of[p]);
            if fire_of[x] == 0 {
                fire_of[x] = inherited;
            }
            if x >= n {
                let e = split(x) as usize;
                edge_fate[e] = match (self.marked[x], fire_of[x]) {
                    (true, j) => EdgeFate::Ignited(j as usize),
                    (false, 0) => {
                        free_priorities.push((priority(x), split(x)));
                        EdgeFate::Fireproof
                    }
                    (false, j) => EdgeFate::Burnt(j as usize),
                };
            }
        }
        free_priorities.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let vertex_fire: Vec<u32> = fire_of[..n].to_vec();
        let mut block = Vec::new();
        let events = fires
            .iter()
            .map(|&x| {
                let key = (priority(x), split(x));
                let theta = free_priorities
                    .partition_point(|f| f.0.total_cmp(&key.0).then(f.1.cmp(&key.1)).is_lt());
                block.clear();
                block.extend(cut.block(x).map(|v| v as u32 - 1));
                FireEvent {
                    ignited_edge: split(x) as usize,
                    theta,
                    size: block.len(),
                    vertices: block_record(&block, opts),
                }
            })
            .collect();
        debug_assert_eq!(
            fireproof_components(tree, &vertex_fire).iter().sum::<usize>(),
            vertex_fire.iter().filter(|&&f| f == 0).count()
        );
        Ok(FireOutcome::assemble(tree, vertex_fire, events, edge_fate))
    }
}

/// Free-function form of [`MarkedCutTree::fire_outcome`] with default options.
pub fn fire_outcome_from_marks(marked: &MarkedCutTree<'_>, tree: &Tree) -> Result<FireOutcome> {
    marked.fire_outcome(tree, &DynamicsOptions::default())
}
