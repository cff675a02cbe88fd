//! Rooted labelled trees in parent-array form and random recursive trees.
//!
//! Vertices are labelled `1..=n` and the tree is rooted at `1`. The edge
//! joining `v` to its parent has the stable id `v - 2`, so a tree with `n`
//! vertices has edge ids `0..n-1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

const NO_PARENT: u32 = u32::MAX;

/// An immutable rooted tree on `1..=n`.
///
/// Children lists, depths and a breadth-first order are computed once at
/// construction, so a `Tree` can be shared freely between trial workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    // All arrays below are indexed by `label - 1`.
    parent: Vec<u32>,
    depth: Vec<u32>,
    bfs: Vec<u32>,
    child_offsets: Vec<u32>,
    children: Vec<u32>,
    recursive: bool,
}

/// The branch from the root to a target vertex together with the sizes of
/// the pieces left after deleting every branch edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinalDecomposition {
    /// `spine[0] = 1`, `spine[h] = x`, and `spine[i - 1]` is the parent of `spine[i]`.
    pub spine: Vec<usize>,
    /// `component_sizes[i]` is the size of the piece containing `spine[i]`.
    pub component_sizes: Vec<usize>,
}

impl SpinalDecomposition {
    /// Height of the target vertex.
    pub fn height(&self) -> usize {
        self.spine.len() - 1
    }

    pub fn target(&self) -> usize {
        *self.spine.last().expect("spine always contains the root")
    }
}

/// Draws a uniform random recursive tree: vertex `i` attaches to a parent
/// chosen uniformly in `1..i`, independently for `i = 2..=n`.
pub fn generate_recursive_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tree> {
    if n == 0 {
        return Err(Error::invalid("a tree needs at least one vertex"));
    }
    check_label_width(n)?;
    let mut parent = Vec::with_capacity(n);
    parent.push(NO_PARENT);
    for i in 2..=n {
        // 0-based index of a label uniform in 1..i
        parent.push(rng.random_range(0..(i - 1) as u32));
    }
    Ok(Tree::from_parent_indices(parent, true))
}

fn check_label_width(n: usize) -> Result<()> {
    if n >= NO_PARENT as usize {
        return Err(Error::TooLarge {
            n,
            max: NO_PARENT as usize - 1,
        });
    }
    Ok(())
}

impl Tree {
    /// Builds a tree from the parent labels of vertices `2..=n`
    /// (`parents[k]` is the parent of vertex `k + 2`).
    ///
    /// Any labelled tree rooted at `1` is accepted; use
    /// [`Tree::is_recursive`] to check whether labels increase away from
    /// the root.
    pub fn from_parents(parents: &[usize]) -> Result<Tree> {
        let n = parents.len() + 1;
        check_label_width(n)?;
        let mut parent = Vec::with_capacity(n);
        parent.push(NO_PARENT);
        let mut recursive = true;
        for (k, &p) in parents.iter().enumerate() {
            let v = k + 2;
            if p == 0 || p > n {
                return Err(Error::NotATree(format!(
                    "parent {p} of vertex {v} is not a vertex label"
                )));
            }
            if p == v {
                return Err(Error::NotATree(format!("vertex {v} is its own parent")));
            }
            recursive &= p < v;
            parent.push((p - 1) as u32);
        }
        let tree = Tree::from_parent_indices(parent, recursive);
        if tree.bfs.len() != n {
            return Err(Error::NotATree(format!(
                "only {} of {n} vertices are connected to the root",
                tree.bfs.len()
            )));
        }
        Ok(tree)
    }

    /// The single-vertex tree.
    pub fn singleton() -> Tree {
        Tree::from_parent_indices(vec![NO_PARENT], true)
    }

    /// The path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Result<Tree> {
        if n == 0 {
            return Err(Error::invalid("a tree needs at least one vertex"));
        }
        let parents: Vec<usize> = (1..n).collect();
        Tree::from_parents(&parents)
    }

    /// The star with centre `1`.
    pub fn star(n: usize) -> Result<Tree> {
        if n == 0 {
            return Err(Error::invalid("a tree needs at least one vertex"));
        }
        Tree::from_parents(&vec![1; n - 1])
    }

    /// `parent` holds 0-based parent indices with `NO_PARENT` at the root.
    /// Vertices unreachable from the root are left out of `bfs`.
    fn from_parent_indices(parent: Vec<u32>, recursive: bool) -> Tree {
        let n = parent.len();
        let mut child_offsets = vec![0u32; n + 1];
        for &p in &parent[1..] {
            child_offsets[p as usize + 1] += 1;
        }
        for i in 0..n {
            child_offsets[i + 1] += child_offsets[i];
        }
        let mut fill = child_offsets.clone();
        let mut children = vec![0u32; n.saturating_sub(1)];
        for (i, &p) in parent.iter().enumerate().skip(1) {
            children[fill[p as usize] as usize] = i as u32;
            fill[p as usize] += 1;
        }

        let mut depth = vec![u32::MAX; n];
        let mut bfs = Vec::with_capacity(n);
        depth[0] = 0;
        bfs.push(0u32);
        let mut head = 0;
        while head < bfs.len() {
            let v = bfs[head] as usize;
            head += 1;
            let range = child_offsets[v] as usize..child_offsets[v + 1] as usize;
            for &c in &children[range] {
                if depth[c as usize] == u32::MAX {
                    depth[c as usize] = depth[v] + 1;
                    bfs.push(c);
                }
            }
        }

        Tree {
            parent,
            depth,
            bfs,
            child_offsets,
            children,
            recursive,
        }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn num_edges(&self) -> usize {
        self.n() - 1
    }

    /// Whether labels increase along every branch from the root.
    pub fn is_recursive(&self) -> bool {
        self.recursive
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Parent label of `v`, `None` for the root.
    pub fn parent(&self, v: usize) -> Result<Option<usize>> {
        self.check_vertex(v)?;
        Ok(self.parent_index(v - 1).map(|p| p + 1))
    }

    /// Parent labels of vertices `2..=n`, in order.
    pub fn parents(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent[1..].iter().map(|&p| p as usize + 1)
    }

    /// Labels of the children of `v`, in increasing order.
    pub fn children(&self, v: usize) -> Result<impl Iterator<Item = usize> + '_> {
        self.check_vertex(v)?;
        Ok(self.children_of(v - 1).iter().map(|&c| c as usize + 1))
    }

    /// `(child, parent)` labels of the edge with the given id.
    pub fn edge_endpoints(&self, edge: usize) -> Result<(usize, usize)> {
        if edge >= self.num_edges() {
            return Err(Error::invalid(format!(
                "edge id {edge} out of range for {} edges",
                self.num_edges()
            )));
        }
        let child = edge + 1;
        Ok((child + 1, self.parent[child] as usize + 1))
    }

    /// Graph distance from `v` to the root.
    pub fn vertex_height(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.depth[v - 1] as usize)
    }

    /// Number of descendants of `v`, `v` included.
    pub fn subtree_size(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        let mut stack = vec![(v - 1) as u32];
        let mut count = 0;
        while let Some(x) = stack.pop() {
            count += 1;
            stack.extend_from_slice(self.children_of(x as usize));
        }
        Ok(count)
    }

    /// Subtree sizes of every vertex, indexed by `label - 1`.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let mut size = vec![1u32; self.n()];
        for &v in self.bfs.iter().rev() {
            if let Some(p) = self.parent_index(v as usize) {
                size[p] += size[v as usize];
            }
        }
        size
    }

    /// Height of the last common ancestor of `u` and `v`.
    pub fn lca_height(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.depth[self.lca_index(u - 1, v - 1)] as usize)
    }

    /// Sizes of the subtrees hanging from the root, ordered by the label of
    /// their own root.
    pub fn root_branch_sizes(&self) -> Vec<usize> {
        let mut kids: Vec<u32> = self.children_of(0).to_vec();
        kids.sort_unstable();
        kids.iter()
            .map(|&c| self.subtree_size(c as usize + 1).expect("valid child"))
            .collect()
    }

    /// Spine from the root to `x` and the sizes of the pieces obtained by
    /// deleting all spine edges.
    pub fn spinal_decomposition(&self, x: usize) -> Result<SpinalDecomposition> {
        self.check_vertex(x)?;
        let mut spine_idx = Vec::with_capacity(self.depth[x - 1] as usize + 1);
        let mut cur = Some(x - 1);
        while let Some(i) = cur {
            spine_idx.push(i);
            cur = self.parent_index(i);
        }
        spine_idx.reverse();

        // Only spine subtrees are needed; count them bottom-up along the spine.
        let mut sub = vec![0usize; spine_idx.len()];
        for k in (0..spine_idx.len()).rev() {
            let i = spine_idx[k];
            let next = spine_idx.get(k + 1).copied();
            let mut size = 1;
            for &c in self.children_of(i) {
                if Some(c as usize) == next {
                    size += sub[k + 1];
                } else {
                    size += self.subtree_size(c as usize + 1)?;
                }
            }
            sub[k] = size;
        }
        let component_sizes = (0..spine_idx.len())
            .map(|k| sub[k] - sub.get(k + 1).copied().unwrap_or(0))
            .collect();
        Ok(SpinalDecomposition {
            spine: spine_idx.iter().map(|&i| i + 1).collect(),
            component_sizes,
        })
    }

    pub(crate) fn parent_index(&self, i: usize) -> Option<usize> {
        match self.parent[i] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    pub(crate) fn children_of(&self, i: usize) -> &[u32] {
        &self.children[self.child_offsets[i] as usize..self.child_offsets[i + 1] as usize]
    }

    /// Vertex indices in breadth-first order from the root.
    pub(crate) fn bfs_order(&self) -> &[u32] {
        &self.bfs
    }

    pub(crate) fn lca_index(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a] as usize;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b] as usize;
        }
        while a != b {
            a = self.parent[a] as usize;
            b = self.parent[b] as usize;
        }
        a
    }

    /// Calls `f` with each neighbour index of vertex index `i` and the id of
    /// the joining edge.
    #[inline]
    pub(crate) fn for_each_neighbour(&self, i: usize, mut f: impl FnMut(usize, usize)) {
        if let Some(p) = self.parent_index(i) {
            f(p, i - 1);
        }
        for &c in self.children_of(i) {
            f(c as usize, c as usize - 1);
        }
    }
}
