/// Disjoint sets over `0..n` with union by size and path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: alloc::vec::Vec<u32>,
    size: alloc::vec::Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: alloc::vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Merges the sets of two representatives and returns the new representative.
    pub(crate) fn union_roots(&mut self, a: u32, b: u32) -> u32 {
        debug_assert_ne!(a, b);
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        big
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_collapse_sets() {
        let mut uf = UnionFind::new(5);
        let r = uf.union_roots(0, 1);
        let r2 = uf.find(3);
        let r = uf.union_roots(r, r2);
        assert_eq!(uf.find(0), r);
        assert_eq!(uf.find(1), r);
        assert_eq!(uf.find(3), r);
        assert_ne!(uf.find(2), r);
        assert_ne!(uf.find(4), uf.find(2));
    }
}
