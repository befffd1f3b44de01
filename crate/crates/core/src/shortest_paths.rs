//! All-pairs shortest paths under nonnegative edge weights.
//!
//! Floyd-Warshall over `(cost, hops)` pairs compared lexicographically, so
//! that among equal-cost paths the one with fewer edges wins. Remaining ties
//! keep the first path found, i.e. the one through the lowest-numbered
//! intermediate node. The tie-breaking makes paths reproducible when many
//! weights are zero, which is the case at the start of the dual ascent.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::Instance;

const NO_HOP: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTable {
    n: usize,
    dist: Vec<f64>,
    hops: Vec<u32>,
    /// For pair (i, j): the first node after `i` and the edge leading to it.
    next: Vec<(u32, u32)>,
}

impl ShortestPathTable {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dist(&self, from: usize, to: usize) -> f64 {
        self.dist[from * self.n + to]
    }

    pub fn hops(&self, from: usize, to: usize) -> u32 {
        self.hops[from * self.n + to]
    }

    /// Edge ids of the stored shortest path, in travel order.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if self.hops(from, to) == NO_HOP {
            return out;
        }
        let mut cur = from;
        while cur != to && out.len() <= self.n {
            let (node, edge) = self.next[cur * self.n + to];
            out.push(edge as usize);
            cur = node as usize;
        }
        debug_assert_eq!(cur, to, "broken successor chain");
        out
    }

    /// Row-major `n x n` distance matrix.
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }
}

pub fn all_pairs_shortest_paths(inst: &Instance, weights: &[f64]) -> ShortestPathTable {
    assert_eq!(weights.len(), inst.edge_count(), "one weight per edge");
    debug_assert!(weights.iter().all(|&w| w >= 0.0), "weights must be nonnegative");
    let n = inst.node_count;
    let mut dist = vec![f64::INFINITY; n * n];
    let mut hops = vec![NO_HOP; n * n];
    let mut next = vec![(u32::MAX, u32::MAX); n * n];
    for v in 0..n {
        dist[v * n + v] = 0.0;
        hops[v * n + v] = 0;
    }
    for e in &inst.edges {
        let w = weights[e.id];
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            dist[a * n + b] = w;
            hops[a * n + b] = 1;
            next[a * n + b] = (b as u32, e.id as u32);
        }
    }

    for k in 0..n {
        for i in 0..n {
            let ik = i * n + k;
            if hops[ik] == NO_HOP {
                continue;
            }
            let (d_ik, h_ik, next_ik) = (dist[ik], hops[ik], next[ik]);
            for j in 0..n {
                let kj = k * n + j;
                if hops[kj] == NO_HOP {
                    continue;
                }
                let cand = d_ik + dist[kj];
                let cand_hops = h_ik + hops[kj];
                let ij = i * n + j;
                if cand < dist[ij] || (cand == dist[ij] && cand_hops < hops[ij]) {
                    dist[ij] = cand;
                    hops[ij] = cand_hops;
                    next[ij] = next_ik;
                }
            }
        }
    }

    ShortestPathTable { n, dist, hops, next }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tri3;

    #[test]
    fn tri3_detour_is_cheaper() {
        let sp = all_pairs_shortest_paths(&tri3(), &[1.0, 1.0, 3.0]);
        assert_eq!(sp.dist(0, 2), 2.0);
        assert_eq!(sp.path(0, 2), [0, 1]);
        assert_eq!(sp.path(2, 0), [1, 0]);
    }

    #[test]
    fn zero_weights_prefer_fewest_edges() {
        let inst = tri3();
        let sp = all_pairs_shortest_paths(&inst, &[0.0; 3]);
        assert!(sp.distances().iter().all(|&d| d == 0.0));
        assert_eq!(sp.path(0, 2), [2]);
    }

    #[test]
    fn diagonal_is_empty() {
        let sp = all_pairs_shortest_paths(&tri3(), &[1.0, 2.0, 3.0]);
        for v in 0..3 {
            assert_eq!(sp.dist(v, v), 0.0);
            assert!(sp.path(v, v).is_empty());
        }
    }

    #[test]
    fn equal_cost_equal_hops_keeps_lowest_intermediate() {
        // square 0-1-3, 0-2-3 with equal weights
        let inst = crate::fixtures::build(
            "sq",
            4,
            &[(0, 1, &[(1, 1)]), (1, 3, &[(1, 1)]), (0, 2, &[(1, 1)]), (2, 3, &[(1, 1)])],
            &[],
        );
        let sp = all_pairs_shortest_paths(&inst, &[1.0; 4]);
        assert_eq!(sp.path(0, 3), [0, 1]);
        assert_eq!(sp.path(3, 0), [1, 0]);
    }
}
