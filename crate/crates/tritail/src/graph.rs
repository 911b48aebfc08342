//! Sparse undirected simple graphs and the two edge samplers.
//!
//! Vertices are dense 0-based integers. The adjacency structure keeps one
//! ascending neighbor list per vertex; all construction paths enforce
//! symmetry, sortedness, and the absence of loops and duplicate edges.
//! Graphs are immutable after construction and safe to share across
//! threads.

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Sparse undirected simple graph on `n` labeled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    m: u64,
}

impl Graph {
    /// Empty graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::invalid("n", "vertex count must be at least 1"));
        }
        Ok(Graph {
            n,
            adj: vec![Vec::new(); n],
            m: 0,
        })
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::invalid("n", "vertex count must be at least 1"));
        }
        let mut adj = Vec::with_capacity(n);
        for v in 0..n as u32 {
            let mut row = Vec::with_capacity(n - 1);
            row.extend((0..v).chain(v + 1..n as u32));
            adj.push(row);
        }
        Ok(Graph {
            n,
            adj,
            m: n as u64 * (n as u64 - 1) / 2,
        })
    }

    /// Builds a graph from an edge list. Duplicate edges collapse to one;
    /// self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        if n == 0 {
            return Err(Error::invalid("n", "vertex count must be at least 1"));
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid("edges", format!("self-loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(
                    "edges",
                    format!("edge ({u},{v}) out of range for n = {n}"),
                ));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut m = 0u64;
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
            m += row.len() as u64;
        }
        Ok(Graph { n, adj, m: m / 2 })
    }

    /// Builds directly from ascending-sorted `(u, v)` pairs with `u < v`,
    /// no duplicates. Used by the samplers, which produce edges in exactly
    /// that order.
    fn from_sorted_pairs(n: usize, pairs: &[(u32, u32)]) -> Graph {
        let mut deg = vec![0u32; n];
        for &(u, v) in pairs {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut adj: Vec<Vec<u32>> = deg.iter().map(|&d| Vec::with_capacity(d as usize)).collect();
        // Pairs arrive lexicographically, so pushing v onto adj[u] keeps
        // adj[u] sorted. adj[v] receives u values in ascending order too,
        // because u is the outer (non-decreasing) coordinate.
        for &(u, v) in pairs {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Graph {
            n,
            adj,
            m: pairs.len() as u64,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Ascending neighbor list of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    /// Iterates edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, row)| {
            let u = u as u32;
            let start = row.partition_point(|&w| w <= u);
            row[start..].iter().map(move |&v| (u, v))
        })
    }

    pub fn is_complete(&self) -> bool {
        self.m == self.n as u64 * (self.n as u64 - 1) / 2
    }

    /// Full structural invariant check: sorted unique neighbor lists, no
    /// loops, symmetric adjacency, consistent edge count. Intended for
    /// tests; cost is O(n + m log m).
    pub fn check_invariants(&self) -> bool {
        let mut half_edges = 0u64;
        for (u, row) in self.adj.iter().enumerate() {
            half_edges += row.len() as u64;
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return false;
                }
            }
            for &v in row {
                if v as usize == u || v as usize >= self.n {
                    return false;
                }
                if self.adj[v as usize].binary_search(&(u as u32)).is_err() {
                    return false;
                }
            }
        }
        half_edges == 2 * self.m
    }
}

/// Maps a linear index `k` in `0..C(n,2)` to the k-th pair `(u, v)`,
/// `u < v`, in lexicographic order.
fn pair_from_index(n: u64, k: u64) -> (u32, u32) {
    // Find the largest u with base(u) = u*n - u*(u+1)/2 <= k via the
    // quadratic formula, then correct for rounding.
    let nf = n as f64;
    let kf = k as f64;
    let mut u = ((2.0 * nf - 1.0 - ((2.0 * nf - 1.0).powi(2) - 8.0 * kf).max(0.0).sqrt()) / 2.0)
        .floor() as u64;
    let base = |u: u64| u * n - u * (u + 1) / 2;
    while u > 0 && base(u) > k {
        u -= 1;
    }
    while base(u + 1) <= k {
        u += 1;
    }
    let v = u + 1 + (k - base(u));
    debug_assert!(v < n);
    (u as u32, v as u32)
}

/// Samples G(n,p): each of the C(n,2) possible edges appears independently
/// with probability `p`. Deterministic given `seed`.
///
/// Uses geometric jump-ahead over the lexicographic pair sequence, so the
/// expected cost is O(p n^2) rather than O(n^2).
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n", "vertex count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("probability {p} outside [0,1]")));
    }
    if p == 0.0 {
        return Graph::empty(n);
    }
    if p == 1.0 {
        return Graph::complete(n);
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    let mut rng = SplitMix64::new(seed);
    let mut pairs = Vec::with_capacity((p * total as f64 * 1.1) as usize + 16);
    let mut cursor = 0u64;
    loop {
        let skip = rng.geometric_skip(p);
        if skip >= total - cursor {
            break;
        }
        cursor += skip;
        pairs.push(pair_from_index(n as u64, cursor));
        cursor += 1;
        if cursor >= total {
            break;
        }
    }
    Ok(Graph::from_sorted_pairs(n, &pairs))
}

/// Keeps every edge of `g` independently with probability `eps`.
/// The result is always a subgraph of `g` on the same vertex set.
/// Deterministic given `seed`: edges are visited in lexicographic order,
/// one Bernoulli draw each.
pub fn percolate(g: &Graph, eps: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid(
            "eps",
            format!("probability {eps} outside [0,1]"),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let expect = (eps * g.m() as f64 * 1.1) as usize + 16;
    let mut kept = Vec::with_capacity(expect.min(g.m() as usize));
    for (u, v) in g.edges() {
        if rng.bernoulli(eps) {
            kept.push((u, v));
        }
    }
    Ok(Graph::from_sorted_pairs(g.n(), &kept))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_sizes() {
        assert_eq!(Graph::complete(1).unwrap().m(), 0);
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(k4.m(), 6);
        // every pair of K_4 has co-degree 2
        for u in 0..4 {
            for v in (u + 1)..4 {
                let common = k4
                    .neighbors(u)
                    .iter()
                    .filter(|&&w| k4.has_edge(w, v))
                    .count();
                assert_eq!(common, 2);
            }
        }
        assert_eq!(Graph::complete(100).unwrap().m(), 4950);
        assert!(Graph::complete(0).is_err());
    }

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 5)]).is_err());
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.m(), 2); // duplicate collapsed
        assert!(g.check_invariants());
    }

    #[test]
    fn pair_index_roundtrip() {
        for n in [2u64, 3, 5, 17, 100] {
            let mut k = 0u64;
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    assert_eq!(pair_from_index(n, k), (u, v));
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn gnp_extremes() {
        let empty = sample_gnp(10, 0.0, 1).unwrap();
        assert_eq!(empty.m(), 0);
        let full = sample_gnp(10, 1.0, 1).unwrap();
        assert_eq!(full.m(), 45);
        assert!(sample_gnp(10, 1.5, 1).is_err());
        assert!(sample_gnp(10, -0.1, 1).is_err());
    }

    #[test]
    fn gnp_reproducible_and_valid() {
        let a = sample_gnp(200, 0.03, 77).unwrap();
        let b = sample_gnp(200, 0.03, 77).unwrap();
        assert_eq!(a, b);
        assert!(a.check_invariants());
        let c = sample_gnp(200, 0.03, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gnp_edge_count_mean() {
        // mean edge count over 10^4 seeds within 4 SE of C(500,2) * 0.01
        let (n, p, trials) = (500usize, 0.01f64, 10_000u64);
        let slots = (n * (n - 1) / 2) as f64;
        let mut total = 0u64;
        for seed in 0..trials {
            total += sample_gnp(n, p, seed).unwrap().m();
        }
        let mean = total as f64 / trials as f64;
        let se = (slots * p * (1.0 - p)).sqrt() / (trials as f64).sqrt();
        assert!(
            (mean - slots * p).abs() < 4.0 * se,
            "mean {mean} vs {} (se {se})",
            slots * p
        );
    }

    #[test]
    fn percolate_extremes() {
        let g = sample_gnp(50, 0.2, 5).unwrap();
        let same = percolate(&g, 1.0, 99).unwrap();
        assert_eq!(same, g);
        let none = percolate(&g, 0.0, 99).unwrap();
        assert_eq!(none.m(), 0);
        assert_eq!(none.n(), g.n());
        assert!(percolate(&g, 2.0, 0).is_err());
    }

    #[test]
    fn percolate_is_subgraph() {
        let g = sample_gnp(80, 0.3, 123).unwrap();
        let h = percolate(&g, 0.4, 321).unwrap();
        assert!(h.check_invariants());
        for (u, v) in h.edges() {
            assert!(g.has_edge(u, v));
        }
    }

    #[test]
    fn percolate_mean_retained() {
        // K_100 at eps = 0.1: mean retained edges within 4 SE of 495.
        let k100 = Graph::complete(100).unwrap();
        let (eps, trials) = (0.1f64, 10_000u64);
        let mut total = 0u64;
        for seed in 0..trials {
            total += percolate(&k100, eps, seed).unwrap().m();
        }
        let mean = total as f64 / trials as f64;
        let expect = 4950.0 * eps;
        let se = (4950.0 * eps * (1.0 - eps)).sqrt() / (trials as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * se, "mean {mean} (se {se})");
    }
}
