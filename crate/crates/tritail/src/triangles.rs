//! Triangle counts, co-degrees, and per-round percolation statistics.
//!
//! For a graph G and a vertex pair e = {u,v} (edge or not), the co-degree
//! Y_e is the number of common neighbors of u and v, i.e. the number of
//! edge pairs completing e to a triangle. Z_e is Y_e when e is an edge of
//! G and 0 otherwise. [`RoundStats`] collects the exact aggregates the
//! concentration argument consumes: the triangle count X, max Y over all
//! pairs, sum of Z, and the exact (128-bit) sum of Z^2.
//!
//! Two independent computation routes are kept deliberately separate:
//! [`count_triangles`] uses a degree-ordered orientation, while the
//! co-degree passes in [`round_stats`] work on the unoriented graph. The
//! identity sum(Z) = 3X across the two routes is a cross-check, not a
//! definition.

use rayon::prelude::*;

use crate::graph::{percolate, Graph};
use crate::{Error, Result};

/// Controls the max-Y quantifier in [`round_stats_with`].
#[derive(Clone, Debug)]
pub struct StatsOptions {
    /// Largest vertex count for which max Y is taken exactly over all
    /// C(n,2) pairs. Above it the all-pairs pass (Theta(n^2) at best) is
    /// replaced by the edge maximum plus a probe of the non-edges incident
    /// to the `APPROX_TOP_VERTICES` highest-degree vertices, and the
    /// result is flagged approximate.
    pub exact_max_y_limit: usize,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            exact_max_y_limit: 10_000,
        }
    }
}

/// Vertices probed for non-edge co-degrees when the exact all-pairs pass
/// is out of budget. With n <= this the probe degenerates to an exact pass
/// (every pair has an endpoint among the top n vertices).
pub const APPROX_TOP_VERTICES: usize = 1024;

const DENSE_BITMAP_MAX_N: usize = 32_768;

/// Exact per-round observables of one graph in the percolation process.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RoundStats {
    /// Round index i (0 = the initial complete graph).
    pub round: u32,
    /// Edge count of G_i.
    pub edges: u64,
    /// Triangle count X_i.
    pub x: u64,
    /// max over vertex pairs e of Y_e. Exact over all C(n,2) pairs when
    /// `max_y_exact`, otherwise a lower bound (see [`StatsOptions`]).
    pub max_y: u64,
    /// sum over edges e of Z_e; equals 3 X_i (every triangle is counted
    /// once per side).
    pub sum_z: u64,
    /// sum over edges e of Z_e^2, exact. Z_e <= n-2 over up to C(n,2)
    /// edges can reach n^4, past u64 near n = 1e5.
    pub sum_z2: u128,
    /// Whether `max_y` was computed over all pairs.
    pub max_y_exact: bool,
}

/// Exact number of triangles in `g`.
///
/// Edges are oriented from low to high (degree, id) rank; each triangle is
/// counted once at its lowest-rank vertex. The intersection work is
/// O(sum over oriented edges of min out-degree), O(m^{3/2}) in the worst
/// case, and switches to bitset rows with popcount when the graph is dense
/// enough that merges would be slower.
pub fn count_triangles(g: &Graph) -> u64 {
    let n = g.n();
    if n < 3 || g.m() < 3 {
        return 0;
    }
    let oriented = OrientedCsr::build(g);
    let words = n.div_ceil(64);
    let sparse_cost = oriented.merge_cost();
    let bitmap_cost = (g.m() as u128 + (n as u128) / 8) * words as u128;
    if n <= DENSE_BITMAP_MAX_N && bitmap_cost < sparse_cost {
        oriented.count_bitmap(words)
    } else {
        oriented.count_merge()
    }
}

/// Out-adjacency in rank space: vertex ranks ascend by (degree, id), and
/// each list holds the higher-ranked neighbors, sorted.
struct OrientedCsr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl OrientedCsr {
    fn build(g: &Graph) -> OrientedCsr {
        let n = g.n();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by_key(|&v| (g.degree(v), v));
        let mut rank = vec![0u32; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(g.m() as usize);
        offsets.push(0);
        for &v in &order {
            let r = rank[v as usize];
            let start = targets.len();
            targets.extend(g.neighbors(v).iter().map(|&u| rank[u as usize]).filter(|&ru| ru > r));
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        OrientedCsr { offsets, targets }
    }

    fn out(&self, r: usize) -> &[u32] {
        &self.targets[self.offsets[r]..self.offsets[r + 1]]
    }

    fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total element count touched by the merge strategy.
    fn merge_cost(&self) -> u128 {
        let n = self.n();
        let mut in_deg = vec![0u64; n];
        for &s in &self.targets {
            in_deg[s as usize] += 1;
        }
        let mut cost = 0u128;
        for r in 0..n {
            let len = self.out(r).len() as u128;
            cost += len * len + len * in_deg[r] as u128;
        }
        cost
    }

    fn count_merge(&self) -> u64 {
        (0..self.n())
            .into_par_iter()
            .with_min_len(64)
            .map(|r| {
                let a = self.out(r);
                let mut local = 0u64;
                for &s in a {
                    local += intersect_count(a, self.out(s as usize));
                }
                local
            })
            .sum()
    }

    fn count_bitmap(&self, words: usize) -> u64 {
        let n = self.n();
        let mut rows = vec![0u64; n * words];
        for r in 0..n {
            let row = &mut rows[r * words..(r + 1) * words];
            for &s in self.out(r) {
                row[s as usize / 64] |= 1u64 << (s % 64);
            }
        }
        (0..n)
            .into_par_iter()
            .with_min_len(16)
            .map(|r| {
                let row_r = &rows[r * words..(r + 1) * words];
                let mut local = 0u64;
                for &s in self.out(r) {
                    let row_s = &rows[s as usize * words..(s as usize + 1) * words];
                    local += and_popcount(row_r, row_s);
                }
                local
            })
            .sum()
    }
}

fn intersect_count(a: &[u32], b: &[u32]) -> u64 {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[inline]
fn and_popcount(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x & y).count_ones() as u64)
        .sum()
}

/// Number of common neighbors of `u` and `v` (the pair need not be an
/// edge).
pub fn codegree(g: &Graph, u: u32, v: u32) -> Result<u64> {
    if u == v {
        return Err(Error::invalid("v", "co-degree needs two distinct vertices"));
    }
    if u as usize >= g.n() || v as usize >= g.n() {
        return Err(Error::invalid("v", "vertex out of range"));
    }
    Ok(intersect_count(g.neighbors(u), g.neighbors(v)))
}

/// [`round_stats_with`] under default options, round index 0.
pub fn round_stats(g: &Graph) -> RoundStats {
    round_stats_with(g, &StatsOptions::default(), 0)
}

/// Computes the exact round statistics of `g`.
///
/// `sum_z` and `sum_z2` range over the edges of `g` (Z vanishes off the
/// graph, so those sums equal the corresponding sums over all pairs).
/// `max_y` quantifies over all C(n,2) pairs, exactly when within
/// `opts.exact_max_y_limit`, approximately (and flagged) above it.
///
/// X is computed by [`count_triangles`], independently of the co-degree
/// pass that produces the Z sums.
pub fn round_stats_with(g: &Graph, opts: &StatsOptions, round: u32) -> RoundStats {
    let n = g.n() as u64;
    if g.is_complete() {
        // Closed forms for K_n: every pair is an edge with co-degree n-2.
        let c2 = n * (n - 1) / 2;
        let c3 = n * (n - 1) * (n - 2) / 6;
        let y = n.saturating_sub(2);
        return RoundStats {
            round,
            edges: c2,
            x: c3,
            max_y: y,
            sum_z: 3 * c3,
            sum_z2: c2 as u128 * (y as u128) * (y as u128),
            max_y_exact: true,
        };
    }

    let exact = g.n() <= opts.exact_max_y_limit;
    let words = g.n().div_ceil(64);
    let wedge_cost: u128 = (0..g.n() as u32).map(|v| (g.degree(v) as u128).pow(2)).sum();
    let bitmap_allowed = g.n() <= DENSE_BITMAP_MAX_N;
    let pair_count = n as u128 * (n as u128 - 1) / 2;
    let bitmap_cost =
        (g.m() as u128 + if exact { pair_count } else { 0 }) * words as u128;

    let agg = if bitmap_allowed && bitmap_cost < wedge_cost {
        bitmap_pass(g, exact, words)
    } else {
        wedge_pass(g, exact)
    };

    let mut max_y = agg.max_all.max(agg.max_edge);
    let mut max_y_exact = true;
    if !exact {
        max_y = max_y.max(top_vertex_nonedge_probe(g));
        max_y_exact = false;
    }

    RoundStats {
        round,
        edges: g.m(),
        x: count_triangles(g),
        max_y,
        sum_z: agg.sum_z,
        sum_z2: agg.sum_z2,
        max_y_exact,
    }
}

#[derive(Clone, Copy, Default)]
struct CodegreeAgg {
    sum_z: u64,
    sum_z2: u128,
    max_edge: u64,
    /// max Y over pairs scanned beyond the edges (0 when the all-pairs
    /// scan was skipped).
    max_all: u64,
}

impl CodegreeAgg {
    fn merge(self, other: CodegreeAgg) -> CodegreeAgg {
        CodegreeAgg {
            sum_z: self.sum_z + other.sum_z,
            sum_z2: self.sum_z2 + other.sum_z2,
            max_edge: self.max_edge.max(other.max_edge),
            max_all: self.max_all.max(other.max_all),
        }
    }
}

/// Wedge accumulation: for each u, walk neighbors-of-neighbors and count
/// paths u-w-v, which is exactly Y_{u,v}. Cost sum_v deg(v)^2; preferable
/// on sparse graphs.
fn wedge_pass(g: &Graph, all_pairs: bool) -> CodegreeAgg {
    let n = g.n();
    (0..n as u32)
        .into_par_iter()
        .with_min_len(128)
        .fold(
            || (vec![0u32; n], Vec::new(), CodegreeAgg::default()),
            |(mut counts, mut touched, mut agg), u| {
                for &w in g.neighbors(u) {
                    for &v in g.neighbors(w) {
                        if v != u {
                            let c = &mut counts[v as usize];
                            if *c == 0 {
                                touched.push(v);
                            }
                            *c += 1;
                        }
                    }
                }
                if all_pairs {
                    for &v in &touched {
                        if v > u {
                            agg.max_all = agg.max_all.max(counts[v as usize] as u64);
                        }
                    }
                }
                for &v in g.neighbors(u) {
                    if v > u {
                        let y = counts[v as usize] as u64;
                        agg.max_edge = agg.max_edge.max(y);
                        agg.sum_z += y;
                        agg.sum_z2 += (y as u128) * (y as u128);
                    }
                }
                for &v in &touched {
                    counts[v as usize] = 0;
                }
                touched.clear();
                (counts, touched, agg)
            },
        )
        .map(|(_, _, agg)| agg)
        .reduce(CodegreeAgg::default, CodegreeAgg::merge)
}

/// Bitset-row accumulation: co-degrees via AND + popcount. Cost is
/// (pairs considered) * n/64 words, independent of density; preferable on
/// dense graphs.
fn bitmap_pass(g: &Graph, all_pairs: bool, words: usize) -> CodegreeAgg {
    let n = g.n();
    let mut rows = vec![0u64; n * words];
    for u in 0..n {
        let row = &mut rows[u * words..(u + 1) * words];
        for &v in g.neighbors(u as u32) {
            row[v as usize / 64] |= 1u64 << (v % 64);
        }
    }
    let row = |v: usize| &rows[v * words..(v + 1) * words];

    let mut agg = (0..n as u32)
        .into_par_iter()
        .with_min_len(16)
        .map(|u| {
            let mut local = CodegreeAgg::default();
            let row_u = row(u as usize);
            for &v in g.neighbors(u) {
                if v > u {
                    let y = and_popcount(row_u, row(v as usize));
                    local.max_edge = local.max_edge.max(y);
                    local.sum_z += y;
                    local.sum_z2 += (y as u128) * (y as u128);
                }
            }
            local
        })
        .reduce(CodegreeAgg::default, CodegreeAgg::merge);

    if all_pairs {
        // Blocked scan over the upper triangle: keep a block of v-rows hot
        // in cache while streaming each u-row past it once.
        const BLOCK: usize = 512;
        agg.max_all = (0..n.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| {
                let v_lo = b * BLOCK;
                let v_hi = (v_lo + BLOCK).min(n);
                let mut max = 0u64;
                for u in 0..v_hi.saturating_sub(1) {
                    let row_u = row(u);
                    for v in (u + 1).max(v_lo)..v_hi {
                        max = max.max(and_popcount(row_u, row(v)));
                    }
                }
                max
            })
            .reduce(|| 0, u64::max);
    }
    agg
}

/// Max co-degree over pairs incident to the highest-degree vertices.
/// Every pair with an endpoint in the probe set is covered, so for
/// n <= APPROX_TOP_VERTICES this equals the exact all-pairs maximum.
fn top_vertex_nonedge_probe(g: &Graph) -> u64 {
    let n = g.n();
    let mut by_degree: Vec<u32> = (0..n as u32).collect();
    by_degree.sort_unstable_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    by_degree.truncate(APPROX_TOP_VERTICES);

    by_degree
        .into_par_iter()
        .with_min_len(8)
        .fold(
            || (vec![0u32; n], Vec::new(), 0u64),
            |(mut counts, mut touched, mut max), u| {
                for &w in g.neighbors(u) {
                    for &v in g.neighbors(w) {
                        if v != u {
                            let c = &mut counts[v as usize];
                            if *c == 0 {
                                touched.push(v);
                            }
                            *c += 1;
                        }
                    }
                }
                for &v in &touched {
                    max = max.max(counts[v as usize] as u64);
                    counts[v as usize] = 0;
                }
                touched.clear();
                (counts, touched, max)
            },
        )
        .map(|(_, _, max)| max)
        .reduce(|| 0, u64::max)
}

/// Result of toggling one edge's percolation outcome.
///
/// The probe percolates `g_i` once, then flips the outcome of edge `e`
/// while keeping every other edge's outcome fixed, and reports the
/// observed changes in the next round's triangle count X and in
/// Z = sum_e Z^2 against their analytic caps.
#[derive(Clone, Debug)]
pub struct InfluenceProbe {
    pub edge: (u32, u32),
    /// Z_{i,e} of the probed edge in g_i.
    pub z_value: u64,
    /// |Delta X_{i+1}|; at most `z_value`.
    pub delta_x: u64,
    /// |Delta sum Z_{i+1}^2|.
    pub delta_z: u128,
    /// Lipschitz cap on `delta_x` (equals `z_value`).
    pub delta_x_cap: u64,
    /// Cap 7 Z_{i,e} * max{4 n eps^{2i} + lambda sqrt(4 n eps^{2i}), lambda^2}.
    pub delta_z_cap: f64,
}

/// Measures the influence of a single edge `e` of `g_i` on the next
/// percolation round.
///
/// Both graphs of the coupled pair share every edge outcome except `e`'s,
/// which is flipped; this realizes the bounded-differences setup the
/// concentration bounds quantify over.
pub fn influence_probe(
    g_i: &Graph,
    e: (u32, u32),
    eps: f64,
    seed: u64,
    lambda: f64,
    round_i: u32,
) -> Result<InfluenceProbe> {
    let (u, v) = e;
    if !g_i.has_edge(u, v) {
        return Err(Error::invalid("e", format!("({u},{v}) is not an edge of g_i")));
    }
    let z_value = codegree(g_i, u, v)?;

    let base = percolate(g_i, eps, seed)?;
    let flipped = toggle_edge(&base, u, v)?;

    let x_base = count_triangles(&base);
    let x_flip = count_triangles(&flipped);
    let z_base = round_stats(&base).sum_z2;
    let z_flip = round_stats(&flipped).sum_z2;

    let n = g_i.n() as f64;
    let a = 4.0 * n * eps.powi(2 * round_i as i32);
    let y_cap = (a + lambda * a.sqrt()).max(lambda * lambda);

    Ok(InfluenceProbe {
        edge: e,
        z_value,
        delta_x: x_base.abs_diff(x_flip),
        delta_z: z_base.abs_diff(z_flip),
        delta_x_cap: z_value,
        delta_z_cap: 7.0 * z_value as f64 * y_cap,
    })
}

fn toggle_edge(g: &Graph, u: u32, v: u32) -> Result<Graph> {
    let present = g.has_edge(u, v);
    let edges = g
        .edges()
        .filter(|&(a, b)| (a, b) != (u.min(v), u.max(v)))
        .chain(if present { None } else { Some((u, v)) });
    Graph::from_edges(g.n(), edges)
}
