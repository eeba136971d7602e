//! Cycle hypergraphs over the arcs of an oriented piece, and the
//! bite-by-bite matching that covers them.
//!
//! Hypergraph vertices are arc ids of a digraph; each hyperedge is a
//! directed `r`-cycle, stored as its arc ids in traversal order and
//! enumerated canonically (lowest graph vertex first), so every directed
//! cycle appears exactly once and a cycle and its mirror image live in the
//! forward and reversed views respectively — sharing the same arc-id set,
//! which is how the second pass excludes mirrors of already-matched cycles.
//!
//! The matching proceeds in rounds: each round proposes every surviving
//! hyperedge independently with probability `bite / mean degree`, keeps a
//! disjoint subset of the proposals, and discards covered vertices.  A
//! final deterministic sweep makes the result maximal.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::graph::Digraph;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformHypergraph {
    r: usize,
    vertex_count: usize,
    edges: Vec<u32>,
}

impl UniformHypergraph {
    pub fn from_edge_lists(r: usize, vertex_count: usize, lists: &[Vec<u32>]) -> Self {
        let mut edges = Vec::with_capacity(lists.len() * r);
        for e in lists {
            assert_eq!(e.len(), r, "hyperedge arity mismatch");
            for &v in e {
                assert!((v as usize) < vertex_count, "hyperedge vertex out of range");
            }
            let mut sorted = e.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), r, "hyperedge vertices must be distinct");
            edges.extend_from_slice(e);
        }
        UniformHypergraph { r, vertex_count, edges }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        if self.r == 0 {
            0
        } else {
            self.edges.len() / self.r
        }
    }

    /// Arc ids of edge `idx`, in cycle traversal order.
    pub fn edge(&self, idx: usize) -> &[u32] {
        &self.edges[idx * self.r..(idx + 1) * self.r]
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.vertex_count];
        for &v in &self.edges {
            deg[v as usize] += 1;
        }
        deg
    }
}

fn visit_cycles(d: &Digraph, r: usize, visit: &mut dyn FnMut(&[u32]) -> bool) {
    assert!(r == 3 || r == 4, "only 3- and 4-cycles are enumerated");
    for u in 0..d.n() {
        for &(v, a_uv) in d.out(u) {
            if v <= u {
                continue;
            }
            for &(w, a_vw) in d.out(v) {
                if w <= u || w == v {
                    continue;
                }
                if r == 3 {
                    if let Some(a_wu) = d.arc_id(w, u) {
                        if !visit(&[a_uv, a_vw, a_wu]) {
                            return;
                        }
                    }
                } else {
                    for &(x, a_wx) in d.out(w) {
                        if x <= u || x == v || x == w {
                            continue;
                        }
                        if let Some(a_xu) = d.arc_id(x, u) {
                            if !visit(&[a_uv, a_vw, a_wx, a_xu]) {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// All directed `r`-cycles of `d` as a hypergraph over its arc ids.
pub fn build_cycle_hypergraph(d: &Digraph, r: usize) -> UniformHypergraph {
    let mut edges = Vec::new();
    visit_cycles(d, r, &mut |cycle| {
        edges.extend_from_slice(cycle);
        true
    });
    UniformHypergraph { r, vertex_count: d.arcs().len(), edges }
}

pub fn count_directed_cycles(d: &Digraph, r: usize) -> u64 {
    let mut count = 0u64;
    visit_cycles(d, r, &mut |_| {
        count += 1;
        true
    });
    count
}

/// Count until `cap` is exceeded; `None` means more than `cap` cycles.
pub fn count_directed_cycles_capped(d: &Digraph, r: usize, cap: u64) -> Option<u64> {
    let mut count = 0u64;
    visit_cycles(d, r, &mut |_| {
        count += 1;
        count <= cap
    });
    if count > cap {
        None
    } else {
        Some(count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NibbleDiagnostics {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub mean_degree: f64,
    pub max_degree: u32,
    /// Tolerance the band and codegree cap are derived from.
    pub delta: f64,
    /// Fraction of vertices whose degree lies in `(1 +- delta) * mean`.
    pub degree_band_fraction: f64,
    pub max_codegree: u32,
    /// `max(1, delta * mean_degree)`: pairs above this make an edge bad.
    pub codegree_cap: f64,
    pub bad_edge_count: usize,
}

/// Exact degree and codegree statistics of a cycle hypergraph.
pub fn diagnostics(h: &UniformHypergraph, delta: f64) -> NibbleDiagnostics {
    let deg = h.degrees();
    let n = h.vertex_count().max(1);
    let mean = deg.iter().map(|&d| f64::from(d)).sum::<f64>() / n as f64;
    let max_degree = deg.iter().copied().max().unwrap_or(0);
    let lo = (1.0 - delta) * mean;
    let hi = (1.0 + delta) * mean;
    let in_band = deg.iter().filter(|&&d| (lo..=hi).contains(&f64::from(d))).count();

    // Codegrees by sorting the packed vertex pairs of every edge.
    let mut pairs: Vec<u64> = Vec::new();
    for idx in 0..h.edge_count() {
        let e = h.edge(idx);
        for i in 0..h.r() {
            for j in i + 1..h.r() {
                let (a, b) = (e[i].min(e[j]), e[i].max(e[j]));
                pairs.push(u64::from(a) << 32 | u64::from(b));
            }
        }
    }
    pairs.sort_unstable();
    let mut unique: Vec<(u64, u32)> = Vec::new();
    for &p in &pairs {
        match unique.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => unique.push((p, 1)),
        }
    }
    let max_codegree = unique.iter().map(|&(_, c)| c).max().unwrap_or(0);
    let codegree_cap = (delta * mean).max(1.0);
    let mut bad = 0usize;
    for idx in 0..h.edge_count() {
        let e = h.edge(idx);
        let mut is_bad = false;
        'pairs: for i in 0..h.r() {
            for j in i + 1..h.r() {
                let (a, b) = (e[i].min(e[j]), e[i].max(e[j]));
                let key = u64::from(a) << 32 | u64::from(b);
                let pos = unique.binary_search_by_key(&key, |&(q, _)| q).expect("pair recorded");
                if f64::from(unique[pos].1) > codegree_cap {
                    is_bad = true;
                    break 'pairs;
                }
            }
        }
        if is_bad {
            bad += 1;
        }
    }
    NibbleDiagnostics {
        vertex_count: h.vertex_count(),
        edge_count: h.edge_count(),
        mean_degree: mean,
        max_degree,
        delta,
        degree_band_fraction: in_band as f64 / n as f64,
        max_codegree,
        codegree_cap,
        bad_edge_count: bad,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// Indices of the matched hyperedges.
    pub edges: Vec<usize>,
    /// `r |M| / |V|`: fraction of arcs covered.
    pub coverage_millionths: u64,
}

impl Matching {
    fn new(edges: Vec<usize>, h: &UniformHypergraph) -> Self {
        let coverage = if h.vertex_count() == 0 {
            0.0
        } else {
            (h.r() * edges.len()) as f64 / h.vertex_count() as f64
        };
        Matching { edges, coverage_millionths: (coverage * 1e6) as u64 }
    }

    pub fn coverage(&self) -> f64 {
        self.coverage_millionths as f64 / 1e6
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Sorted arc-id set of every matched edge.
    pub fn arc_sets(&self, h: &UniformHypergraph) -> Vec<Vec<u32>> {
        self.edges
            .iter()
            .map(|&idx| {
                let mut set = h.edge(idx).to_vec();
                set.sort_unstable();
                set
            })
            .collect()
    }
}

/// Default fraction of the surviving mean degree proposed per round.
pub const DEFAULT_BITE: f64 = 0.1;

/// Round-based randomized matching with a final maximality sweep.
pub fn greedy_matching(h: &UniformHypergraph, seed: u64, bite: f64) -> Matching {
    matching_excluding(h, &BTreeSet::new(), seed, bite)
}

/// Like [`greedy_matching`] but skipping hyperedges whose sorted arc-id set
/// appears in `excluded` — used to keep mirror cycles out of the second pass.
pub fn second_matching(
    h: &UniformHypergraph,
    excluded_sets: &[Vec<u32>],
    seed: u64,
    bite: f64,
) -> Matching {
    let excluded: BTreeSet<Vec<u32>> = excluded_sets.iter().cloned().collect();
    matching_excluding(h, &excluded, seed, bite)
}

fn matching_excluding(
    h: &UniformHypergraph,
    excluded: &BTreeSet<Vec<u32>>,
    seed: u64,
    bite: f64,
) -> Matching {
    assert!(bite > 0.0 && bite <= 1.0, "bite must lie in (0, 1]");
    let mut alive: Vec<usize> = (0..h.edge_count())
        .filter(|&idx| {
            if excluded.is_empty() {
                return true;
            }
            let mut set = h.edge(idx).to_vec();
            set.sort_unstable();
            !excluded.contains(&set)
        })
        .collect();
    let mut used = vec![false; h.vertex_count()];
    let mut matched = Vec::new();
    let mut round = 0u64;
    while !alive.is_empty() && round < 1000 {
        let mut deg_sum = 0u64;
        let mut touched: BTreeSet<u32> = BTreeSet::new();
        for &idx in &alive {
            deg_sum += h.r() as u64;
            touched.extend(h.edge(idx).iter().copied());
        }
        let mean = deg_sum as f64 / touched.len().max(1) as f64;
        let p = (bite / mean).min(1.0);
        let mut rng = rng::stream(rng::derive(seed, 0xb17e_0000 + round));
        let mut proposed: Vec<usize> =
            alive.iter().copied().filter(|_| rng::unit(&mut rng) < p).collect();
        rng::shuffle(&mut proposed, &mut rng);
        for idx in proposed {
            if h.edge(idx).iter().all(|&v| !used[v as usize]) {
                for &v in h.edge(idx) {
                    used[v as usize] = true;
                }
                matched.push(idx);
            }
        }
        alive.retain(|&idx| h.edge(idx).iter().all(|&v| !used[v as usize]));
        round += 1;
    }
    // Deterministic sweep: whatever survives and still fits goes in.
    for idx in alive {
        if h.edge(idx).iter().all(|&v| !used[v as usize]) {
            for &v in h.edge(idx) {
                used[v as usize] = true;
            }
            matched.push(idx);
        }
    }
    matched.sort_unstable();
    Matching::new(matched, h)
}
