//! Homomorphism counts for small patterns and codegree statistics.
//!
//! Counts for the four larger patterns go through a dense codegree matrix, so
//! they are restricted to graphs with at most [`DENSE_CAP`] vertices — ample
//! for the dense graphs this crate targets, and small enough that all counts
//! fit in `u64` comfortably.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::graph::Graph;

/// Largest vertex count supported by the matrix-backed pattern counts.
pub const DENSE_CAP: u32 = 1024;

/// Patterns tracked by the quasirandomness diagnostics.
///
/// `Theta6` is the 6-vertex theta graph: an edge plus two internally disjoint
/// paths of length 3 between its endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    K2,
    P3,
    K3,
    C4,
    K4Minus,
    Theta6,
}

impl Pattern {
    pub fn vertex_count(self) -> u32 {
        match self {
            Pattern::K2 => 2,
            Pattern::P3 | Pattern::K3 => 3,
            Pattern::C4 | Pattern::K4Minus => 4,
            Pattern::Theta6 => 6,
        }
    }

    pub fn edges(self) -> &'static [(u32, u32)] {
        match self {
            Pattern::K2 => &[(0, 1)],
            Pattern::P3 => &[(0, 1), (1, 2)],
            Pattern::K3 => &[(0, 1), (1, 2), (2, 0)],
            Pattern::C4 => &[(0, 1), (1, 2), (2, 3), (3, 0)],
            Pattern::K4Minus => &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
            Pattern::Theta6 => &[(0, 1), (0, 2), (2, 3), (3, 1), (0, 4), (4, 5), (5, 1)],
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Pattern::K2 => "K2",
            Pattern::P3 => "P3",
            Pattern::K3 => "K3",
            Pattern::C4 => "C4",
            Pattern::K4Minus => "K4-",
            Pattern::Theta6 => "Theta6",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomCounts {
    pub pattern: Pattern,
    pub count: u64,
    /// `count / n^{|V(F)|}`.
    pub density: f64,
}

/// Number of homomorphisms from `pattern` into `g`.
pub fn hom_count(g: &Graph, pattern: Pattern) -> HomCounts {
    let n = g.n();
    let count = match pattern {
        Pattern::K2 => 2 * g.edge_count() as u64,
        Pattern::P3 => (0..n).map(|v| (g.degree(v) as u64).pow(2)).sum(),
        _ => {
            assert!(n <= DENSE_CAP, "pattern {pattern} needs n <= {DENSE_CAP}, got {n}");
            let codeg = codegree_matrix(g);
            match pattern {
                Pattern::K3 => 2 * sum_over_edges(g, |u, v| at(&codeg, n, u, v) as u64),
                Pattern::C4 => {
                    let off: u64 = (0..n)
                        .flat_map(|u| (0..n).map(move |v| (u, v)))
                        .filter(|&(u, v)| u != v)
                        .map(|(u, v)| (at(&codeg, n, u, v) as u64).pow(2))
                        .sum();
                    let diag: u64 = (0..n).map(|v| (g.degree(v) as u64).pow(2)).sum();
                    off + diag
                }
                Pattern::K4Minus => {
                    2 * sum_over_edges(g, |u, v| (at(&codeg, n, u, v) as u64).pow(2))
                }
                Pattern::Theta6 => {
                    2 * sum_over_edges(g, |u, v| three_walks(g, &codeg, u, v).pow(2))
                }
                Pattern::K2 | Pattern::P3 => unreachable!(),
            }
        }
    };
    let density = if n == 0 {
        0.0
    } else {
        count as f64 / (n as f64).powi(pattern.vertex_count() as i32)
    };
    HomCounts { pattern, count, density }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCodegree {
    pub u: u32,
    pub v: u32,
    /// Common neighbors of `u` and `v`.
    pub codegree: u32,
    /// Simple paths of length 3 between `u` and `v`.
    pub path3: u64,
    /// Whether the codegree lies in `[(1 - lambda) n p^2, (1 + lambda) n p^2]`.
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodegreeStats {
    pub p: f64,
    pub lambda: f64,
    /// Target codegree `n p^2`.
    pub reference: f64,
    /// One entry per edge, in edge-list order.
    pub per_edge: Vec<EdgeCodegree>,
    /// `2 sum over edges of |codegree - n p^2|`.
    pub deviation_sum: f64,
    pub balanced_count: usize,
}

/// Codegree and 3-path statistics per edge, against target density `p`.
pub fn codegree_stats(g: &Graph, p: f64, lambda: f64) -> CodegreeStats {
    let n = g.n();
    assert!(n <= DENSE_CAP, "codegree statistics need n <= {DENSE_CAP}, got {n}");
    let codeg = codegree_matrix(g);
    let reference = n as f64 * p * p;
    let lo = (1.0 - lambda) * reference;
    let hi = (1.0 + lambda) * reference;
    let mut per_edge = Vec::with_capacity(g.edge_count());
    let mut deviation_sum = 0.0;
    let mut balanced_count = 0;
    for &(u, v) in g.edges() {
        let c = at(&codeg, n, u, v);
        let walks = three_walks(g, &codeg, u, v);
        let degenerate = (g.degree(u) + g.degree(v) - 1) as u64;
        let balanced = c as f64 >= lo && c as f64 <= hi;
        balanced_count += balanced as usize;
        deviation_sum += 2.0 * (c as f64 - reference).abs();
        per_edge.push(EdgeCodegree { u, v, codegree: c, path3: walks - degenerate, balanced });
    }
    CodegreeStats { p, lambda, reference, per_edge, deviation_sum, balanced_count }
}

fn sum_over_edges(g: &Graph, mut f: impl FnMut(u32, u32) -> u64) -> u64 {
    g.edges().iter().map(|&(u, v)| f(u, v)).sum()
}

fn codegree_matrix(g: &Graph) -> Vec<u32> {
    let n = g.n() as usize;
    let mut m = vec![0u32; n * n];
    for x in 0..g.n() {
        let nb = g.neighbors(x);
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                m[u as usize * n + v as usize] += 1;
                m[v as usize * n + u as usize] += 1;
            }
        }
    }
    m
}

fn at(codeg: &[u32], n: u32, u: u32, v: u32) -> u32 {
    codeg[u as usize * n as usize + v as usize]
}

/// Walks of length 3 from `u` to `v`, i.e. `(A^3)_{uv}`.
fn three_walks(g: &Graph, codeg: &[u32], u: u32, v: u32) -> u64 {
    let n = g.n();
    g.neighbors(u)
        .iter()
        .map(|&x| if x == v { g.degree(v) as u64 } else { at(codeg, n, x, v) as u64 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All vertex maps that send pattern edges to edges.
    fn naive_hom(g: &Graph, pattern: Pattern) -> u64 {
        let k = pattern.vertex_count() as usize;
        let n = g.n() as u64;
        let mut count = 0;
        let total = n.pow(k as u32);
        for code in 0..total {
            let mut map = [0u32; 6];
            let mut c = code;
            for slot in map.iter_mut().take(k) {
                *slot = (c % n) as u32;
                c /= n;
            }
            if pattern.edges().iter().all(|&(a, b)| g.has_edge(map[a as usize], map[b as usize])) {
                count += 1;
            }
        }
        count
    }

    const ALL: [Pattern; 6] =
        [Pattern::K2, Pattern::P3, Pattern::K3, Pattern::C4, Pattern::K4Minus, Pattern::Theta6];

    #[test]
    fn frozen_small_counts() {
        let k3 = Graph::complete(3);
        assert_eq!(hom_count(&k3, Pattern::K2).count, 6);
        assert_eq!(hom_count(&k3, Pattern::K3).count, 6);
        let c4 = Graph::cycle(4);
        assert_eq!(hom_count(&c4, Pattern::C4).count, 32);
        assert_eq!(hom_count(&c4, Pattern::K3).count, 0);
        assert_eq!(hom_count(&Graph::complete(4), Pattern::K4Minus).count, 48);
    }

    #[test]
    fn formulas_match_naive_enumeration() {
        let graphs = [
            Graph::complete(4),
            Graph::complete(5),
            Graph::cycle(5),
            Graph::complete_bipartite(3, 3),
            Graph::path(6),
            Graph::gnp(7, 0.5, 1),
            Graph::gnp(8, 0.4, 2),
            Graph::gnp(8, 0.7, 3),
            Graph::gnp(6, 0.9, 4),
            Graph::from_edges(1, []).unwrap(),
        ];
        for g in &graphs {
            for p in ALL {
                assert_eq!(hom_count(g, p).count, naive_hom(g, p), "{p} on n={}", g.n());
            }
        }
    }

    #[test]
    fn density_normalisation() {
        let g = Graph::complete(4);
        let h = hom_count(&g, Pattern::K2);
        assert!((h.density - 12.0 / 16.0).abs() < 1e-12);
        let h = hom_count(&g, Pattern::K3);
        assert!((h.density - 24.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn four_cycle_count_has_two_routes() {
        // hom(C4) = 2 sum_E path3 + 2 hom(P3) - 2e, with path3 the number of
        // simple 3-paths joining the endpoints of an edge.
        for seed in 0..20 {
            let g = Graph::gnp(30, 0.4, seed);
            let direct = hom_count(&g, Pattern::C4).count;
            let stats = codegree_stats(&g, 0.4, 0.5);
            let path3: u64 = stats.per_edge.iter().map(|e| e.path3).sum();
            let p3 = hom_count(&g, Pattern::P3).count;
            let e = g.edge_count() as u64;
            assert_eq!(direct, 2 * path3 + 2 * p3 - 2 * e);
        }
    }

    #[test]
    fn triangle_codegrees_deviate_by_twelve() {
        let stats = codegree_stats(&Graph::complete(3), 1.0, 0.5);
        assert_eq!(stats.per_edge.len(), 3);
        for e in &stats.per_edge {
            assert_eq!(e.codegree, 1);
            assert_eq!(e.path3, 0);
        }
        assert!((stats.deviation_sum - 12.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_has_zero_deviation() {
        let g = Graph::from_edges(5, []).unwrap();
        let stats = codegree_stats(&g, 0.3, 0.5);
        assert_eq!(stats.per_edge.len(), 0);
        assert_eq!(stats.deviation_sum, 0.0);
        assert_eq!(stats.balanced_count, 0);
    }

    #[test]
    fn stats_match_independent_recount() {
        let g = Graph::gnp(60, 0.5, 7);
        let stats = codegree_stats(&g, 0.5, 0.25);
        let lo = (1.0 - 0.25) * 60.0 * 0.25;
        let hi = (1.0 + 0.25) * 60.0 * 0.25;
        let mut dev = 0.0;
        let mut balanced = 0;
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            let c = (0..60)
                .filter(|&x| x != u && x != v && g.has_edge(x, u) && g.has_edge(x, v))
                .count() as u32;
            assert_eq!(stats.per_edge[i].codegree, c, "codegree of ({u},{v})");
            let mut paths = 0u64;
            for &x in g.neighbors(u) {
                for &y in g.neighbors(v) {
                    if x != v && y != u && x != y && g.has_edge(x, y) {
                        paths += 1;
                    }
                }
            }
            assert_eq!(stats.per_edge[i].path3, paths, "3-paths of ({u},{v})");
            let in_band = c as f64 >= lo && c as f64 <= hi;
            assert_eq!(stats.per_edge[i].balanced, in_band);
            balanced += in_band as usize;
            dev += 2.0 * (c as f64 - 15.0).abs();
        }
        assert!((stats.deviation_sum - dev).abs() < 1e-9);
        assert_eq!(stats.balanced_count, balanced);
    }
}
