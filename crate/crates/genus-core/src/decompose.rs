//! From a fractional triangle packing to concrete edge-disjoint pieces.
//!
//! Each packed triangle of the reduced graph claims a share of the edges of
//! its three part pairs; whatever pair mass the triangles leave behind goes
//! to a bipartite piece, and shares below the floor `c1` are dropped into
//! the exceptional leftover `G0` together with within-part and irregular
//! edges.  Realisation assigns every edge independently according to its
//! pair's share distribution, using one random stream per pair so the
//! outcome does not depend on edge iteration order.
//!
//! `split_for_nibble` then cuts one oriented piece into `t` arc-disjoint
//! sub-digraphs sized for the matching stage.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::graph::{split_elements, Digraph, Graph};
use crate::packing::TrianglePacking;
use crate::partition::EquitablePartition;
use crate::quotient::QuotientGraph;
use crate::rng;

/// Sub-digraphs below this arc count are not worth nibbling separately.
pub const MIN_SPLIT_ARCS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    Tripartite { parts: [u8; 3] },
    Bipartite { parts: [u8; 2] },
}

impl PieceKind {
    pub fn pairs(&self) -> Vec<(u8, u8)> {
        match *self {
            PieceKind::Tripartite { parts: [i, j, l] } => vec![(i, j), (i, l), (j, l)],
            PieceKind::Bipartite { parts: [i, j] } => vec![(i, j)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannedPiece {
    pub kind: PieceKind,
    /// Density-unit share this piece claims from each of its pairs.
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionPlan {
    pub k: usize,
    pub pieces: Vec<PlannedPiece>,
    /// Share floor: claims below this were dropped to the leftover.
    pub c1: f64,
    /// Expected cross-pair edge mass left uncovered (edge units).
    pub residual_budget: f64,
}

/// Build the piece plan from the packing solution, flooring small shares.
pub fn plan_decomposition(
    h: &QuotientGraph,
    packing: &TrianglePacking,
    c1: f64,
) -> DecompositionPlan {
    let k = h.k();
    let mut covered = vec![0.0f64; k * k];
    let mut pieces = Vec::new();
    for (tri, &mass) in packing.triangles.iter().zip(&packing.x) {
        if mass < c1 {
            continue;
        }
        let kind = PieceKind::Tripartite { parts: *tri };
        for (a, b) in kind.pairs() {
            covered[a as usize * k + b as usize] += mass;
        }
        pieces.push(PlannedPiece { kind, share: mass });
    }
    for i in 0..k {
        for j in i + 1..k {
            if h.weight(i, j) <= 0.0 {
                continue;
            }
            let leftover = (h.density(i, j) - covered[i * k + j]).max(0.0);
            if leftover >= c1 {
                covered[i * k + j] += leftover;
                pieces.push(PlannedPiece {
                    kind: PieceKind::Bipartite { parts: [i as u8, j as u8] },
                    share: leftover,
                });
            }
        }
    }
    let sizes = h.part_sizes();
    let mut residual = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            let uncovered = (h.density(i, j) - covered[i * k + j]).max(0.0);
            residual += uncovered * sizes[i] as f64 * sizes[j] as f64;
        }
    }
    DecompositionPlan { k, pieces, c1, residual_budget: residual }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub kind: PieceKind,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Realised pieces, in plan order.
    pub pieces: Vec<Piece>,
    /// Leftover edges: within-part, irregular, floored, and unclaimed mass.
    pub g0_edges: Vec<(u32, u32)>,
    /// How many leftover edges lie between distinct parts.
    pub cross_uncovered: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecomposeError {
    PartitionMismatch { expected: u32, got: u32 },
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::PartitionMismatch { expected, got } => {
                write!(f, "partition covers {got} vertices, graph has {expected}")
            }
        }
    }
}

impl core::error::Error for DecomposeError {}

/// Assign every edge of `g` to a piece of the plan or to the leftover.
pub fn realize_decomposition(
    g: &Graph,
    p: &EquitablePartition,
    h: &QuotientGraph,
    plan: &DecompositionPlan,
    seed: u64,
) -> Result<Decomposition, DecomposeError> {
    if p.n() != g.n() {
        return Err(DecomposeError::PartitionMismatch { expected: g.n(), got: p.n() });
    }
    let k = plan.k;
    let of = p.part_of();
    // Per-pair cumulative share distribution over candidate pieces.
    let mut choices: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k * k];
    for (idx, piece) in plan.pieces.iter().enumerate() {
        for (a, b) in piece.kind.pairs() {
            choices[a as usize * k + b as usize].push((idx, piece.share));
        }
    }
    let mut streams: Vec<Option<rng::Stream>> = (0..k * k).map(|_| None).collect();
    let mut pieces: Vec<Piece> =
        plan.pieces.iter().map(|pp| Piece { kind: pp.kind, edges: Vec::new() }).collect();
    let mut g0_edges = Vec::new();
    let mut cross_uncovered = 0usize;
    for &(u, v) in g.edges() {
        let (mut i, mut j) = (of[u as usize] as usize, of[v as usize] as usize);
        if i > j {
            core::mem::swap(&mut i, &mut j);
        }
        let pair = i * k + j;
        let claims = &choices[pair];
        if i == j || claims.is_empty() {
            if i != j {
                cross_uncovered += 1;
            }
            g0_edges.push((u, v));
            continue;
        }
        let density = h.density(i, j);
        let stream = streams[pair]
            .get_or_insert_with(|| rng::stream(rng::derive(seed, 0x0de0_0000 + pair as u64)));
        let draw = rng::unit(stream) * density;
        let mut acc = 0.0;
        let mut chosen = None;
        for &(idx, share) in claims {
            acc += share;
            if draw < acc {
                chosen = Some(idx);
                break;
            }
        }
        match chosen {
            Some(idx) => pieces[idx].edges.push((u, v)),
            None => {
                cross_uncovered += 1;
                g0_edges.push((u, v));
            }
        }
    }
    Ok(Decomposition { pieces, g0_edges, cross_uncovered })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitPlan {
    /// Unclamped target from the size formula.
    pub t_raw: f64,
    /// Sub-digraph count actually used.
    pub t: usize,
    pub min_arcs: usize,
}

/// Number of nibble slices for a piece on `touched` vertices with `arcs`
/// arcs, targeting cycles of length `r`: `touched^((2r-4-eps)/(2r-2-eps))`,
/// clamped so every slice keeps at least `MIN_SPLIT_ARCS` arcs.
pub fn split_count(touched: usize, arcs: usize, r: usize, eps: f64) -> SplitPlan {
    assert!(r == 3 || r == 4, "nibble cycles have length 3 or 4");
    let exponent = ((2 * r - 4) as f64 - eps) / ((2 * r - 2) as f64 - eps);
    let t_raw = (touched.max(1) as f64).powf(exponent);
    let by_arcs = (arcs / MIN_SPLIT_ARCS).max(1);
    let t = (t_raw.floor() as usize).clamp(1, by_arcs);
    SplitPlan { t_raw, t, min_arcs: MIN_SPLIT_ARCS }
}

/// Partition the arcs of `d` into `t` uniform groups (or the formula's `t`
/// when no override is given), keeping global vertex ids.
pub fn split_for_nibble(
    d: &Digraph,
    r: usize,
    eps: f64,
    override_t: Option<usize>,
    seed: u64,
) -> (SplitPlan, Vec<Digraph>) {
    let arcs: Vec<(u32, u32)> = d.arcs().to_vec();
    let mut touched: Vec<u32> = arcs.iter().flat_map(|&(u, v)| [u, v]).collect();
    touched.sort_unstable();
    touched.dedup();
    let mut plan = split_count(touched.len(), arcs.len(), r, eps);
    if let Some(t) = override_t {
        plan.t = t.max(1);
    }
    if arcs.is_empty() || plan.t == 1 {
        plan.t = 1;
        return (plan, vec![d.clone()]);
    }
    let fractions = vec![1.0 / plan.t as f64; plan.t];
    let groups = split_elements(&arcs, &fractions, rng::derive(seed, 0x5911))
        .expect("uniform fractions are valid");
    let subs: Vec<Digraph> = groups
        .into_iter()
        .map(|group| {
            Digraph::from_arcs(d.n(), group).expect("arc subsets stay loop- and duplicate-free")
        })
        .collect();
    (plan, subs)
}
