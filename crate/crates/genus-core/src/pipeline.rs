//! End-to-end genus estimation and embedding construction.
//!
//! `estimate` picks a route by graph size: sparse graphs get Euler-formula
//! brackets, small graphs are solved exactly over rotation systems, and
//! dense graphs go through partition refinement, the reduced-graph triangle
//! LP, and the packing formula.
//!
//! `embed` builds an actual rotation system: the exact search when the
//! budget allows, otherwise pieces are cut out along a triangle
//! decomposition of the partition, each piece is oriented and covered by
//! directed-cycle matchings (triangles, then leftover quadrilaterals, in
//! both traversal directions), the pooled cycles are cleared of blossoms,
//! and the constrained rotation is assembled and face-traced.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cut;
use crate::decompose::{
    plan_decomposition, realize_decomposition, split_for_nibble, DecomposeError, Piece, PieceKind,
};
use crate::exact::{self, euler_lower_bound, Clock, NullClock, SearchBudget, SearchMode};
use crate::family::{assemble_rotation, break_blossoms, verify_faces, Cycle, CycleFamily, FamilyError};
use crate::graph::{random_orientation, Digraph, Graph};
use crate::hypergraph::{
    build_cycle_hypergraph, count_directed_cycles_capped, greedy_matching, second_matching,
    Matching, UniformHypergraph, DEFAULT_BITE,
};
use crate::packing::{genus_estimate, solve_triangle_lp, EstimateError};
use crate::partition::{regular_partition, EquitablePartition, PartitionError};
use crate::quotient::build_quotient;
use crate::rng;
use crate::rotation::{trace_faces, FaceCensus, RotationError, RotationSystem};
use crate::simplex::SimplexError;

/// Directed-cycle budget per nibble slice; slices are doubled until each
/// stays under this.
pub const CYCLE_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Accuracy factor in `(0, 1/2]`: the estimate is within `1 + epsilon`
    /// of the packing-formula value.
    pub epsilon: f64,
    /// Defect threshold for pair regularity testing.
    pub eps_reg: f64,
    /// Density floor below which quotient pairs are dropped.
    pub eps1: f64,
    /// Piece-share floor: smaller claims fall into the leftover.
    pub c1: f64,
    /// Initial part count.
    pub m: usize,
    pub k_max: usize,
    pub max_rounds: usize,
    pub seed: u64,
    /// Rotation-system budget for the exact route.
    pub small_graph_budget: f64,
    /// Fixed slice count for the nibble (doubled if over the cycle cap).
    pub t_override: Option<usize>,
    pub orientable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    BadEpsilon { eps: f64 },
    BadParts { m: usize },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::BadEpsilon { eps } => {
                write!(f, "accuracy factor {eps} outside (0, 1/2]")
            }
            ConfigError::BadParts { m } => write!(f, "part count {m} must be at least 2"),
        }
    }
}

impl core::error::Error for ConfigError {}

impl Config {
    pub fn new(epsilon: f64) -> Result<Self, ConfigError> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(ConfigError::BadEpsilon { eps: epsilon });
        }
        let m = ((4.0 / epsilon).ceil() as usize).clamp(2, 8);
        Ok(Config {
            epsilon,
            eps_reg: epsilon / 4.0,
            eps1: epsilon / 10.0,
            c1: epsilon / 20.0,
            m,
            k_max: 64,
            max_rounds: 6,
            seed: 0,
            small_graph_budget: 1e8,
            t_override: None,
            orientable: true,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(ConfigError::BadEpsilon { eps: self.epsilon });
        }
        if self.m < 2 {
            return Err(ConfigError::BadParts { m: self.m });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PipelineError {
    Config(ConfigError),
    Estimate(EstimateError),
    Lp(SimplexError),
    Family(FamilyError),
    Decompose(DecomposeError),
    Partition(PartitionError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Config(e) => write!(f, "configuration: {e}"),
            PipelineError::Estimate(e) => write!(f, "estimate: {e}"),
            PipelineError::Lp(e) => write!(f, "packing program: {e}"),
            PipelineError::Family(e) => write!(f, "cycle family: {e}"),
            PipelineError::Decompose(e) => write!(f, "decomposition: {e}"),
            PipelineError::Partition(e) => write!(f, "partition: {e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<ConfigError> for PipelineError {
    fn from(e: ConfigError) -> Self {
        PipelineError::Config(e)
    }
}

impl From<EstimateError> for PipelineError {
    fn from(e: EstimateError) -> Self {
        PipelineError::Estimate(e)
    }
}

impl From<SimplexError> for PipelineError {
    fn from(e: SimplexError) -> Self {
        PipelineError::Lp(e)
    }
}

impl From<FamilyError> for PipelineError {
    fn from(e: FamilyError) -> Self {
        PipelineError::Family(e)
    }
}

impl From<DecomposeError> for PipelineError {
    fn from(e: DecomposeError) -> Self {
        PipelineError::Decompose(e)
    }
}

impl From<PartitionError> for PipelineError {
    fn from(e: PartitionError) -> Self {
        PipelineError::Partition(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateOutcome {
    /// 0 sparse bracket, 1 exact, 2 partition without triangle mass,
    /// 3 full packing formula.
    pub phase: u8,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub euler_bound: u32,
    /// Part count of the partition route (0 otherwise).
    pub k: usize,
    /// Fractional packing value (0 when not applicable).
    pub nu: f64,
    pub exact_genus: Option<u32>,
    pub converged: bool,
}

/// Estimate the genus of `g` within the configured accuracy factor.
pub fn estimate(g: &Graph, cfg: &Config) -> Result<EstimateOutcome, PipelineError> {
    cfg.validate()?;
    let n = f64::from(g.n());
    let e = g.edge_count() as f64;
    let euler = euler_lower_bound(g);
    if e <= cfg.epsilon * n * n {
        let rank = (g.edge_count() as i64 - g.n() as i64 + g.components().len() as i64).max(0);
        let upper = cfg.epsilon * n * n;
        let estimate = (rank as f64 / 2.0).clamp(f64::from(euler), upper);
        return Ok(EstimateOutcome {
            phase: 0,
            estimate,
            lower: f64::from(euler),
            upper,
            euler_bound: euler,
            k: 0,
            nu: 0.0,
            exact_genus: None,
            converged: true,
        });
    }
    if exact::rotation_count(g) <= cfg.small_graph_budget {
        let budget = SearchBudget {
            max_rotations: cfg.small_graph_budget,
            max_seconds: None,
            mode: SearchMode::Exhaustive,
        };
        let out = exact::exact_genus(g, &budget, &NullClock, cfg.seed);
        if out.exact {
            let genus = f64::from(out.genus);
            return Ok(EstimateOutcome {
                phase: 1,
                estimate: genus,
                lower: genus,
                upper: genus,
                euler_bound: euler,
                k: 0,
                nu: 0.0,
                exact_genus: Some(out.genus),
                converged: true,
            });
        }
    }
    let reg = regular_partition(
        g,
        cfg.eps_reg,
        cfg.m,
        cfg.max_rounds,
        cfg.k_max,
        rng::derive(cfg.seed, 0xe57),
    );
    let quotient = build_quotient(g, &reg.partition, cfg.eps1, &reg.irregular);
    let packing = solve_triangle_lp(&quotient)?;
    let report = genus_estimate(g, quotient.k(), packing.nu, cfg.epsilon, cfg.orientable)?;
    Ok(EstimateOutcome {
        phase: if packing.nu > 0.0 { 3 } else { 2 },
        estimate: report.estimate,
        lower: report.lower,
        upper: report.upper,
        euler_bound: report.euler_bound,
        k: quotient.k(),
        nu: packing.nu,
        exact_genus: None,
        converged: reg.converged,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedOutcome {
    pub rotation: RotationSystem,
    pub census: FaceCensus,
    pub genus_achieved: u32,
    /// 1 exact search, 2 bipartite two-part route, 3 packing pipeline.
    pub phase: u8,
    pub k: usize,
    pub nu: f64,
    /// Packing-formula estimate and bracket for the same input; on the
    /// exact route all three equal the achieved genus.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub blossoms_removed: usize,
    /// Edges that ended up in the exceptional leftover.
    pub g0_edges: usize,
    /// Fraction of directed edge sides covered by matched cycles.
    pub side_coverage: f64,
    /// True when the rotation is a certified minimum.
    pub exact: bool,
}

/// Construct a rotation system for `g` and report the genus achieved.
pub fn embed(g: &Graph, cfg: &Config) -> Result<EmbedOutcome, PipelineError> {
    embed_with_clock(g, cfg, &NullClock)
}

/// [`embed`] with a caller-supplied wall clock for the exact-search budget.
pub fn embed_with_clock(
    g: &Graph,
    cfg: &Config,
    clock: &dyn Clock,
) -> Result<EmbedOutcome, PipelineError> {
    cfg.validate()?;
    if g.n() == 0 || g.edge_count() == 0 {
        let rotation = RotationSystem::sorted(g);
        let census = trace_faces(g, &rotation).expect("sorted rotation is valid");
        let genus_achieved = census.genus;
        return Ok(EmbedOutcome {
            rotation,
            census,
            genus_achieved,
            phase: 1,
            k: 0,
            nu: 0.0,
            estimate: 0.0,
            lower: 0.0,
            upper: 0.0,
            blossoms_removed: 0,
            g0_edges: 0,
            side_coverage: 0.0,
            exact: true,
        });
    }
    if exact::rotation_count(g) <= cfg.small_graph_budget {
        let budget = SearchBudget {
            max_rotations: cfg.small_graph_budget,
            max_seconds: None,
            mode: SearchMode::Exhaustive,
        };
        let out = exact::exact_genus(g, &budget, clock, cfg.seed);
        let census = trace_faces(g, &out.rotation).expect("search rotations are valid");
        let genus = f64::from(out.genus);
        return Ok(EmbedOutcome {
            rotation: out.rotation,
            census,
            genus_achieved: out.genus,
            phase: 1,
            k: 0,
            nu: 0.0,
            estimate: genus,
            lower: if out.exact { genus } else { f64::from(euler_lower_bound(g)) },
            upper: genus,
            blossoms_removed: 0,
            g0_edges: 0,
            side_coverage: 0.0,
            exact: out.exact,
        });
    }
    dense_embed(g, cfg)
}

fn dense_embed(g: &Graph, cfg: &Config) -> Result<EmbedOutcome, PipelineError> {
    // Partition: side-respecting two parts for balanced bipartite graphs,
    // refined regular partition otherwise.
    let (partition, irregular, phase) = match g.bipartition() {
        Some((a, b)) if a.len().abs_diff(b.len()) <= 1 && a.len() + b.len() >= 4 => {
            let p = EquitablePartition::from_parts(g.n(), vec![a, b])?;
            (p, Vec::new(), 2u8)
        }
        _ => {
            let reg = regular_partition(
                g,
                cfg.eps_reg,
                cfg.m.max(3),
                cfg.max_rounds,
                cfg.k_max,
                rng::derive(cfg.seed, 0xe57),
            );
            (reg.partition, reg.irregular, 3u8)
        }
    };
    let quotient = build_quotient(g, &partition, cfg.eps1, &irregular);
    let packing = solve_triangle_lp(&quotient)?;
    let report = genus_estimate(g, quotient.k(), packing.nu, cfg.epsilon, cfg.orientable)?;
    let plan = plan_decomposition(&quotient, &packing, cfg.c1);
    let dec = realize_decomposition(g, &partition, &quotient, &plan, rng::derive(cfg.seed, 0xdc))?;

    let mut family_cycles: Vec<Cycle> = Vec::new();
    let mut covered: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut cycle_keys: BTreeSet<Vec<(u32, u32)>> = BTreeSet::new();
    let mut piece_arcs: Vec<(u32, u32)> = Vec::new();
    for (idx, piece) in dec.pieces.iter().enumerate() {
        if piece.edges.is_empty() {
            continue;
        }
        let arcs =
            cover_piece(g.n(), piece, idx, cfg, &mut family_cycles, &mut covered, &mut cycle_keys);
        piece_arcs.extend(arcs);
    }

    // Leftover edges join the orientation with seeded directions.
    let g0 = Graph::from_edges(g.n(), dec.g0_edges.iter().copied())
        .expect("leftover edges form a simple graph");
    let d0 = random_orientation(&g0, rng::derive(cfg.seed, 0x60));
    piece_arcs.extend(d0.arcs().iter().copied());
    let d_global = Digraph::from_arcs(g.n(), piece_arcs)
        .expect("pieces and leftover partition the edge set");

    // Remnant stage: per-piece matchings are maximal inside their piece but
    // blind to cycles that straddle pieces or touch the leftover, where
    // within-part edges are dense.  Mine those sides too, triangles first.
    for r in [3usize, 4] {
        for reversed in [false, true] {
            let pairs: Vec<(u32, u32)> = d_global
                .arcs()
                .iter()
                .map(|&(u, v)| if reversed { (v, u) } else { (u, v) })
                .filter(|pair| !covered.contains(pair))
                .collect();
            remnant_pass(
                g.n(),
                pairs,
                r,
                reversed,
                rng::derive(cfg.seed, 0xf1a0 + 2 * r as u64 + u64::from(reversed)),
                &mut family_cycles,
                &mut covered,
                &mut cycle_keys,
            );
        }
    }
    let covered_sides = covered.len();

    let family = CycleFamily::new(family_cycles);
    debug_assert!(family.validate(&d_global).is_ok());
    let (family, blossoms_removed) = break_blossoms(&family)?;
    let rotation = assemble_rotation(g, &d_global, &family, rng::derive(cfg.seed, 0xa55))?;
    let census = trace_faces(g, &rotation).expect("assembled rotation is valid");
    debug_assert!(verify_faces(g, &rotation, &family).ok);

    let genus_achieved = census.genus;
    Ok(EmbedOutcome {
        rotation,
        census,
        genus_achieved,
        phase,
        k: quotient.k(),
        nu: packing.nu,
        estimate: report.estimate,
        lower: report.lower,
        upper: report.upper,
        blossoms_removed,
        g0_edges: dec.g0_edges.len(),
        side_coverage: covered_sides as f64 / (2.0 * g.edge_count() as f64),
        exact: false,
    })
}

/// Orient one piece, slice it, and cover both traversal directions with
/// cycle matchings, recording into the shared family state.  Returns the
/// piece's oriented arcs.
fn cover_piece(
    n: u32,
    piece: &Piece,
    idx: usize,
    cfg: &Config,
    cycles: &mut Vec<Cycle>,
    covered: &mut BTreeSet<(u32, u32)>,
    cycle_keys: &mut BTreeSet<Vec<(u32, u32)>>,
) -> Vec<(u32, u32)> {
    let seed = rng::derive(cfg.seed, 0x9100 + idx as u64);
    let graph = Graph::from_edges(n, piece.edges.iter().copied())
        .expect("piece edges are simple");
    let oriented = random_orientation(&graph, rng::derive(seed, 1));
    let bipartite = matches!(piece.kind, PieceKind::Bipartite { .. });
    let r_main = if bipartite { 4 } else { 3 };

    let subs = slice_under_cap(&oriented, r_main, cfg, seed);
    for (s_idx, sub) in subs.iter().enumerate() {
        if sub.arcs().is_empty() {
            continue;
        }
        let sub_seed = rng::derive(seed, 0x50 + s_idx as u64);
        let h = build_cycle_hypergraph(sub, r_main);
        let m1 = greedy_matching(&h, rng::derive(sub_seed, 1), DEFAULT_BITE);
        let rev = sub.reversed();
        let h_rev = build_cycle_hypergraph(&rev, r_main);
        let m2 = second_matching(&h_rev, &m1.arc_sets(&h), rng::derive(sub_seed, 2), DEFAULT_BITE);
        record_matching(sub, &h, &m1, false, cycles, covered, cycle_keys);
        record_matching(&rev, &h_rev, &m2, true, cycles, covered, cycle_keys);
    }
    oriented.arcs().to_vec()
}

fn slice_under_cap(oriented: &Digraph, r_main: usize, cfg: &Config, seed: u64) -> Vec<Digraph> {
    let mut t = cfg.t_override.unwrap_or(1);
    for attempt in 0..20u64 {
        let (_, subs) = split_for_nibble(
            oriented,
            r_main,
            cfg.epsilon,
            Some(t),
            rng::derive(seed, 0x511 + attempt),
        );
        let ok = subs
            .iter()
            .all(|s| count_directed_cycles_capped(s, r_main, CYCLE_CAP).is_some());
        if ok || t >= oriented.arcs().len() {
            return subs;
        }
        t *= 2;
    }
    vec![oriented.clone()]
}

fn record_matching(
    d: &Digraph,
    h: &UniformHypergraph,
    m: &Matching,
    reversed: bool,
    cycles: &mut Vec<Cycle>,
    covered: &mut BTreeSet<(u32, u32)>,
    cycle_keys: &mut BTreeSet<Vec<(u32, u32)>>,
) {
    for &edge_idx in &m.edges {
        let arc_ids = h.edge(edge_idx);
        let verts: Vec<u32> = arc_ids.iter().map(|&a| d.arc(a).0).collect();
        for &a in arc_ids {
            let pair = d.arc(a);
            let fresh = covered.insert(pair);
            debug_assert!(fresh, "matched cycles reuse a directed side");
        }
        cycle_keys.insert(undirected_key(d, arc_ids));
        cycles.push(if reversed { Cycle::reverse(verts) } else { Cycle::forward(verts) });
    }
}

fn undirected_key(d: &Digraph, arc_ids: &[u32]) -> Vec<(u32, u32)> {
    let mut key: Vec<(u32, u32)> = arc_ids
        .iter()
        .map(|&a| {
            let (u, v) = d.arc(a);
            (u.min(v), u.max(v))
        })
        .collect();
    key.sort_unstable();
    key
}

/// Match length-`r` cycles among the given uncovered directed pairs,
/// skipping any cycle whose edge set is already spoken for (in particular
/// mirrors of cycles matched elsewhere, which would pinch the rotation).
#[allow(clippy::too_many_arguments)]
fn remnant_pass(
    n: u32,
    pairs: Vec<(u32, u32)>,
    r: usize,
    reversed: bool,
    seed: u64,
    cycles: &mut Vec<Cycle>,
    covered: &mut BTreeSet<(u32, u32)>,
    cycle_keys: &mut BTreeSet<Vec<(u32, u32)>>,
) {
    if pairs.len() < r {
        return;
    }
    let d = Digraph::from_arcs(n, pairs).expect("remnant arcs are simple");
    if count_directed_cycles_capped(&d, r, CYCLE_CAP).is_none() {
        return;
    }
    let h = build_cycle_hypergraph(&d, r);
    if h.edge_count() == 0 {
        return;
    }
    let keep: Vec<Vec<u32>> = (0..h.edge_count())
        .filter(|&i| !cycle_keys.contains(&undirected_key(&d, h.edge(i))))
        .map(|i| h.edge(i).to_vec())
        .collect();
    if keep.is_empty() {
        return;
    }
    let filtered = UniformHypergraph::from_edge_lists(r, h.vertex_count(), &keep);
    let m = greedy_matching(&filtered, seed, DEFAULT_BITE);
    record_matching(&d, &filtered, &m, reversed, cycles, covered, cycle_keys);
}

/// Validate a rotation against its graph and trace its faces.
pub fn verify(g: &Graph, rotation: &RotationSystem) -> Result<FaceCensus, RotationError> {
    trace_faces(g, rotation)
}

/// Convenience: cut-distance witness check between a graph and the constant
/// density over a partition pair, used by reporting.
pub fn pair_cut_upper(g: &Graph, a: &[u32], b: &[u32], seed: u64) -> f64 {
    let parts = vec![a.to_vec(), b.to_vec()];
    match cut::cut_distance(
        cut::Side::Graph(g),
        cut::Side::Const(crate::partition::pair_density(g, a, b)),
        &parts,
        cut::CutMode::Bipartite,
        seed,
    ) {
        Ok(est) => est.upper,
        Err(_) => 1.0,
    }
}
