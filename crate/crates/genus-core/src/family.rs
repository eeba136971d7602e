//! Arc-disjoint cycle families, blossom detection, and rotation assembly.
//!
//! A family holds short directed cycles taken from an orientation `D` of a
//! graph and from its mirror `D^{-1}`.  Two cycles through a common vertex
//! constrain the rotation there: a cycle entering from `a` and leaving to `b`
//! forces `b` to follow `a`.  Collecting these constraints per vertex yields a
//! partial successor map on the neighbors; because the family is arc-disjoint
//! the map is a partial permutation, so its connected pieces are simple chains
//! and cycles.  A cycle in the constraint map is a *blossom*: an obstruction
//! that makes it impossible to realise every family cycle as a face.  After
//! removing one member cycle per blossom the remaining constraints are acyclic
//! and any chain order extends to a rotation system in which every family
//! cycle is a face.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Digraph, Graph};
use crate::rng;
use crate::rotation::{trace_faces, RotationSystem};

pub const MAX_CYCLE_LEN: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    BadCycleLength { index: usize, len: usize },
    RepeatedVertex { index: usize },
    MissingArc { index: usize, u: u32, v: u32, forward: bool },
    ArcReused { u: u32, v: u32 },
    BlossomsPresent { count: usize },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::BadCycleLength { index, len } => {
                write!(f, "cycle #{index} has length {len}, outside 3..={MAX_CYCLE_LEN}")
            }
            FamilyError::RepeatedVertex { index } => {
                write!(f, "cycle #{index} repeats a vertex")
            }
            FamilyError::MissingArc { index, u, v, forward } => {
                let dir = if *forward { "forward" } else { "mirror" };
                write!(f, "cycle #{index} uses ({u}, {v}) absent from the {dir} digraph")
            }
            FamilyError::ArcReused { u, v } => {
                write!(f, "directed pair ({u}, {v}) traversed by two cycles")
            }
            FamilyError::BlossomsPresent { count } => {
                write!(f, "family contains {count} blossoms; break them before assembly")
            }
        }
    }
}

impl core::error::Error for FamilyError {}

/// A directed cycle, listed in traversal order.
///
/// Forward cycles traverse arcs of the orientation `D`; reverse cycles
/// traverse arcs of `D^{-1}` (each consecutive pair reversed lies in `D`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    verts: Vec<u32>,
    forward: bool,
}

impl Cycle {
    pub fn forward(verts: Vec<u32>) -> Self {
        Cycle { verts, forward: true }
    }

    pub fn reverse(verts: Vec<u32>) -> Self {
        Cycle { verts, forward: false }
    }

    pub fn verts(&self) -> &[u32] {
        &self.verts
    }

    pub fn is_forward(&self) -> bool {
        self.forward
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Directed pairs in traversal order.
    pub fn traversal(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let k = self.verts.len();
        (0..k).map(move |i| (self.verts[i], self.verts[(i + 1) % k]))
    }

    /// Traversal rotated to start at the smallest vertex.
    pub fn canonical(&self) -> Vec<u32> {
        canonical_rotation(&self.verts)
    }

    /// Whether `other` traverses the same vertices in the opposite direction.
    pub fn is_reverse_of(&self, other: &Cycle) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut reversed = self.verts.clone();
        reversed[1..].reverse();
        canonical_rotation(&reversed) == other.canonical()
    }
}

fn canonical_rotation(walk: &[u32]) -> Vec<u32> {
    let k = walk.len();
    let mut best: Option<Vec<u32>> = None;
    let min = *walk.iter().min().expect("non-empty walk");
    for s in 0..k {
        if walk[s] != min {
            continue;
        }
        let rotated: Vec<u32> = (0..k).map(|i| walk[(s + i) % k]).collect();
        if best.as_ref().is_none_or(|b| rotated < *b) {
            best = Some(rotated);
        }
    }
    best.expect("non-empty walk")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleFamily {
    pub cycles: Vec<Cycle>,
}

impl CycleFamily {
    pub fn new(cycles: Vec<Cycle>) -> Self {
        CycleFamily { cycles }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Number of forward and reverse cycles, by length.
    pub fn length_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.cycles {
            *h.entry(c.len()).or_insert(0) += 1;
        }
        h
    }

    /// Check lengths, vertex-distinctness, membership in `d` / `d` reversed,
    /// and arc-disjointness of the traversals.
    pub fn validate(&self, d: &Digraph) -> Result<(), FamilyError> {
        self.check_shapes()?;
        for (index, c) in self.cycles.iter().enumerate() {
            for (u, v) in c.traversal() {
                let present = if c.forward { d.has_arc(u, v) } else { d.has_arc(v, u) };
                if !present {
                    return Err(FamilyError::MissingArc { index, u, v, forward: c.forward });
                }
            }
        }
        self.check_disjoint()?;
        Ok(())
    }

    fn check_shapes(&self) -> Result<(), FamilyError> {
        for (index, c) in self.cycles.iter().enumerate() {
            if c.len() < 3 || c.len() > MAX_CYCLE_LEN {
                return Err(FamilyError::BadCycleLength { index, len: c.len() });
            }
            let set: BTreeSet<u32> = c.verts.iter().copied().collect();
            if set.len() != c.len() {
                return Err(FamilyError::RepeatedVertex { index });
            }
        }
        Ok(())
    }

    fn check_disjoint(&self) -> Result<(), FamilyError> {
        let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
        for c in &self.cycles {
            for (u, v) in c.traversal() {
                if !used.insert((u, v)) {
                    return Err(FamilyError::ArcReused { u, v });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blossom {
    pub center: u32,
    /// Participating cycle indices, in constraint-chain order.
    pub cycles: Vec<usize>,
    pub simple: bool,
}

impl Blossom {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlossomReport {
    pub blossoms: Vec<Blossom>,
    pub by_length: BTreeMap<usize, usize>,
}

impl BlossomReport {
    pub fn is_empty(&self) -> bool {
        self.blossoms.is_empty()
    }

    pub fn count(&self) -> usize {
        self.blossoms.len()
    }

    pub fn non_simple_count(&self) -> usize {
        self.blossoms.iter().filter(|b| !b.simple).count()
    }
}

/// Constraint map at one vertex: in-tip -> (out-tip, cycle index).
fn constraints_at(family: &CycleFamily) -> BTreeMap<u32, BTreeMap<u32, (u32, usize)>> {
    let mut per_vertex: BTreeMap<u32, BTreeMap<u32, (u32, usize)>> = BTreeMap::new();
    for (id, c) in family.cycles.iter().enumerate() {
        let k = c.len();
        for i in 0..k {
            let pred = c.verts[(i + k - 1) % k];
            let v = c.verts[i];
            let succ = c.verts[(i + 1) % k];
            let old = per_vertex.entry(v).or_default().insert(pred, (succ, id));
            debug_assert!(old.is_none(), "arc-disjointness keeps in-tips unique");
        }
    }
    per_vertex
}

/// Find all blossoms: cycles of the per-vertex constraint maps.
pub fn detect_blossoms(family: &CycleFamily) -> Result<BlossomReport, FamilyError> {
    family.check_shapes()?;
    family.check_disjoint()?;
    let mut blossoms = Vec::new();
    for (&center, succ) in &constraints_at(family) {
        let out_tips: BTreeSet<u32> = succ.values().map(|&(b, _)| b).collect();
        debug_assert_eq!(out_tips.len(), succ.len(), "arc-disjointness keeps out-tips unique");
        // Nodes reachable from a chain head never lie on a constraint cycle.
        let mut on_chain: BTreeSet<u32> = BTreeSet::new();
        for &a in succ.keys() {
            if out_tips.contains(&a) || on_chain.contains(&a) {
                continue;
            }
            let mut t = a;
            while let Some(&(next, _)) = succ.get(&t) {
                on_chain.insert(t);
                t = next;
            }
        }
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for &a in succ.keys() {
            if on_chain.contains(&a) || seen.contains(&a) {
                continue;
            }
            let mut members = Vec::new();
            let mut t = a;
            loop {
                seen.insert(t);
                let &(next, id) = succ.get(&t).expect("cycle nodes have successors");
                members.push(id);
                t = next;
                if t == a {
                    break;
                }
            }
            let simple = match members.as_slice() {
                [c1, c2] => !family.cycles[*c1].is_reverse_of(&family.cycles[*c2]),
                _ => true,
            };
            blossoms.push(Blossom { center, cycles: members, simple });
        }
    }
    let mut by_length = BTreeMap::new();
    for b in &blossoms {
        *by_length.entry(b.len()).or_insert(0) += 1;
    }
    Ok(BlossomReport { blossoms, by_length })
}

/// Remove one cycle per blossom: the longest member, ties broken by smallest
/// index.  Returns the clean family and the number of cycles removed.
pub fn break_blossoms(family: &CycleFamily) -> Result<(CycleFamily, usize), FamilyError> {
    let report = detect_blossoms(family)?;
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    for b in &report.blossoms {
        if b.cycles.iter().any(|id| removed.contains(id)) {
            continue;
        }
        let victim = b
            .cycles
            .iter()
            .copied()
            .max_by_key(|&id| (family.cycles[id].len(), core::cmp::Reverse(id)))
            .expect("blossoms are non-empty");
        removed.insert(victim);
    }
    let kept = family
        .cycles
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, c)| c.clone())
        .collect();
    let clean = CycleFamily::new(kept);
    debug_assert!(detect_blossoms(&clean).expect("validated above").is_empty());
    Ok((clean, removed.len()))
}

/// Build a rotation system realising every cycle of a blossom-free family as
/// a face.  Constraint chains at each vertex are concatenated in seeded
/// random order; unconstrained neighbors form singleton chains.
pub fn assemble_rotation(
    g: &Graph,
    d: &Digraph,
    family: &CycleFamily,
    seed: u64,
) -> Result<RotationSystem, FamilyError> {
    family.validate(d)?;
    let report = detect_blossoms(family)?;
    if !report.is_empty() {
        return Err(FamilyError::BlossomsPresent { count: report.count() });
    }
    let constraints = constraints_at(family);
    let empty = BTreeMap::new();
    let mut orders: Vec<Vec<u32>> = Vec::with_capacity(g.n() as usize);
    for v in 0..g.n() {
        let succ = constraints.get(&v).unwrap_or(&empty);
        let is_target: BTreeSet<u32> = succ.values().map(|&(b, _)| b).collect();
        let mut chains: Vec<Vec<u32>> = Vec::new();
        for &u in g.neighbors(v) {
            if is_target.contains(&u) {
                continue;
            }
            let mut chain = alloc::vec![u];
            let mut t = u;
            while let Some(&(next, _)) = succ.get(&t) {
                chain.push(next);
                t = next;
            }
            chains.push(chain);
        }
        debug_assert_eq!(chains.iter().map(Vec::len).sum::<usize>(), g.degree(v));
        let mut rng = rng::stream(rng::derive(seed, 0x10_0000 + v as u64));
        rng::shuffle(&mut chains, &mut rng);
        orders.push(chains.concat());
    }
    let rot = RotationSystem::new(orders);
    debug_assert!(rot.validate(g).is_ok());
    Ok(rot)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyFaces {
    pub ok: bool,
    /// Indices of family cycles that are not faces of the rotation.
    pub missing: Vec<usize>,
}

/// Check that every family cycle appears among the faces of `(g, rot)`,
/// up to cyclic shift.
pub fn verify_faces(g: &Graph, rot: &RotationSystem, family: &CycleFamily) -> VerifyFaces {
    let census = match trace_faces(g, rot) {
        Ok(c) => c,
        Err(_) => {
            return VerifyFaces { ok: false, missing: (0..family.len()).collect() };
        }
    };
    let short_faces: BTreeSet<Vec<u32>> = census
        .faces
        .iter()
        .filter(|f| f.len() <= MAX_CYCLE_LEN)
        .map(|f| canonical_rotation(f))
        .collect();
    let missing: Vec<usize> = family
        .cycles
        .iter()
        .enumerate()
        .filter(|(_, c)| !short_faces.contains(&c.canonical()))
        .map(|(i, _)| i)
        .collect();
    VerifyFaces { ok: missing.is_empty(), missing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_orientation;

    fn simple_blossom_instance() -> (Digraph, CycleFamily) {
        let d = Digraph::from_arcs(5, alloc::vec![(1, 0), (0, 2), (2, 3), (3, 1), (4, 1), (2, 4)])
            .unwrap();
        let family = CycleFamily::new(alloc::vec![
            Cycle::forward(alloc::vec![1, 0, 2, 3]),
            Cycle::reverse(alloc::vec![2, 0, 1, 4]),
        ]);
        family.validate(&d).unwrap();
        (d, family)
    }

    #[test]
    fn disjoint_triangles_are_blossom_free() {
        let family = CycleFamily::new(alloc::vec![
            Cycle::forward(alloc::vec![0, 1, 2]),
            Cycle::forward(alloc::vec![3, 4, 5]),
            Cycle::reverse(alloc::vec![6, 7, 8]),
        ]);
        let report = detect_blossoms(&family).unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn crossing_cycles_form_one_simple_blossom() {
        let (_, family) = simple_blossom_instance();
        let report = detect_blossoms(&family).unwrap();
        assert_eq!(report.count(), 1);
        let b = &report.blossoms[0];
        assert_eq!(b.center, 0);
        assert_eq!(b.len(), 2);
        assert!(b.simple);
        assert_eq!(report.by_length.get(&2), Some(&1));
    }

    #[test]
    fn triangle_with_its_mirror_is_non_simple() {
        let family = CycleFamily::new(alloc::vec![
            Cycle::forward(alloc::vec![0, 1, 2]),
            Cycle::reverse(alloc::vec![0, 2, 1]),
        ]);
        let report = detect_blossoms(&family).unwrap();
        assert_eq!(report.count(), 3);
        assert_eq!(report.non_simple_count(), 3);
        for b in &report.blossoms {
            assert_eq!(b.len(), 2);
        }
    }

    #[test]
    fn arc_reuse_is_rejected() {
        let family = CycleFamily::new(alloc::vec![
            Cycle::forward(alloc::vec![0, 1, 2]),
            Cycle::forward(alloc::vec![0, 1, 3]),
        ]);
        assert_eq!(detect_blossoms(&family), Err(FamilyError::ArcReused { u: 0, v: 1 }));
    }

    #[test]
    fn breaking_removes_one_cycle_per_disjoint_blossom() {
        // Three copies of the crossing pattern on disjoint vertex ranges.
        let mut cycles = Vec::new();
        for k in 0..3u32 {
            let s = 5 * k;
            cycles.push(Cycle::forward(alloc::vec![s + 1, s, s + 2, s + 3]));
            cycles.push(Cycle::reverse(alloc::vec![s + 2, s, s + 1, s + 4]));
        }
        let family = CycleFamily::new(cycles);
        assert_eq!(detect_blossoms(&family).unwrap().count(), 3);
        let (clean, removed) = break_blossoms(&family).unwrap();
        assert_eq!(removed, 3);
        assert_eq!(clean.len(), 3);
        assert!(detect_blossoms(&clean).unwrap().is_empty());
        // Equal lengths: the tie-break removes the smaller index, keeping the
        // reverse cycle of each pair.
        assert!(clean.cycles.iter().all(|c| !c.is_forward()));
    }

    #[test]
    fn assembly_realises_every_cycle_as_a_face() {
        let g = Graph::complete(6);
        let d = random_orientation(&g, 3);
        let family = greedy_family(&d, 17);
        let (clean, _) = break_blossoms(&family).unwrap();
        let rot = assemble_rotation(&g, &d, &clean, 99).unwrap();
        let verdict = verify_faces(&g, &rot, &clean);
        assert!(verdict.ok, "missing {:?}", verdict.missing);
    }

    #[test]
    fn assembly_rejects_blossoms() {
        let (d, family) = simple_blossom_instance();
        let g = Graph::from_edges(
            5,
            d.arcs().iter().map(|&(u, v)| (u, v)).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(
            assemble_rotation(&g, &d, &family, 0),
            Err(FamilyError::BlossomsPresent { count: 1 })
        );
    }

    #[test]
    fn assembly_is_deterministic_per_seed() {
        let g = Graph::gnp(12, 0.6, 5);
        let d = random_orientation(&g, 6);
        let (clean, _) = break_blossoms(&greedy_family(&d, 7)).unwrap();
        let a = assemble_rotation(&g, &d, &clean, 1).unwrap();
        let b = assemble_rotation(&g, &d, &clean, 1).unwrap();
        assert_eq!(a, b);
    }

    /// Greedily collect arc-disjoint directed triangles from both directions.
    pub(crate) fn greedy_family(d: &Digraph, seed: u64) -> CycleFamily {
        let mut triangles: Vec<Cycle> = Vec::new();
        for (view, forward) in [(d.clone(), true), (d.reversed(), false)] {
            for u in 0..view.n() {
                for &(v, _) in view.out(u) {
                    for &(w, _) in view.out(v) {
                        if w != u && view.has_arc(w, u) && u < v && u < w {
                            let verts = alloc::vec![u, v, w];
                            triangles.push(if forward {
                                Cycle::forward(verts)
                            } else {
                                Cycle::reverse(verts)
                            });
                        }
                    }
                }
            }
        }
        let mut rng = rng::stream(seed);
        rng::shuffle(&mut triangles, &mut rng);
        let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut picked = Vec::new();
        for c in triangles {
            if c.traversal().all(|p| !used.contains(&p)) {
                for p in c.traversal() {
                    used.insert(p);
                }
                picked.push(c);
            }
        }
        CycleFamily::new(picked)
    }

    /// Brute-force oracle: every subset of cycles through a common vertex
    /// whose tips chain into a single cycle.
    fn oracle_blossoms(family: &CycleFamily) -> BTreeSet<(u32, BTreeSet<usize>)> {
        let mut found = BTreeSet::new();
        let n = family
            .cycles
            .iter()
            .flat_map(|c| c.verts().iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        for v in 0..n {
            let through: Vec<(usize, u32, u32)> = family
                .cycles
                .iter()
                .enumerate()
                .filter_map(|(id, c)| {
                    let k = c.len();
                    c.verts().iter().position(|&x| x == v).map(|i| {
                        (id, c.verts()[(i + k - 1) % k], c.verts()[(i + 1) % k])
                    })
                })
                .collect();
            let m = through.len();
            for mask in 1u32..(1 << m) {
                let members: Vec<&(usize, u32, u32)> = (0..m)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| &through[i])
                    .collect();
                if members.len() < 2 {
                    continue;
                }
                // Walk the tips: from the first member, repeatedly find the
                // member whose in-tip equals the current out-tip.
                let mut order = alloc::vec![members[0]];
                let mut ok = true;
                while order.len() < members.len() {
                    let tail = order.last().unwrap().2;
                    match members
                        .iter()
                        .find(|&&&(id, a, _)| a == tail && order.iter().all(|&&(o, _, _)| o != id))
                    {
                        Some(next) => order.push(next),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && order.last().unwrap().2 == order[0].1 {
                    found.insert((v, members.iter().map(|&&(id, _, _)| id).collect()));
                }
            }
        }
        found
    }

    #[test]
    fn detector_matches_subset_oracle() {
        for seed in 0..60u64 {
            let n = 6 + (seed % 5) as u32;
            let g = Graph::gnp(n, 0.6, seed);
            let d = random_orientation(&g, seed ^ 0xff);
            let mut family = greedy_family(&d, seed);
            family.cycles.truncate(8);
            let report = detect_blossoms(&family).unwrap();
            let fast: BTreeSet<(u32, BTreeSet<usize>)> = report
                .blossoms
                .iter()
                .map(|b| (b.center, b.cycles.iter().copied().collect()))
                .collect();
            assert_eq!(fast, oracle_blossoms(&family), "seed {seed}");
        }
    }

    #[test]
    fn breaking_then_assembling_never_fails() {
        for seed in 0..40u64 {
            let n = 8 + (seed % 6) as u32;
            let g = Graph::gnp(n, 0.7, seed);
            let d = random_orientation(&g, seed ^ 0xaa);
            let family = greedy_family(&d, seed);
            let (clean, _) = break_blossoms(&family).unwrap();
            let rot = assemble_rotation(&g, &d, &clean, seed).unwrap();
            let verdict = verify_faces(&g, &rot, &clean);
            assert!(verdict.ok, "seed {seed}: missing {:?}", verdict.missing);
        }
    }
}
