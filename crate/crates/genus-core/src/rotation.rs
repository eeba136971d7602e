//! Rotation systems and face tracing.
//!
//! A rotation system fixes, at every vertex, a cyclic order of its incident
//! edges; tracing the induced closed walks yields the faces of the associated
//! cellular embedding.  The traversal convention: the walk entering `v` along
//! `u -> v` leaves along `v -> w`, where `w` follows `u` in the rotation at
//! `v`.  Genus is read off Euler's formula per connected component.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationError {
    VertexCountMismatch { expected: u32, got: u32 },
    NeighborSetMismatch { v: u32 },
}

impl fmt::Display for RotationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationError::VertexCountMismatch { expected, got } => {
                write!(f, "rotation system covers {got} vertices, graph has {expected}")
            }
            RotationError::NeighborSetMismatch { v } => {
                write!(f, "rotation at vertex {v} does not list its neighbors exactly once")
            }
        }
    }
}

impl core::error::Error for RotationError {}

/// Cyclic neighbor orders, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    order: Vec<Vec<u32>>,
}

impl RotationSystem {
    pub fn new(order: Vec<Vec<u32>>) -> Self {
        RotationSystem { order }
    }

    /// Rotation listing each adjacency in ascending order.
    pub fn sorted(g: &Graph) -> Self {
        RotationSystem { order: (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect() }
    }

    pub fn n(&self) -> u32 {
        self.order.len() as u32
    }

    pub fn order(&self, v: u32) -> &[u32] {
        &self.order[v as usize]
    }

    pub fn orders(&self) -> &[Vec<u32>] {
        &self.order
    }

    pub fn orders_mut(&mut self) -> &mut [Vec<u32>] {
        &mut self.order
    }

    /// Neighbor following `u` in the cyclic order at `v`.
    pub fn successor(&self, v: u32, u: u32) -> Option<u32> {
        let r = &self.order[v as usize];
        let i = r.iter().position(|&x| x == u)?;
        Some(r[(i + 1) % r.len()])
    }

    pub fn validate(&self, g: &Graph) -> Result<(), RotationError> {
        if self.n() != g.n() {
            return Err(RotationError::VertexCountMismatch { expected: g.n(), got: self.n() });
        }
        for v in 0..g.n() {
            let mut listed = self.order[v as usize].clone();
            listed.sort_unstable();
            if listed != g.neighbors(v) {
                return Err(RotationError::NeighborSetMismatch { v });
            }
        }
        Ok(())
    }

    /// Apply the vertex relabeling `sigma` (old label -> new label).
    pub fn relabeled(&self, sigma: &[u32]) -> RotationSystem {
        let mut order = vec![Vec::new(); self.order.len()];
        for (v, r) in self.order.iter().enumerate() {
            order[sigma[v] as usize] = r.iter().map(|&u| sigma[u as usize]).collect();
        }
        RotationSystem { order }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentFacts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: u32,
}

/// Faces of the embedding determined by a rotation system.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceCensus {
    /// Each face as a closed directed walk; the walk length is the number of
    /// edge sides on the face.
    pub faces: Vec<Vec<u32>>,
    pub by_length: BTreeMap<usize, usize>,
    /// Total genus, summed over connected components.
    pub genus: u32,
    pub per_component: Vec<ComponentFacts>,
}

impl FaceCensus {
    pub fn f(&self) -> usize {
        self.faces.len()
    }

    pub fn count_of_length(&self, k: usize) -> usize {
        self.by_length.get(&k).copied().unwrap_or(0)
    }

    pub fn f3(&self) -> usize {
        self.count_of_length(3)
    }

    pub fn f4(&self) -> usize {
        self.count_of_length(4)
    }

    pub fn side_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }
}

/// Trace all faces of the embedding `(g, rot)`.
pub fn trace_faces(g: &Graph, rot: &RotationSystem) -> Result<FaceCensus, RotationError> {
    rot.validate(g)?;
    let n = g.n();

    // successor[v]: neighbor -> next neighbor in the rotation, sorted by key.
    let mut successor: Vec<Vec<(u32, u32)>> = Vec::with_capacity(n as usize);
    for v in 0..n {
        let r = rot.order(v);
        let mut map: Vec<(u32, u32)> = (0..r.len()).map(|i| (r[i], r[(i + 1) % r.len()])).collect();
        map.sort_unstable();
        successor.push(map);
    }
    let succ = |v: u32, u: u32| -> u32 {
        let m = &successor[v as usize];
        m[m.binary_search_by_key(&u, |&(k, _)| k).expect("validated rotation")].1
    };

    // Side id: 2 * edge id, +1 for the high-to-low direction.
    let side_of = |u: u32, v: u32| -> usize {
        let id = g.edge_id(u, v).expect("side of an existing edge") as usize;
        2 * id + usize::from(u > v)
    };
    let mut seen = vec![false; 2 * g.edge_count()];
    let mut faces: Vec<Vec<u32>> = Vec::new();
    for start in 0..2 * g.edge_count() {
        if seen[start] {
            continue;
        }
        let (a, b) = g.edges()[start / 2];
        let (mut u, mut v) = if start % 2 == 0 { (a, b) } else { (b, a) };
        let mut walk = Vec::new();
        loop {
            let side = side_of(u, v);
            if seen[side] {
                break;
            }
            seen[side] = true;
            walk.push(u);
            let w = succ(v, u);
            u = v;
            v = w;
        }
        faces.push(walk);
    }

    let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
    for f in &faces {
        *by_length.entry(f.len()).or_insert(0) += 1;
    }
    debug_assert_eq!(faces.iter().map(Vec::len).sum::<usize>(), 2 * g.edge_count());

    let comps = g.components();
    let mut comp_of = vec![0usize; n as usize];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v as usize] = i;
        }
    }
    let mut edge_tally = vec![0usize; comps.len()];
    for &(u, _) in g.edges() {
        edge_tally[comp_of[u as usize]] += 1;
    }
    let mut face_tally = vec![0usize; comps.len()];
    for f in &faces {
        face_tally[comp_of[f[0] as usize]] += 1;
    }
    let mut per_component = Vec::with_capacity(comps.len());
    let mut genus = 0u32;
    for (i, c) in comps.iter().enumerate() {
        let (nv, ne, nf) = (c.len(), edge_tally[i], face_tally[i]);
        let g_i = if ne == 0 {
            0
        } else {
            let doubled = 2 + ne as i64 - nv as i64 - nf as i64;
            debug_assert!(doubled >= 0 && doubled % 2 == 0, "Euler failure: {doubled}");
            (doubled / 2) as u32
        };
        genus += g_i;
        per_component.push(ComponentFacts { vertices: nv, edges: ne, faces: nf, genus: g_i });
    }
    Ok(FaceCensus { faces, by_length, genus, per_component })
}
