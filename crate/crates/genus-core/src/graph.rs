//! Simple graphs, their orientations, and seeded edge splitting.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    Loop { v: u32 },
    VertexOutOfRange { v: u32, n: u32 },
    DuplicateArc { u: u32, v: u32 },
    OppositeArcPresent { u: u32, v: u32 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Loop { v } => write!(f, "loop at vertex {v} is not allowed"),
            GraphError::VertexOutOfRange { v, n } => {
                write!(f, "vertex {v} out of range for graph on {n} vertices")
            }
            GraphError::DuplicateArc { u, v } => write!(f, "arc ({u}, {v}) listed twice"),
            GraphError::OppositeArcPresent { u, v } => {
                write!(f, "both ({u}, {v}) and ({v}, {u}) present")
            }
        }
    }
}

impl core::error::Error for GraphError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitError {
    NegativeFraction { index: usize, value_millionths: i64 },
    FractionSum { sum_millionths: i64 },
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::NegativeFraction { index, value_millionths } => {
                write!(f, "fraction #{index} is negative ({}e-6)", value_millionths)
            }
            SplitError::FractionSum { sum_millionths } => {
                write!(f, "fractions sum to {}e-6, expected 1", sum_millionths)
            }
        }
    }
}

impl core::error::Error for SplitError {}

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored with `u < v` in lexicographic order; adjacency lists are
/// sorted ascending.  Duplicate input edges are collapsed, loops are rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn from_edges(
        n: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        let mut list: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::Loop { v: a });
            }
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n as usize];
        for &(u, v) in &list {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Position of `{u, v}` in the sorted edge list.
    pub fn edge_id(&self, u: u32, v: u32) -> Option<u32> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok().map(|i| i as u32)
    }

    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n as usize];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s as usize] {
                continue;
            }
            let mut comp = vec![s];
            seen[s as usize] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Two-coloring if the graph is bipartite.  Isolated vertices join the
    /// first side.  Sides are sorted.
    pub fn bipartition(&self) -> Option<(Vec<u32>, Vec<u32>)> {
        let mut color = vec![u8::MAX; self.n as usize];
        let mut queue = Vec::new();
        for s in 0..self.n {
            if color[s as usize] != u8::MAX {
                continue;
            }
            color[s as usize] = 0;
            queue.clear();
            queue.push(s);
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                for &w in self.neighbors(v) {
                    if color[w as usize] == u8::MAX {
                        color[w as usize] = 1 - color[v as usize];
                        queue.push(w);
                    } else if color[w as usize] == color[v as usize] {
                        return None;
                    }
                }
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for v in 0..self.n {
            if color[v as usize] == 0 {
                a.push(v);
            } else {
                b.push(v);
            }
        }
        Some((a, b))
    }

    pub fn has_triangle(&self) -> bool {
        for &(u, v) in &self.edges {
            let (mut i, mut j) = (0, 0);
            let (a, b) = (self.neighbors(u), self.neighbors(v));
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    core::cmp::Ordering::Less => i += 1,
                    core::cmp::Ordering::Greater => j += 1,
                    core::cmp::Ordering::Equal => return true,
                }
            }
        }
        false
    }

    pub fn complete(n: u32) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    /// Complete bipartite graph; left side `0..a`, right side `a..a+b`.
    pub fn complete_bipartite(a: u32, b: u32) -> Graph {
        let edges = (0..a).flat_map(move |u| (a..a + b).map(move |v| (u, v)));
        Graph::from_edges(a + b, edges).expect("complete bipartite graph is simple")
    }

    pub fn cycle(n: u32) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n).map(|u| (u, (u + 1) % n));
        Graph::from_edges(n, edges).expect("cycle is simple")
    }

    pub fn path(n: u32) -> Graph {
        let edges = (1..n).map(|u| (u - 1, u));
        Graph::from_edges(n, edges).expect("path is simple")
    }

    /// Erdős–Rényi graph: each pair kept independently with probability `p`.
    pub fn gnp(n: u32, p: f64, seed: u64) -> Graph {
        let mut rng = rng::stream(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng::unit(&mut rng) < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).expect("sampled pairs are simple")
    }

    /// Random bipartite graph; left side `0..a`, right side `a..a+b`.
    pub fn gnp_bipartite(a: u32, b: u32, p: f64, seed: u64) -> Graph {
        let mut rng = rng::stream(seed);
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                if rng::unit(&mut rng) < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(a + b, edges).expect("sampled pairs are simple")
    }
}

/// Directed graph on vertices `0..n` with at most one arc per vertex pair.
///
/// Arc ids are positions in the arc list; `reversed` preserves ids, so an arc
/// and its mirror share an id across the two views.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: u32,
    arcs: Vec<(u32, u32)>,
    out: Vec<Vec<(u32, u32)>>,
    inn: Vec<Vec<(u32, u32)>>,
}

impl Digraph {
    pub fn from_arcs(n: u32, arcs: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        for &(u, v) in &arcs {
            if u == v {
                return Err(GraphError::Loop { v: u });
            }
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
        }
        let mut sorted: Vec<(u32, u32)> = arcs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                let (u, v) = w[0];
                let dup = arcs.iter().filter(|&&a| a == (u, v) || a == (v, u)).count();
                if arcs.contains(&(u, v)) && arcs.contains(&(v, u)) {
                    return Err(GraphError::OppositeArcPresent { u, v });
                }
                debug_assert!(dup > 1);
                return Err(GraphError::DuplicateArc { u, v });
            }
        }
        let mut out = vec![Vec::new(); n as usize];
        let mut inn = vec![Vec::new(); n as usize];
        for (id, &(u, v)) in arcs.iter().enumerate() {
            out[u as usize].push((v, id as u32));
            inn[v as usize].push((u, id as u32));
        }
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
        }
        Ok(Digraph { n, arcs, out, inn })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn arc(&self, id: u32) -> (u32, u32) {
        self.arcs[id as usize]
    }

    /// Out-neighbors as `(head, arc id)`, sorted by head.
    pub fn out(&self, v: u32) -> &[(u32, u32)] {
        &self.out[v as usize]
    }

    /// In-neighbors as `(tail, arc id)`, sorted by tail.
    pub fn inn(&self, v: u32) -> &[(u32, u32)] {
        &self.inn[v as usize]
    }

    pub fn out_degree(&self, v: u32) -> usize {
        self.out[v as usize].len()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.inn[v as usize].len()
    }

    pub fn arc_id(&self, u: u32, v: u32) -> Option<u32> {
        let l = &self.out[u as usize];
        l.binary_search_by_key(&v, |&(h, _)| h).ok().map(|i| l[i].1)
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        self.arc_id(u, v).is_some()
    }

    /// The mirror digraph; arc `id` here is the reversal of arc `id` in `self`.
    pub fn reversed(&self) -> Digraph {
        Digraph {
            n: self.n,
            arcs: self.arcs.iter().map(|&(u, v)| (v, u)).collect(),
            out: self.inn.clone(),
            inn: self.out.clone(),
        }
    }
}

/// Orient every edge independently at random; arc `i` orients edge `i`.
pub fn random_orientation(g: &Graph, seed: u64) -> Digraph {
    let mut rng = rng::stream(seed);
    let arcs = g
        .edges()
        .iter()
        .map(|&(u, v)| if rng::unit(&mut rng) < 0.5 { (u, v) } else { (v, u) })
        .collect();
    Digraph::from_arcs(g.n(), arcs).expect("orientation of a simple graph is valid")
}

/// Assign each item to one of `fractions.len()` classes independently, class
/// `i` with probability `fractions[i]`.  Fractions must be non-negative and
/// sum to 1 within 1e-9.
pub fn split_elements<T: Clone>(
    items: &[T],
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<Vec<T>>, SplitError> {
    for (index, &c) in fractions.iter().enumerate() {
        if c < 0.0 {
            return Err(SplitError::NegativeFraction {
                index,
                value_millionths: (c * 1e6) as i64,
            });
        }
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SplitError::FractionSum { sum_millionths: (sum * 1e6) as i64 });
    }
    let mut cumulative: Vec<f64> = Vec::with_capacity(fractions.len());
    let mut acc = 0.0;
    for &c in fractions {
        acc += c;
        cumulative.push(acc);
    }
    if let Some(last) = cumulative.last_mut() {
        *last = 1.0;
    }
    let mut rng = rng::stream(seed);
    let mut classes = vec![Vec::new(); fractions.len()];
    for item in items {
        let x = rng::unit(&mut rng);
        let k = cumulative.iter().position(|&c| x < c).unwrap_or(fractions.len() - 1);
        classes[k].push(item.clone());
    }
    Ok(classes)
}

/// [`split_elements`] specialised to edge lists.
pub fn split_edges(
    edges: &[(u32, u32)],
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<Vec<(u32, u32)>>, SplitError> {
    split_elements(edges, fractions, seed)
}
