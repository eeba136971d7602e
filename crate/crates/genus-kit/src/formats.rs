//! Text formats: edge lists, rotation files, partition/quotient dumps, and
//! the key-value run report.
//!
//! Edge list: header `n m`, then `m` lines `u v` (0-indexed); `#` starts a
//! comment line; duplicate edges collapse, loops are rejected.
//! Rotation file: one line per vertex, `v: u1 u2 ... ud`, cyclic order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use genus_core::graph::{Graph, GraphError};
use genus_core::partition::EquitablePartition;
use genus_core::quotient::QuotientGraph;
use genus_core::rotation::RotationSystem;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("rotation file lists vertex {v} more than once")]
    DuplicateVertex { v: u32 },
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Content lines with 1-based numbers; comments and blanks skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "empty graph file"))?;
    let mut it = header.split_whitespace();
    let n: u32 = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(hline, "header must be \"n m\""))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(hline, "header must be \"n m\""))?;
    if it.next().is_some() {
        return Err(parse_err(hline, "header must be \"n m\""));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {m} edges, file ends early")))?;
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(lno, "edge line must be \"u v\""))?;
        let v: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(lno, "edge line must be \"u v\""))?;
        if it.next().is_some() {
            return Err(parse_err(lno, "edge line must be \"u v\""));
        }
        edges.push((u, v));
    }
    if let Some((lno, _)) = lines.next() {
        return Err(parse_err(lno, format!("more than the declared {m} edges")));
    }
    Ok(Graph::from_edges(n, edges)?)
}

pub fn load_graph(path: &Path) -> Result<Graph, FormatError> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn format_rotation(rot: &RotationSystem) -> String {
    let mut out = String::new();
    for (v, order) in rot.orders().iter().enumerate() {
        let _ = write!(out, "{v}:");
        for &u in order {
            let _ = write!(out, " {u}");
        }
        out.push('\n');
    }
    out
}

/// Parse a rotation file for a graph on `n` vertices.  Unlisted vertices get
/// empty orders; validity against a concrete graph is the caller's step.
pub fn parse_rotation(text: &str, n: u32) -> Result<RotationSystem, FormatError> {
    let mut order: Vec<Option<Vec<u32>>> = vec![None; n as usize];
    for (lno, line) in content_lines(text) {
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(lno, "rotation line must be \"v: u1 u2 ...\""))?;
        let v: u32 = head
            .trim()
            .parse()
            .map_err(|_| parse_err(lno, "rotation line must start with a vertex id"))?;
        if v >= n {
            return Err(parse_err(lno, format!("vertex {v} out of range for n={n}")));
        }
        let mut ring = Vec::new();
        for tok in rest.split_whitespace() {
            let u: u32 = tok
                .parse()
                .map_err(|_| parse_err(lno, format!("bad neighbor token {tok:?}")))?;
            ring.push(u);
        }
        let slot = &mut order[v as usize];
        if slot.is_some() {
            return Err(FormatError::DuplicateVertex { v });
        }
        *slot = Some(ring);
    }
    Ok(RotationSystem::new(order.into_iter().map(Option::unwrap_or_default).collect()))
}

pub fn load_rotation(path: &Path, n: u32) -> Result<RotationSystem, FormatError> {
    parse_rotation(&fs::read_to_string(path)?, n)
}

pub fn format_partition(p: &EquitablePartition) -> String {
    let mut out = String::new();
    for (i, part) in p.parts().iter().enumerate() {
        let _ = write!(out, "{i}:");
        for &v in part {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn format_quotient(q: &QuotientGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", q.k());
    for i in 0..q.k() {
        let row: Vec<String> = (0..q.k()).map(|j| format!("{:.6}", q.density(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let mut irregular: Vec<(usize, usize)> = Vec::new();
    for i in 0..q.k() {
        for j in (i + 1)..q.k() {
            if !q.is_regular(i, j) {
                irregular.push((i, j));
            }
        }
    }
    let _ = write!(out, "irregular:");
    for (i, j) in irregular {
        let _ = write!(out, " {i},{j}");
    }
    out.push('\n');
    out
}

/// The fixed-key run report.  Every key is always present, in this order;
/// fields that do not apply to the command render as `-`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub n: u32,
    pub e: usize,
    pub phase: Option<u8>,
    pub k: Option<usize>,
    pub nu: Option<f64>,
    pub estimate: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub genus_achieved: Option<u32>,
    pub f3: Option<usize>,
    pub f4: Option<usize>,
    pub blossoms_removed: Option<usize>,
    pub g0_edges: Option<usize>,
    pub seed: Option<u64>,
}

fn kv(out: &mut String, key: &str, value: Option<String>) {
    let _ = writeln!(out, "{key} = {}", value.unwrap_or_else(|| "-".into()));
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        kv(&mut out, "n", Some(self.n.to_string()));
        kv(&mut out, "e", Some(self.e.to_string()));
        kv(&mut out, "phase", self.phase.map(|p| p.to_string()));
        kv(&mut out, "K", self.k.map(|k| k.to_string()));
        kv(&mut out, "nu", self.nu.map(|x| format!("{x:.6}")));
        kv(&mut out, "estimate", self.estimate.map(|x| format!("{x:.6}")));
        kv(&mut out, "lower", self.lower.map(|x| format!("{x:.6}")));
        kv(&mut out, "upper", self.upper.map(|x| format!("{x:.6}")));
        kv(&mut out, "genus_achieved", self.genus_achieved.map(|g| g.to_string()));
        kv(&mut out, "f3", self.f3.map(|x| x.to_string()));
        kv(&mut out, "f4", self.f4.map(|x| x.to_string()));
        kv(&mut out, "blossoms_removed", self.blossoms_removed.map(|x| x.to_string()));
        kv(&mut out, "g0_edges", self.g0_edges.map(|x| x.to_string()));
        kv(&mut out, "seed", self.seed.map(|s| s.to_string()));
        out
    }
}
