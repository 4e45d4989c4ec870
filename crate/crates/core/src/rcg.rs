//! Pairwise storage compatibility and the resource compatibility graph.
//!
//! For two data `a` and `b`, with `a` written first, the classification
//! below decides which single storage element could hold both:
//!
//! * **Register**: `b` is written no earlier than `a`'s last read.
//! * **FIFO**: `b` is written while `a` is live and first read after `a`'s last read.
//! * **LIFO**: `b` is written after `a` and fully read before `a`'s first read,
//!   or `b`'s whole lifetime fits strictly between two consecutive reads of `a`.
//!
//! Any other pair gets no edge.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::element::{self, StorageKind};
use crate::ids::DataId;
use crate::schedule::{chronological, Lifetime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CompatTag {
    Register,
    Fifo,
    Lifo,
}

impl CompatTag {
    pub fn letter(self) -> char {
        match self {
            CompatTag::Register => 'R',
            CompatTag::Fifo => 'F',
            CompatTag::Lifo => 'L',
        }
    }
}

impl From<CompatTag> for StorageKind {
    fn from(t: CompatTag) -> Self {
        match t {
            CompatTag::Register => StorageKind::Register,
            CompatTag::Fifo => StorageKind::Fifo,
            CompatTag::Lifo => StorageKind::Lifo,
        }
    }
}

impl fmt::Display for CompatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CompatTag::Register => "REG",
            CompatTag::Fifo => "FIFO",
            CompatTag::Lifo => "LIFO",
        };
        f.write_str(s)
    }
}

pub fn register_rule(a: &Lifetime, b: &Lifetime) -> bool {
    b.tau_min >= a.tau_max()
}

pub fn fifo_rule(a: &Lifetime, b: &Lifetime) -> bool {
    b.tau_min > a.tau_min && b.tau_first() > a.tau_max() && b.tau_min < a.tau_max()
}

pub fn lifo_rule(a: &Lifetime, b: &Lifetime) -> bool {
    let nested = b.tau_min > a.tau_min && a.tau_first() > b.tau_max();
    nested || a.reads().windows(2).any(|w| w[0] < b.tau_min && b.tau_min < b.tau_max() && b.tau_max() < w[1])
}

/// Every rule that fires for the oriented pair; at most one for well-formed lifetimes.
pub fn firing_rules(a: &Lifetime, b: &Lifetime) -> Vec<CompatTag> {
    let mut v = Vec::new();
    if register_rule(a, b) {
        v.push(CompatTag::Register);
    }
    if fifo_rule(a, b) {
        v.push(CompatTag::Fifo);
    }
    if lifo_rule(a, b) {
        v.push(CompatTag::Lifo);
    }
    v
}

/// Compatibility tag of the pair, `a` being chronologically first.
///
/// # Panics
/// If `b` is written before `a`.
pub fn classify_pair(a: &Lifetime, b: &Lifetime) -> Option<CompatTag> {
    assert!(
        a.order_key() <= b.order_key(),
        "classify_pair: `{}` (cycle {}) is not chronologically after `{}` (cycle {})",
        b.data_id,
        b.tau_min,
        a.data_id,
        a.tau_min
    );
    if register_rule(a, b) {
        Some(CompatTag::Register)
    } else if fifo_rule(a, b) {
        Some(CompatTag::Fifo)
    } else if lifo_rule(a, b) {
        Some(CompatTag::Lifo)
    } else {
        None
    }
}

/// Replays the pair through one element of the tagged kind (two slots for
/// FIFO/LIFO, one for a register) and reports whether every access is legal.
pub fn semantic_oracle(a: &Lifetime, b: &Lifetime, kind: CompatTag) -> bool {
    let capacity = if kind == CompatTag::Register { 1 } else { 2 };
    element::replay(kind.into(), capacity, &[a, b]).is_ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RcgEdge {
    /// Index of the chronologically earlier vertex.
    pub from: usize,
    pub to: usize,
    pub tag: CompatTag,
}

/// Resource compatibility graph over data. Vertices are kept in chronological
/// order, so every edge points from a lower to a higher index.
#[derive(Clone, Debug, Serialize)]
pub struct Rcg {
    vertices: Vec<Lifetime>,
    edges: Vec<RcgEdge>,
    #[serde(skip)]
    tags: Vec<Option<CompatTag>>,
}

impl Rcg {
    pub fn vertices(&self) -> &[Lifetime] {
        &self.vertices
    }

    pub fn edges(&self) -> &[RcgEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, id: &DataId) -> Option<usize> {
        self.vertices.iter().position(|v| &v.data_id == id)
    }

    /// Tag of the edge between `u` and `v`, in either orientation.
    pub fn tag(&self, u: usize, v: usize) -> Option<CompatTag> {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.tags[u * self.vertices.len() + v]
    }

    pub fn count(&self, tag: CompatTag) -> usize {
        self.edges.iter().filter(|e| e.tag == tag).count()
    }

    /// Line-oriented dump: `vertex <id> <write> <reads...>` then `<from> <to> <TAG>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = write!(out, "vertex {} {}", v.data_id, v.tau_min);
            for r in v.reads() {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
        }
        for e in &self.edges {
            let _ =
                writeln!(out, "{} {} {}", self.vertices[e.from].data_id, self.vertices[e.to].data_id, e.tag);
        }
        out
    }
}

pub fn build_rcg(lifetimes: &BTreeMap<DataId, Lifetime>) -> Rcg {
    let vertices = chronological(lifetimes);
    let n = vertices.len();
    let mut tags = vec![None; n * n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(tag) = classify_pair(&vertices[i], &vertices[j]) {
                tags[i * n + j] = Some(tag);
                edges.push(RcgEdge { from: i, to: j, tag });
            }
        }
    }
    Rcg { vertices, edges, tags }
}

/// Longest path in a DAG whose vertices `0..n` are topologically indexed
/// (edges only go from lower to higher index). Ties prefer the path starting
/// at the lower index, then the lexicographically smaller id sequence.
/// Returns `None` when no active edge exists.
pub(crate) fn longest_path<'a>(
    n: usize,
    active: impl Fn(usize) -> bool,
    edge: impl Fn(usize, usize) -> bool,
    id: impl Fn(usize) -> &'a str,
) -> Option<Vec<usize>> {
    let better = |x: &[usize], y: &[usize]| -> bool {
        if x.len() != y.len() {
            return x.len() > y.len();
        }
        if x[0] != y[0] {
            return x[0] < y[0];
        }
        x.iter().map(|&i| id(i)).lt(y.iter().map(|&i| id(i)))
    };

    let mut best: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut overall: Option<Vec<usize>> = None;
    for v in 0..n {
        if !active(v) {
            continue;
        }
        let mut cand = vec![v];
        for (u, prev) in best.iter().enumerate().take(v) {
            if prev.is_empty() || !edge(u, v) {
                continue;
            }
            let len = prev.len() + 1;
            if len < cand.len() {
                continue;
            }
            let mut p = Vec::with_capacity(len);
            p.extend_from_slice(prev);
            p.push(v);
            if better(&p, &cand) {
                cand = p;
            }
        }
        if cand.len() >= 2 && overall.as_ref().is_none_or(|o| better(&cand, o)) {
            overall = Some(cand.clone());
        }
        best[v] = cand;
    }
    overall
}
