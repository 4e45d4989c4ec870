//! Storage binding: FIFO/LIFO chain identification, sizing, and the greedy
//! binder that turns chains into hierarchical storage nodes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::element::{self, StorageKind};
use crate::ids::{Cycle, DataId};
use crate::interval::{Interval, IntervalSet};
use crate::rcg::{longest_path, CompatTag, Rcg};
use crate::schedule::Lifetime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Priority {
    FifoFirst,
    LifoFirst,
}

/// User knobs steering the greedy binder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreedyConfig {
    /// Minimum member count for a FIFO or LIFO to be instantiated.
    pub min_len: usize,
    /// Minimum fill factor for a FIFO or LIFO to be instantiated.
    #[serde(rename = "fill")]
    pub fill_threshold: f64,
    #[serde(rename = "fifo")]
    pub fifo_enabled: bool,
    #[serde(rename = "lifo")]
    pub lifo_enabled: bool,
    pub priority: Priority,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            min_len: 2,
            fill_threshold: 0.0,
            fifo_enabled: true,
            lifo_enabled: true,
            priority: Priority::FifoFirst,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("min_len must be at least 2 when FIFO or LIFO binding is enabled (got {0})")]
    MinLen(usize),
    #[error("fill threshold must lie in [0, 1] (got {0})")]
    Fill(f64),
}

impl GreedyConfig {
    /// Configuration with FIFO and LIFO binding disabled: every datum gets a register.
    pub fn registers_only() -> Self {
        Self { fifo_enabled: false, lifo_enabled: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if (self.fifo_enabled || self.lifo_enabled) && self.min_len < 2 {
            return Err(ConfigError::MinLen(self.min_len));
        }
        if !(0.0..=1.0).contains(&self.fill_threshold) {
            return Err(ConfigError::Fill(self.fill_threshold));
        }
        Ok(())
    }

    /// Short label for tables, e.g. `F/L min 7 fill 0.95`.
    pub fn label(&self) -> String {
        let kinds = match (self.fifo_enabled, self.lifo_enabled) {
            (false, false) => return "No F/L".to_owned(),
            (true, true) => "F/L",
            (true, false) => "F",
            (false, true) => "L",
        };
        let prio = match self.priority {
            Priority::FifoFirst => "",
            Priority::LifoFirst => " lifo-first",
        };
        format!("{kinds} min {} fill {:.2}{prio}", self.min_len, self.fill_threshold)
    }

    /// The sweep grid used when none is supplied.
    pub fn default_grid() -> Vec<GreedyConfig> {
        let fl = |min_len, fill| GreedyConfig { min_len, fill_threshold: fill, ..Self::default() };
        vec![
            fl(2, 0.0),
            GreedyConfig { priority: Priority::LifoFirst, ..fl(2, 0.0) },
            GreedyConfig { lifo_enabled: false, ..fl(2, 0.0) },
            GreedyConfig { fifo_enabled: false, ..fl(2, 0.0) },
            fl(7, 0.0),
            fl(15, 0.0),
            fl(7, 0.95),
            fl(15, 0.90),
            fl(2, 0.5),
            Self::registers_only(),
        ]
    }

    fn enabled(&self) -> Vec<StorageKind> {
        let mut kinds = Vec::new();
        if self.fifo_enabled {
            kinds.push(StorageKind::Fifo);
        }
        if self.lifo_enabled {
            kinds.push(StorageKind::Lifo);
        }
        if self.priority == Priority::LifoFirst {
            kinds.reverse();
        }
        kinds
    }
}

/// A FIFO or LIFO chain proposed for binding.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateStructure {
    pub kind: StorageKind,
    /// Vertex indices into the graph, chronologically ordered.
    pub members: Vec<usize>,
    pub capacity: usize,
    pub lifetime: Interval,
    pub fill: f64,
}

/// A bound storage structure: one element instance and the data it hosts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierNode {
    pub id: String,
    pub kind: StorageKind,
    pub members: Vec<DataId>,
    pub capacity: usize,
    pub lifetime: IntervalSet,
}

/// Result of binding: every datum assigned to exactly one node.
#[derive(Clone, Debug, Serialize)]
pub struct BoundGraph {
    pub nodes: Vec<HierNode>,
    #[serde(skip)]
    pub rcg: Rcg,
}

impl BoundGraph {
    pub fn total_capacity(&self) -> usize {
        self.nodes.iter().map(|n| n.capacity).sum()
    }

    pub fn count(&self, kind: StorageKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Lifetimes of the members of `node`, in member order.
    pub fn member_lifetimes<'a>(&'a self, node: &HierNode) -> Vec<&'a Lifetime> {
        node.members
            .iter()
            .map(|d| &self.rcg.vertices()[self.rcg.index_of(d).expect("member is a graph vertex")])
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bound graph serialization is infallible")
    }
}

fn tag_of(kind: StorageKind) -> CompatTag {
    match kind {
        StorageKind::Fifo => CompatTag::Fifo,
        StorageKind::Lifo => CompatTag::Lifo,
        StorageKind::Register => CompatTag::Register,
    }
}

fn chain_within(g: &Rcg, kind: StorageKind, active: &[bool]) -> Option<Vec<usize>> {
    let tag = tag_of(kind);
    longest_path(
        g.len(),
        |v| active[v],
        |u, v| g.tag(u, v) == Some(tag),
        |v| g.vertices()[v].data_id.as_str(),
    )
}

fn candidate(g: &Rcg, kind: StorageKind, members: Vec<usize>) -> CandidateStructure {
    let capacity = match kind {
        StorageKind::Fifo => size_fifo(&members, g),
        _ => size_lifo(&members),
    };
    let lts: Vec<&Lifetime> = members.iter().map(|&i| &g.vertices()[i]).collect();
    let lifetime = structure_lifetime(&lts, kind);
    let fill = fill_factor(&lts, capacity, lifetime);
    CandidateStructure { kind, members, capacity, lifetime, fill }
}

/// Longest chain whose consecutive members are linked by `kind`-tagged edges.
pub fn longest_chain(g: &Rcg, kind: StorageKind) -> Option<CandidateStructure> {
    assert!(kind != StorageKind::Register, "register chains are not storage candidates");
    let active = vec![true; g.len()];
    chain_within(g, kind, &active).map(|m| candidate(g, kind, m))
}

/// FIFO depth: one plus the largest number of FIFO edges entering a path
/// member from another path member.
pub fn size_fifo(path: &[usize], g: &Rcg) -> usize {
    let incoming = path
        .iter()
        .map(|&i| path.iter().filter(|&&j| j < i && g.tag(j, i) == Some(CompatTag::Fifo)).count())
        .max()
        .unwrap_or(0);
    1 + incoming
}

/// LIFO depth: every member of a LIFO chain is nested in its predecessor.
pub fn size_lifo(path: &[usize]) -> usize {
    path.len()
}

/// Interval during which the structure is in use.
pub fn structure_lifetime(members: &[&Lifetime], kind: StorageKind) -> Interval {
    let first = members.first().expect("structure has members");
    match kind {
        StorageKind::Fifo => Interval::new(first.tau_min, members.last().expect("non-empty").tau_max()),
        StorageKind::Lifo => Interval::new(first.tau_min, first.tau_max()),
        StorageKind::Register => {
            Interval::new(first.tau_min, members.iter().map(|m| m.tau_max()).max().expect("non-empty"))
        }
    }
}

/// Average occupancy over the structure's span: member-cycles live (write
/// cycle to last read, inclusive) over `capacity × span length`, clamped to 1.
pub fn fill_factor(members: &[&Lifetime], capacity: usize, span: Interval) -> f64 {
    let live: Cycle = members
        .iter()
        .map(|m| {
            let s = m.tau_min.max(span.start);
            let e = m.tau_max().min(span.end);
            if e >= s {
                e - s + 1
            } else {
                0
            }
        })
        .sum();
    let denom = capacity as f64 * span.len() as f64;
    (live as f64 / denom).min(1.0)
}

/// Greedy storage binding.
///
/// Each round takes the longest remaining chain of every enabled kind,
/// ranks them by member count (then by configured priority), and accepts the
/// first that meets `min_len` and the fill threshold. Accepted members leave
/// the pool. The loop ends when no kind's best chain is acceptable; every
/// datum still unbound becomes its own register.
pub fn greedy_bind(g: &Rcg, cfg: &GreedyConfig) -> BoundGraph {
    let mut evicted: BTreeSet<usize> = BTreeSet::new();
    loop {
        match bind_pass(g, cfg, &evicted) {
            Ok(nodes) => {
                return BoundGraph { nodes, rcg: g.clone() };
            }
            Err(v) => {
                evicted.insert(v);
            }
        }
    }
}

/// One binding pass; returns the vertex to evict if a structure fails replay.
fn bind_pass(g: &Rcg, cfg: &GreedyConfig, evicted: &BTreeSet<usize>) -> Result<Vec<HierNode>, usize> {
    let n = g.len();
    let mut active: Vec<bool> = (0..n).map(|v| !evicted.contains(&v)).collect();
    let mut structures: Vec<CandidateStructure> = Vec::new();
    let kinds = cfg.enabled();

    loop {
        let mut cands: Vec<CandidateStructure> =
            kinds.iter().filter_map(|&k| chain_within(g, k, &active).map(|m| candidate(g, k, m))).collect();
        // Stable sort keeps priority order among equal lengths.
        cands.sort_by_key(|c| std::cmp::Reverse(c.members.len()));
        let Some(chosen) =
            cands.into_iter().find(|c| c.members.len() >= cfg.min_len && c.fill >= cfg.fill_threshold)
        else {
            break;
        };
        let lts: Vec<&Lifetime> = chosen.members.iter().map(|&i| &g.vertices()[i]).collect();
        if let Err(fault) = element::replay(chosen.kind, chosen.capacity, &lts) {
            let v = g.index_of(fault.data()).expect("replayed datum is a vertex");
            return Err(v);
        }
        for &m in &chosen.members {
            active[m] = false;
        }
        structures.push(chosen);
    }

    let mut nodes: Vec<HierNode> = structures
        .into_iter()
        .map(|c| HierNode {
            id: String::new(),
            kind: c.kind,
            members: c.members.iter().map(|&i| g.vertices()[i].data_id.clone()).collect(),
            capacity: c.capacity,
            lifetime: IntervalSet::single(c.lifetime),
        })
        .collect();
    for v in (0..n).filter(|&v| active[v] || evicted.contains(&v)) {
        let lt = &g.vertices()[v];
        nodes.push(HierNode {
            id: String::new(),
            kind: StorageKind::Register,
            members: vec![lt.data_id.clone()],
            capacity: 1,
            lifetime: IntervalSet::single(Interval::new(lt.tau_min, lt.tau_max())),
        });
    }
    number_nodes(&mut nodes);
    Ok(nodes)
}

/// Orders nodes by first use and assigns `n0, n1, ...`.
pub(crate) fn number_nodes(nodes: &mut [HierNode]) {
    nodes.sort_by(|a, b| {
        (a.lifetime.start(), a.kind, &a.members).cmp(&(b.lifetime.start(), b.kind, &b.members))
    });
    for (i, n) in nodes.iter_mut().enumerate() {
        n.id = format!("n{i}");
    }
}

/// Member-to-node map.
pub fn assignment(b: &BoundGraph) -> BTreeMap<DataId, &HierNode> {
    b.nodes.iter().flat_map(|n| n.members.iter().map(move |d| (d.clone(), n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rcg::build_rcg;

    fn graph(spec: &[(&str, u64, &[u64])]) -> Rcg {
        let lts = spec
            .iter()
            .map(|(id, w, r)| (DataId::from(*id), Lifetime::new(*id, *w, r.to_vec()).unwrap()))
            .collect();
        build_rcg(&lts)
    }

    fn sample() -> Rcg {
        graph(&[
            ("a", 0, &[4]),
            ("c", 1, &[3]),
            ("b", 2, &[8]),
            ("e", 5, &[6]),
            ("f", 7, &[11]),
            ("d", 9, &[10]),
        ])
    }

    fn ids(g: &Rcg, m: &[usize]) -> Vec<String> {
        m.iter().map(|&i| g.vertices()[i].data_id.0.clone()).collect()
    }

    #[test]
    fn sample_chains_and_sizes() {
        let g = sample();
        let f = longest_chain(&g, StorageKind::Fifo).unwrap();
        assert_eq!(ids(&g, &f.members), ["a", "b", "f"]);
        assert_eq!(f.capacity, 2);
        assert_eq!(f.lifetime, Interval::new(0, 11));
        assert!((f.fill - 17.0 / 24.0).abs() < 1e-12);
        let l = longest_chain(&g, StorageKind::Lifo).unwrap();
        assert_eq!(ids(&g, &l.members), ["a", "c"]);
        assert_eq!(l.capacity, 2);
        assert_eq!(l.lifetime, Interval::new(0, 4));
    }

    #[test]
    fn two_member_fifo_has_depth_two() {
        let g = graph(&[("p", 0, &[3]), ("q", 1, &[5])]);
        assert_eq!(size_fifo(&[0, 1], &g), 2);
    }

    #[test]
    fn register_lifetime_is_its_own() {
        let c = Lifetime::new("c", 1, vec![3]).unwrap();
        assert_eq!(structure_lifetime(&[&c], StorageKind::Register), Interval::new(1, 3));
    }

    #[test]
    fn full_fill_cases() {
        let p = Lifetime::new("p", 0, vec![3]).unwrap();
        let q = Lifetime::new("q", 4, vec![6]).unwrap();
        assert_eq!(fill_factor(&[&p, &q], 1, Interval::new(0, 6)), 1.0);
        let r = Lifetime::new("r", 0, vec![5]).unwrap();
        let s = Lifetime::new("s", 0, vec![5]).unwrap();
        assert_eq!(fill_factor(&[&r, &s], 2, Interval::new(0, 5)), 1.0);
    }

    #[test]
    fn sample_binding() {
        let g = sample();
        let b = greedy_bind(&g, &GreedyConfig::default());
        let shape: Vec<(StorageKind, Vec<&str>, usize)> = b
            .nodes
            .iter()
            .map(|n| (n.kind, n.members.iter().map(|d| d.as_str()).collect(), n.capacity))
            .collect();
        assert_eq!(
            shape,
            vec![
                (StorageKind::Fifo, vec!["a", "b", "f"], 2),
                (StorageKind::Register, vec!["c"], 1),
                (StorageKind::Register, vec!["e"], 1),
                (StorageKind::Register, vec!["d"], 1),
            ]
        );
    }

    #[test]
    fn disabled_structures_give_registers() {
        let g = sample();
        let b = greedy_bind(&g, &GreedyConfig::registers_only());
        assert_eq!(b.nodes.len(), 6);
        assert!(b.nodes.iter().all(|n| n.kind == StorageKind::Register && n.capacity == 1));
    }

    #[test]
    fn config_validation_and_json() {
        assert_eq!(
            GreedyConfig { min_len: 1, ..GreedyConfig::default() }.validate(),
            Err(ConfigError::MinLen(1))
        );
        assert!(GreedyConfig { min_len: 0, ..GreedyConfig::registers_only() }.validate().is_ok());
        let cfg: GreedyConfig = serde_json::from_str(
            r#"{"min_len":7,"fill":0.95,"fifo":true,"lifo":true,"priority":"fifo_first"}"#,
        )
        .unwrap();
        assert_eq!(cfg.min_len, 7);
        assert_eq!(cfg.fill_threshold, 0.95);
        assert!(serde_json::from_str::<GreedyConfig>(r#"{"min_len":7}"#).is_err());
    }
}
