//! Structure merging: same-kind structures whose usage intervals never
//! overlap are folded into one time-multiplexed element.

use serde::Serialize;

use crate::binding::{number_nodes, BoundGraph, HierNode};
use crate::element::StorageKind;
use crate::interval::IntervalSet;
use crate::rcg::longest_path;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierVertex {
    pub node: String,
    pub kind: StorageKind,
    pub lifetime: IntervalSet,
}

/// Register-compatibility graph over bound structures. Vertices are ordered
/// by first use; edges join same-kind vertices with disjoint lifetimes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierRcg {
    pub vertices: Vec<HierVertex>,
    pub edges: Vec<(usize, usize)>,
}

impl HierRcg {
    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }
}

pub fn build_hier_rcg(b: &BoundGraph) -> HierRcg {
    let mut order: Vec<&HierNode> = b.nodes.iter().collect();
    order.sort_by(|x, y| (x.lifetime.start(), x.kind, &x.id).cmp(&(y.lifetime.start(), y.kind, &y.id)));
    let vertices: Vec<HierVertex> = order
        .iter()
        .map(|n| HierVertex { node: n.id.clone(), kind: n.kind, lifetime: n.lifetime.clone() })
        .collect();
    let mut edges = Vec::new();
    for (i, u) in vertices.iter().enumerate() {
        for (j, v) in vertices.iter().enumerate().skip(i + 1) {
            if u.kind == v.kind && u.lifetime.start() < v.lifetime.start() && u.lifetime.disjoint(&v.lifetime)
            {
                edges.push((i, j));
            }
        }
    }
    HierRcg { vertices, edges }
}

/// Merges register-compatible same-kind structures until no edge remains.
///
/// Each round merges the longest compatible path. Path edges only guarantee
/// that neighbours are disjoint, so members that clash with an earlier
/// member of the path are dropped from that round's merge.
pub fn merge_structures(h: &HierRcg, b: &BoundGraph) -> BoundGraph {
    let mut nodes = b.nodes.clone();
    let mut h = h.clone();
    loop {
        let path = longest_path(
            h.vertices.len(),
            |_| true,
            |u, v| h.has_edge(u, v),
            |v| {
                let id = &h.vertices[v].node;
                nodes.iter().find(|n| &n.id == id).map_or("", |n| n.members[0].as_str())
            },
        );
        let Some(path) = path else { break };

        let mut keep: Vec<usize> = Vec::new();
        for v in path {
            if keep.iter().all(|&k| h.vertices[k].lifetime.disjoint(&h.vertices[v].lifetime)) {
                keep.push(v);
            }
        }
        let ids: Vec<&String> = keep.iter().map(|&v| &h.vertices[v].node).collect();
        let (group, rest): (Vec<HierNode>, Vec<HierNode>) =
            nodes.into_iter().partition(|n| ids.contains(&&n.id));
        nodes = rest;
        nodes.push(fuse(group, b));
        number_nodes(&mut nodes);
        h = build_hier_rcg(&BoundGraph { nodes: nodes.clone(), rcg: b.rcg.clone() });
    }
    BoundGraph { nodes, rcg: b.rcg.clone() }
}

fn fuse(group: Vec<HierNode>, b: &BoundGraph) -> HierNode {
    let kind = group[0].kind;
    let capacity = group.iter().map(|n| n.capacity).max().expect("non-empty group");
    let lifetime = group[1..].iter().fold(group[0].lifetime.clone(), |acc, n| acc.union(&n.lifetime));
    let mut members: Vec<_> = group.into_iter().flat_map(|n| n.members).collect();
    members.sort_by_key(|d| {
        let v = &b.rcg.vertices()[b.rcg.index_of(d).expect("member is a vertex")];
        (v.tau_min, v.write_port.clone())
    });
    HierNode { id: String::new(), kind, members, capacity, lifetime }
}

/// Builds the structure graph and merges to a fixpoint.
pub fn optimize(b: &BoundGraph) -> BoundGraph {
    merge_structures(&build_hier_rcg(b), b)
}
