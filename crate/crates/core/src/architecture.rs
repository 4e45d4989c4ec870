//! STAR architecture: storage elements, port/storage interconnect and the
//! cycle-indexed control table, plus its JSON netlist form.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binding::{BoundGraph, HierNode};
use crate::element::StorageKind;
use crate::ids::{Cycle, DataId, PortId, StorageId};
use crate::schedule::{compute_lifetimes, AccessKind, Direction, Port, Schedule};

pub const NETLIST_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageElement {
    pub id: StorageId,
    pub kind: StorageKind,
    pub capacity: usize,
    pub width: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlAction {
    Push,
    Pop,
    Load,
    ReadFront,
    ReadTop,
    ReadReg,
}

impl ControlAction {
    /// Write-side actions execute after all read-side actions of a cycle.
    pub fn is_write(self) -> bool {
        matches!(self, ControlAction::Push | ControlAction::Load)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ControlAction::Push => "push",
            ControlAction::Pop => "pop",
            ControlAction::Load => "load",
            ControlAction::ReadFront => "read_front",
            ControlAction::ReadTop => "read_top",
            ControlAction::ReadReg => "read_reg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlOp {
    pub cycle: Cycle,
    pub action: ControlAction,
    pub storage: StorageId,
    pub port: PortId,
    pub data: DataId,
}

impl ControlOp {
    /// Sort key: cycle, read side before write side, then storage and port.
    pub fn order_key(&self) -> (Cycle, bool, &StorageId, &PortId, &DataId) {
        (self.cycle, self.action.is_write(), &self.storage, &self.port, &self.data)
    }
}

/// A port-storage connection. Input links carry data port→storage, output
/// links storage→port.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub dir: Direction,
    pub port: PortId,
    pub storage: StorageId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarArchitecture {
    pub name: Option<String>,
    pub ports: Vec<Port>,
    pub storages: Vec<StorageElement>,
    pub interconnect: Vec<Link>,
    pub binding: BTreeMap<DataId, StorageId>,
    pub control: Vec<ControlOp>,
}

impl StarArchitecture {
    pub fn total_capacity(&self) -> usize {
        self.storages.iter().map(|s| s.capacity).sum()
    }

    /// Number of structures the controller manages.
    pub fn ctrl(&self) -> usize {
        self.storages.len()
    }

    pub fn storage(&self, id: &StorageId) -> Option<&StorageElement> {
        self.storages.iter().find(|s| &s.id == id)
    }

    pub fn count(&self, kind: StorageKind) -> usize {
        self.storages.iter().filter(|s| s.kind == kind).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArchError {
    #[error("datum `{0}` is not bound to any storage")]
    Unbound(DataId),
    #[error("storage `{storage}` has two {side} accesses at cycle {cycle}")]
    PortCollision { cycle: Cycle, storage: StorageId, side: &'static str },
}

pub fn generate_architecture(b: &BoundGraph, s: &Schedule) -> Result<StarArchitecture, ArchError> {
    assemble(s, &b.nodes)
}

pub(crate) fn assemble(s: &Schedule, nodes: &[HierNode]) -> Result<StarArchitecture, ArchError> {
    let mut counters: HashMap<StorageKind, usize> = HashMap::new();
    let mut storages = Vec::with_capacity(nodes.len());
    let mut binding = BTreeMap::new();
    for node in nodes {
        let k = counters.entry(node.kind).or_default();
        let id = StorageId(format!("{}{}", node.kind.as_str(), k));
        *k += 1;
        let width = node.members.iter().filter_map(|d| s.datum(d)).map(|d| d.width).max().unwrap_or(1);
        for d in &node.members {
            binding.insert(d.clone(), id.clone());
        }
        storages.push(StorageElement { id, kind: node.kind, capacity: node.capacity, width });
    }
    let kinds: HashMap<&StorageId, StorageKind> = storages.iter().map(|st| (&st.id, st.kind)).collect();
    let lifetimes = compute_lifetimes(s);

    let mut control = Vec::with_capacity(s.events().len());
    let mut links = BTreeSet::new();
    for e in s.events() {
        let storage = binding.get(&e.data).ok_or_else(|| ArchError::Unbound(e.data.clone()))?;
        let kind = kinds[storage];
        let action = match e.kind {
            AccessKind::Write => match kind {
                StorageKind::Register => ControlAction::Load,
                _ => ControlAction::Push,
            },
            AccessKind::Read => {
                let last = lifetimes[&e.data].tau_max() == e.cycle;
                match (kind, last) {
                    (StorageKind::Register, _) => ControlAction::ReadReg,
                    (_, true) => ControlAction::Pop,
                    (StorageKind::Fifo, false) => ControlAction::ReadFront,
                    (StorageKind::Lifo, false) => ControlAction::ReadTop,
                }
            }
        };
        let dir = match e.kind {
            AccessKind::Write => Direction::Input,
            AccessKind::Read => Direction::Output,
        };
        links.insert(Link { dir, port: e.port.clone(), storage: storage.clone() });
        control.push(ControlOp {
            cycle: e.cycle,
            action,
            storage: storage.clone(),
            port: e.port.clone(),
            data: e.data.clone(),
        });
    }
    control.sort_by(|x, y| x.order_key().cmp(&y.order_key()));

    let mut seen = BTreeSet::new();
    for op in &control {
        let side = if op.action.is_write() { "write" } else { "read" };
        if !seen.insert((op.cycle, &op.storage, side)) {
            return Err(ArchError::PortCollision { cycle: op.cycle, storage: op.storage.clone(), side });
        }
    }

    Ok(StarArchitecture {
        name: s.name().map(str::to_owned),
        ports: s.ports().to_vec(),
        storages,
        interconnect: links.into_iter().collect(),
        binding,
        control,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetlistDoc {
    format: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    ports: Vec<Port>,
    storages: Vec<StorageElement>,
    interconnect: Vec<Link>,
    binding: BTreeMap<DataId, StorageId>,
    control: Vec<ControlOp>,
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("malformed netlist: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported netlist format {0}, expected {NETLIST_FORMAT}")]
    Format(u32),
    #[error("netlist references unknown storage `{0}`")]
    UnknownStorage(StorageId),
    #[error("duplicate storage id `{0}`")]
    DuplicateStorage(StorageId),
}

/// Canonical JSON netlist; key order is fixed by the document layout.
pub fn emit_netlist(a: &StarArchitecture) -> String {
    let doc = NetlistDoc {
        format: NETLIST_FORMAT,
        name: a.name.clone(),
        ports: a.ports.clone(),
        storages: a.storages.clone(),
        interconnect: a.interconnect.clone(),
        binding: a.binding.clone(),
        control: a.control.clone(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("netlist serialization is infallible");
    out.push('\n');
    out
}

pub fn load_netlist(text: &str) -> Result<StarArchitecture, NetlistError> {
    let doc: NetlistDoc = serde_json::from_str(text)?;
    if doc.format != NETLIST_FORMAT {
        return Err(NetlistError::Format(doc.format));
    }
    let mut ids = BTreeSet::new();
    for st in &doc.storages {
        if !ids.insert(&st.id) {
            return Err(NetlistError::DuplicateStorage(st.id.clone()));
        }
    }
    let referenced = doc
        .binding
        .values()
        .chain(doc.interconnect.iter().map(|l| &l.storage))
        .chain(doc.control.iter().map(|op| &op.storage));
    for st in referenced {
        if !ids.contains(st) {
            return Err(NetlistError::UnknownStorage(st.clone()));
        }
    }
    Ok(StarArchitecture {
        name: doc.name,
        ports: doc.ports,
        storages: doc.storages,
        interconnect: doc.interconnect,
        binding: doc.binding,
        control: doc.control,
    })
}
