//! Cycle-accurate replay of a schedule through an architecture.
//!
//! The simulator executes the control table against behavioral storage
//! elements and checks every access against the schedule: each write and
//! read event must be served by exactly one operation at the same cycle and
//! port, FIFOs may only be read at the front, LIFOs at the top, registers
//! only for the datum they hold, and no element may exceed its capacity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::architecture::{assemble, ControlAction, ControlOp, Link, StarArchitecture};
use crate::binding::HierNode;
use crate::element::{Element, ElementFault, StorageKind};
use crate::ids::{Cycle, DataId, PortId, StorageId};
use crate::interval::{Interval, IntervalSet};
use crate::schedule::{compute_lifetimes, AccessKind, Direction, Schedule};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimFailure {
    #[error("cycle {cycle}: discipline violation on `{storage}` for `{data}`: {detail}")]
    DisciplineViolation { cycle: Cycle, storage: StorageId, data: DataId, detail: String },
    #[error("cycle {cycle}: `{storage}` overflows its {capacity} words when `{data}` arrives")]
    CapacityOverflow { cycle: Cycle, storage: StorageId, data: DataId, capacity: usize },
    #[error("cycle {cycle}: no operation serves the {kind:?} of `{data}` on `{port}`")]
    MissingOp { cycle: Cycle, port: PortId, data: DataId, kind: AccessKind },
    #[error("cycle {cycle}: operation on `{storage}` moves `{data}` via `{port}` but the schedule has no such access then")]
    WrongCycle { cycle: Cycle, storage: StorageId, port: PortId, data: DataId },
    #[error("cycle {cycle}: unknown storage `{storage}`")]
    UnknownStorage { cycle: Cycle, storage: StorageId },
    #[error("cycle {cycle}: no interconnect between `{port}` and `{storage}`")]
    Unrouted { cycle: Cycle, storage: StorageId, port: PortId },
    #[error("cycle {cycle}: second {side} access on single-port `{storage}`")]
    PortConflict { cycle: Cycle, storage: StorageId, side: &'static str },
}

impl SimFailure {
    pub fn cycle(&self) -> Cycle {
        match self {
            SimFailure::DisciplineViolation { cycle, .. }
            | SimFailure::CapacityOverflow { cycle, .. }
            | SimFailure::MissingOp { cycle, .. }
            | SimFailure::WrongCycle { cycle, .. }
            | SimFailure::UnknownStorage { cycle, .. }
            | SimFailure::Unrouted { cycle, .. }
            | SimFailure::PortConflict { cycle, .. } => *cycle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub cycle: Cycle,
    pub ops: Vec<ControlOp>,
    /// Occupancy of every storage at the end of the cycle.
    pub occupancy: Vec<(StorageId, usize)>,
    pub emitted: Vec<(PortId, DataId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTrace {
    pub cycles: Vec<CycleRecord>,
    pub peak: BTreeMap<StorageId, usize>,
    pub verdict: Result<(), SimFailure>,
}

impl SimTrace {
    pub fn passed(&self) -> bool {
        self.verdict.is_ok()
    }

    /// `cycle | op | storage | datum | occupancy...` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for rec in &self.cycles {
            let occ: Vec<String> = rec.occupancy.iter().map(|(s, n)| format!("{s}={n}")).collect();
            for op in &rec.ops {
                let _ = writeln!(
                    out,
                    "{} | {} | {} | {} | {}",
                    rec.cycle,
                    op.action.as_str(),
                    op.storage,
                    op.data,
                    occ.join(" ")
                );
            }
        }
        match &self.verdict {
            Ok(()) => out.push_str("PASS\n"),
            Err(f) => {
                let _ = writeln!(out, "FAIL {f}");
            }
        }
        out
    }
}

/// Per-storage peak occupancy.
pub fn occupancy_bound(trace: &SimTrace) -> BTreeMap<StorageId, usize> {
    trace.peak.clone()
}

pub fn simulate(a: &StarArchitecture, s: &Schedule) -> SimTrace {
    let mut sim = Sim::new(a, s);
    let verdict = sim.run();
    SimTrace { cycles: sim.records, peak: sim.peak, verdict }
}

struct Sim<'a> {
    arch: &'a StarArchitecture,
    elements: BTreeMap<&'a StorageId, Element>,
    links: BTreeSet<&'a Link>,
    last_read: HashMap<&'a DataId, Cycle>,
    // (cycle, port, data, kind) -> served
    expected: BTreeMap<(Cycle, &'a PortId, &'a DataId, AccessKind), bool>,
    records: Vec<CycleRecord>,
    peak: BTreeMap<StorageId, usize>,
}

impl<'a> Sim<'a> {
    fn new(arch: &'a StarArchitecture, s: &'a Schedule) -> Self {
        let elements = arch.storages.iter().map(|st| (&st.id, Element::new(st.kind, st.capacity))).collect();
        let peak = arch.storages.iter().map(|st| (st.id.clone(), 0)).collect();
        let last_read = s.events().iter().filter(|e| e.kind == AccessKind::Read).fold(
            HashMap::new(),
            |mut m: HashMap<&DataId, Cycle>, e| {
                let c = m.entry(&e.data).or_insert(e.cycle);
                *c = (*c).max(e.cycle);
                m
            },
        );
        let expected = s.events().iter().map(|e| ((e.cycle, &e.port, &e.data, e.kind), false)).collect();
        Self {
            arch,
            elements,
            links: arch.interconnect.iter().collect(),
            last_read,
            expected,
            records: Vec::new(),
            peak,
        }
    }

    fn run(&mut self) -> Result<(), SimFailure> {
        let mut ops: Vec<&'a ControlOp> = self.arch.control.iter().collect();
        ops.sort_by(|x, y| x.order_key().cmp(&y.order_key()));
        let mut cycles: BTreeSet<Cycle> = ops.iter().map(|op| op.cycle).collect();
        cycles.extend(self.expected.keys().map(|k| k.0));

        let mut next = 0;
        for cycle in cycles {
            let start = next;
            while next < ops.len() && ops[next].cycle == cycle {
                next += 1;
            }
            let mut rec = CycleRecord { cycle, ops: Vec::new(), occupancy: Vec::new(), emitted: Vec::new() };
            let result = self.step(cycle, &ops[start..next], &mut rec);
            rec.occupancy = self.elements.iter().map(|(id, el)| ((*id).clone(), el.occupancy())).collect();
            self.records.push(rec);
            result?;
            self.check_served(cycle)?;
        }
        Ok(())
    }

    fn step(&mut self, cycle: Cycle, ops: &[&'a ControlOp], rec: &mut CycleRecord) -> Result<(), SimFailure> {
        let mut busy: BTreeSet<(&StorageId, bool)> = BTreeSet::new();
        for &op in ops {
            rec.ops.push(op.clone());
            let storage = &op.storage;
            let Some(el) = self.elements.get_mut(storage) else {
                return Err(SimFailure::UnknownStorage { cycle, storage: storage.clone() });
            };
            let write = op.action.is_write();
            if !busy.insert((storage, write)) {
                let side = if write { "write" } else { "read" };
                return Err(SimFailure::PortConflict { cycle, storage: storage.clone(), side });
            }
            let dir = if write { Direction::Input } else { Direction::Output };
            let link = Link { dir, port: op.port.clone(), storage: storage.clone() };
            if !self.links.contains(&link) {
                return Err(SimFailure::Unrouted { cycle, storage: storage.clone(), port: op.port.clone() });
            }
            let discipline = |detail: String| SimFailure::DisciplineViolation {
                cycle,
                storage: storage.clone(),
                data: op.data.clone(),
                detail,
            };
            let allowed = match op.action {
                ControlAction::Push | ControlAction::Pop => el.kind() != StorageKind::Register,
                ControlAction::ReadFront => el.kind() == StorageKind::Fifo,
                ControlAction::ReadTop => el.kind() == StorageKind::Lifo,
                ControlAction::Load | ControlAction::ReadReg => el.kind() == StorageKind::Register,
            };
            if !allowed {
                return Err(discipline(format!("{} on a {:?}", op.action.as_str(), el.kind())));
            }
            let res = match op.action {
                ControlAction::Push | ControlAction::Load => el.write(&op.data),
                ControlAction::ReadFront | ControlAction::ReadTop => el.peek(&op.data),
                ControlAction::Pop => el.take(&op.data),
                ControlAction::ReadReg => {
                    if self.last_read.get(&op.data) == Some(&cycle) {
                        el.take(&op.data)
                    } else {
                        el.peek(&op.data)
                    }
                }
            };
            match res {
                Ok(()) => {}
                Err(ElementFault::Overflow { capacity }) => {
                    return Err(SimFailure::CapacityOverflow {
                        cycle,
                        storage: storage.clone(),
                        data: op.data.clone(),
                        capacity,
                    })
                }
                Err(f) => return Err(discipline(f.to_string())),
            }
            let kind = if write { AccessKind::Write } else { AccessKind::Read };
            match self.expected.get_mut(&(cycle, &op.port, &op.data, kind)) {
                Some(served @ false) => *served = true,
                _ => {
                    return Err(SimFailure::WrongCycle {
                        cycle,
                        storage: storage.clone(),
                        port: op.port.clone(),
                        data: op.data.clone(),
                    })
                }
            }

            let occ = el.occupancy();
            let p = self.peak.entry(storage.clone()).or_default();
            *p = (*p).max(occ);
            if !write {
                rec.emitted.push((op.port.clone(), op.data.clone()));
            }
        }
        Ok(())
    }

    fn check_served(&self, cycle: Cycle) -> Result<(), SimFailure> {
        let (port0, data0) = (PortId(String::new()), DataId(String::new()));
        let lo = self.expected.range((cycle, &port0, &data0, AccessKind::Write)..);
        for (&(c, port, data, kind), &served) in lo {
            if c != cycle {
                break;
            }
            if !served {
                return Err(SimFailure::MissingOp { cycle, port: port.clone(), data: data.clone(), kind });
            }
        }
        Ok(())
    }
}

/// Coarse-grain adapter: one register per datum.
pub fn coarse_reference(s: &Schedule) -> StarArchitecture {
    let lifetimes = compute_lifetimes(s);
    let nodes: Vec<HierNode> = s
        .data()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let lt = &lifetimes[&d.id];
            HierNode {
                id: format!("n{i}"),
                kind: StorageKind::Register,
                members: vec![d.id.clone()],
                capacity: 1,
                lifetime: IntervalSet::single(Interval::new(lt.tau_min, lt.tau_max())),
            }
        })
        .collect();
    assemble(s, &nodes).expect("one register per datum never collides")
}
