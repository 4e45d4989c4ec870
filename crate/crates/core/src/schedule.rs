//! I/O access schedules, data lifetimes and the live-data bound.
//!
//! A [`Schedule`] is the design-constraint input of the synthesis flow: the
//! adapter's ports, the data crossing it, and the cycle at which every datum
//! is written on an input port and read on an output port. Schedules are
//! always validated on construction, so every downstream stage can assume
//! one write per datum, at least one later read, and one event per port-cycle.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{Cycle, DataId, PortId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Port {
    pub id: PortId,
    pub dir: Direction,
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Datum {
    pub id: DataId,
    pub width: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessKind {
    Write,
    Read,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessEvent {
    pub data: DataId,
    pub port: PortId,
    pub cycle: Cycle,
    pub kind: AccessKind,
}

impl AccessEvent {
    pub fn write(data: impl Into<DataId>, port: impl Into<PortId>, cycle: Cycle) -> Self {
        Self { data: data.into(), port: port.into(), cycle, kind: AccessKind::Write }
    }

    pub fn read(data: impl Into<DataId>, port: impl Into<PortId>, cycle: Cycle) -> Self {
        Self { data: data.into(), port: port.into(), cycle, kind: AccessKind::Read }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schedule has no data")]
    Empty,
    #[error("duplicate port id `{0}`")]
    DuplicatePort(PortId),
    #[error("duplicate datum id `{0}`")]
    DuplicateDatum(DataId),
    #[error("port `{0}` has zero width")]
    ZeroWidthPort(PortId),
    #[error("datum `{0}` has zero width")]
    ZeroWidthDatum(DataId),
    #[error("event for datum `{data}` references unknown port `{port}`")]
    UnknownPort { data: DataId, port: PortId },
    #[error("event references unknown datum `{0}`")]
    UnknownDatum(DataId),
    #[error("{kind:?} of datum `{data}` on port `{port}` which is not an {expected:?} port")]
    WrongDirection { data: DataId, port: PortId, kind: AccessKind, expected: Direction },
    #[error("port `{port}` carries both `{first}` and `{second}` at cycle {cycle}")]
    PortConflict { port: PortId, cycle: Cycle, first: DataId, second: DataId },
    #[error("datum `{0}` is written more than once")]
    MultipleWrites(DataId),
    #[error("datum `{0}` is never written")]
    NoWrite(DataId),
    #[error("datum `{0}` is never read")]
    NoRead(DataId),
    #[error("datum `{data}` is read at cycle {read} before its write at cycle {write}")]
    ReadBeforeWrite { data: DataId, read: Cycle, write: Cycle },
    #[error("datum `{data}` is written and read in the same cycle {cycle}")]
    FlowThrough { data: DataId, cycle: Cycle },
    #[error("datum `{data}` is read twice at cycle {cycle}")]
    DuplicateRead { data: DataId, cycle: Cycle },
}

/// Serialized constraint-file layout.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    ports: Vec<Port>,
    data: Vec<Datum>,
    events: Vec<AccessEvent>,
}

/// A validated I/O access schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    name: Option<String>,
    ports: Vec<Port>,
    data: Vec<Datum>,
    events: Vec<AccessEvent>,
}

impl Schedule {
    pub fn new(
        name: Option<String>,
        ports: Vec<Port>,
        data: Vec<Datum>,
        events: Vec<AccessEvent>,
    ) -> Result<Self, ScheduleError> {
        validate(&ports, &data, &events)?;
        Ok(Self { name, ports, data, events })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn data(&self) -> &[Datum] {
        &self.data
    }

    pub fn events(&self) -> &[AccessEvent] {
        &self.events
    }

    pub fn port(&self, id: &PortId) -> Option<&Port> {
        self.ports.iter().find(|p| &p.id == id)
    }

    pub fn datum(&self, id: &DataId) -> Option<&Datum> {
        self.data.iter().find(|d| &d.id == id)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Serializes back into the constraint-file format.
    pub fn to_json(&self) -> String {
        let file = ScheduleFile {
            name: self.name.clone(),
            ports: self.ports.clone(),
            data: self.data.clone(),
            events: self.events.clone(),
        };
        serde_json::to_string_pretty(&file).expect("schedule serialization is infallible")
    }

    /// Number of cycles from the first write to the last read, inclusive.
    pub fn makespan(&self) -> Cycle {
        let first = self.events.iter().map(|e| e.cycle).min().unwrap_or(0);
        let last = self.events.iter().map(|e| e.cycle).max().unwrap_or(0);
        last - first + 1
    }
}

fn validate(ports: &[Port], data: &[Datum], events: &[AccessEvent]) -> Result<(), ScheduleError> {
    if data.is_empty() {
        return Err(ScheduleError::Empty);
    }
    let mut port_dirs = HashMap::new();
    for p in ports {
        if p.width == 0 {
            return Err(ScheduleError::ZeroWidthPort(p.id.clone()));
        }
        if port_dirs.insert(&p.id, p.dir).is_some() {
            return Err(ScheduleError::DuplicatePort(p.id.clone()));
        }
    }
    let mut known = BTreeSet::new();
    for d in data {
        if d.width == 0 {
            return Err(ScheduleError::ZeroWidthDatum(d.id.clone()));
        }
        if !known.insert(&d.id) {
            return Err(ScheduleError::DuplicateDatum(d.id.clone()));
        }
    }

    let mut busy: HashMap<(&PortId, Cycle), &DataId> = HashMap::new();
    let mut writes: HashMap<&DataId, Cycle> = HashMap::new();
    let mut reads: HashMap<&DataId, Vec<Cycle>> = HashMap::new();
    for e in events {
        if !known.contains(&e.data) {
            return Err(ScheduleError::UnknownDatum(e.data.clone()));
        }
        let dir = *port_dirs
            .get(&e.port)
            .ok_or_else(|| ScheduleError::UnknownPort { data: e.data.clone(), port: e.port.clone() })?;
        let expected = match e.kind {
            AccessKind::Write => Direction::Input,
            AccessKind::Read => Direction::Output,
        };
        if dir != expected {
            return Err(ScheduleError::WrongDirection {
                data: e.data.clone(),
                port: e.port.clone(),
                kind: e.kind,
                expected,
            });
        }
        if let Some(first) = busy.insert((&e.port, e.cycle), &e.data) {
            return Err(ScheduleError::PortConflict {
                port: e.port.clone(),
                cycle: e.cycle,
                first: first.clone(),
                second: e.data.clone(),
            });
        }
        match e.kind {
            AccessKind::Write => {
                if writes.insert(&e.data, e.cycle).is_some() {
                    return Err(ScheduleError::MultipleWrites(e.data.clone()));
                }
            }
            AccessKind::Read => reads.entry(&e.data).or_default().push(e.cycle),
        }
    }

    for d in data {
        let write = *writes.get(&d.id).ok_or_else(|| ScheduleError::NoWrite(d.id.clone()))?;
        let rs = reads.get_mut(&d.id).ok_or_else(|| ScheduleError::NoRead(d.id.clone()))?;
        rs.sort_unstable();
        for pair in rs.windows(2) {
            if pair[0] == pair[1] {
                return Err(ScheduleError::DuplicateRead { data: d.id.clone(), cycle: pair[0] });
            }
        }
        let first = rs[0];
        if first < write {
            return Err(ScheduleError::ReadBeforeWrite { data: d.id.clone(), read: first, write });
        }
        if first == write {
            return Err(ScheduleError::FlowThrough { data: d.id.clone(), cycle: write });
        }
    }
    Ok(())
}

/// Parses and validates a constraint file.
pub fn parse_schedule(text: &str) -> Result<Schedule, ScheduleError> {
    let file: ScheduleFile = serde_json::from_str(text).map_err(|e| ScheduleError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Schedule::new(file.name, file.ports, file.data, file.events)
}

/// Storage lifetime of one datum: its write cycle and its ordered read cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lifetime {
    pub data_id: DataId,
    /// Port carrying the write; breaks ties between data written in the same cycle.
    pub write_port: PortId,
    pub tau_min: Cycle,
    reads: Vec<Cycle>,
}

impl Lifetime {
    /// Returns `None` unless `reads` is non-empty, strictly increasing and after `tau_min`.
    pub fn new(data_id: impl Into<DataId>, tau_min: Cycle, reads: Vec<Cycle>) -> Option<Self> {
        Self::with_port(data_id, "in0", tau_min, reads)
    }

    pub fn with_port(
        data_id: impl Into<DataId>,
        write_port: impl Into<PortId>,
        tau_min: Cycle,
        reads: Vec<Cycle>,
    ) -> Option<Self> {
        let ok = !reads.is_empty() && reads[0] > tau_min && reads.windows(2).all(|w| w[0] < w[1]);
        ok.then(|| Self { data_id: data_id.into(), write_port: write_port.into(), tau_min, reads })
    }

    pub fn reads(&self) -> &[Cycle] {
        &self.reads
    }

    pub fn tau_first(&self) -> Cycle {
        self.reads[0]
    }

    pub fn tau_max(&self) -> Cycle {
        *self.reads.last().expect("lifetime has at least one read")
    }

    /// The `i`-th read, counting from zero.
    pub fn tau_read(&self, i: usize) -> Option<Cycle> {
        self.reads.get(i).copied()
    }

    /// Chronological order key: write cycle, then write port.
    pub fn order_key(&self) -> (Cycle, &PortId) {
        (self.tau_min, &self.write_port)
    }

    /// Whether the datum is held in storage at the end of cycle `t`.
    pub fn resident_at(&self, t: Cycle) -> bool {
        self.tau_min <= t && t < self.tau_max()
    }
}

/// Lifetime of every datum, keyed by id.
pub fn compute_lifetimes(s: &Schedule) -> BTreeMap<DataId, Lifetime> {
    let mut writes: HashMap<&DataId, (&PortId, Cycle)> = HashMap::new();
    let mut reads: HashMap<&DataId, Vec<Cycle>> = HashMap::new();
    for e in &s.events {
        match e.kind {
            AccessKind::Write => {
                writes.insert(&e.data, (&e.port, e.cycle));
            }
            AccessKind::Read => reads.entry(&e.data).or_default().push(e.cycle),
        }
    }
    s.data
        .iter()
        .map(|d| {
            let (port, w) = writes[&d.id];
            let mut rs = reads.remove(&d.id).unwrap_or_default();
            rs.sort_unstable();
            let lt = Lifetime::with_port(d.id.clone(), port.clone(), w, rs)
                .expect("validated schedule yields well-formed lifetimes");
            (d.id.clone(), lt)
        })
        .collect()
}

/// Lifetimes sorted chronologically by [`Lifetime::order_key`].
pub fn chronological(lifetimes: &BTreeMap<DataId, Lifetime>) -> Vec<Lifetime> {
    let mut v: Vec<Lifetime> = lifetimes.values().cloned().collect();
    v.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    v
}

/// Peak number of data held in storage at the end of any cycle.
///
/// A datum occupies storage from its write cycle up to, but excluding, its
/// last read cycle: reads are serviced before writes within a cycle, so the
/// slot freed by a final read can be refilled in that same cycle.
pub fn maxlive(s: &Schedule) -> usize {
    let lifetimes = compute_lifetimes(s);
    let mut deltas: Vec<(Cycle, i64)> = Vec::with_capacity(2 * lifetimes.len());
    for lt in lifetimes.values() {
        deltas.push((lt.tau_min, 1));
        deltas.push((lt.tau_max(), -1));
    }
    // Releases sort before acquisitions at equal cycles.
    deltas.sort_unstable();
    let mut live = 0i64;
    let mut peak = 0i64;
    for (_, d) in deltas {
        live += d;
        peak = peak.max(live);
    }
    peak as usize
}
