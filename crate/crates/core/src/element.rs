//! Behavioral model of the storage element library (FIFO, LIFO, register).
//!
//! Used by the full-system simulator and by the per-node replays that check
//! whether a group of data can legally share one element.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{Cycle, DataId};
use crate::schedule::Lifetime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageKind {
    Fifo,
    Lifo,
    Register,
}

impl StorageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StorageKind::Fifo => "fifo",
            StorageKind::Lifo => "lifo",
            StorageKind::Register => "reg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ElementFault {
    #[error("element full ({capacity} words)")]
    Overflow { capacity: usize },
    #[error("`{wanted}` requested but element is empty")]
    Empty { wanted: DataId },
    #[error("`{wanted}` requested but `{found}` is at the access point")]
    WrongDatum { wanted: DataId, found: DataId },
}

/// One storage element instance holding data ids.
#[derive(Clone, Debug)]
pub struct Element {
    kind: StorageKind,
    capacity: usize,
    // Fifo: front is index 0. Lifo: top is the back.
    slots: VecDeque<DataId>,
}

impl Element {
    pub fn new(kind: StorageKind, capacity: usize) -> Self {
        Self { kind, capacity, slots: VecDeque::with_capacity(capacity) }
    }

    pub fn kind(&self) -> StorageKind {
        self.kind
    }

    pub fn occupancy(&self) -> usize {
        self.slots.len()
    }

    pub fn contents(&self) -> impl Iterator<Item = &DataId> {
        self.slots.iter()
    }

    pub fn write(&mut self, d: &DataId) -> Result<(), ElementFault> {
        if self.slots.len() >= self.capacity {
            return Err(ElementFault::Overflow { capacity: self.capacity });
        }
        self.slots.push_back(d.clone());
        Ok(())
    }

    fn locate(&self, d: &DataId) -> Result<usize, ElementFault> {
        let access = match self.kind {
            StorageKind::Fifo => Some(0),
            StorageKind::Lifo => self.slots.len().checked_sub(1),
            // Registers are individually addressed.
            StorageKind::Register => {
                return self.slots.iter().position(|x| x == d).ok_or_else(|| match self.slots.front() {
                    None => ElementFault::Empty { wanted: d.clone() },
                    Some(found) => ElementFault::WrongDatum { wanted: d.clone(), found: found.clone() },
                })
            }
        };
        match access.and_then(|i| self.slots.get(i).map(|x| (i, x))) {
            None => Err(ElementFault::Empty { wanted: d.clone() }),
            Some((i, x)) if x == d => Ok(i),
            Some((_, x)) => Err(ElementFault::WrongDatum { wanted: d.clone(), found: x.clone() }),
        }
    }

    /// Non-destructive read at the access point.
    pub fn peek(&self, d: &DataId) -> Result<(), ElementFault> {
        self.locate(d).map(|_| ())
    }

    /// Destructive read (pop, or final register read).
    pub fn take(&mut self, d: &DataId) -> Result<(), ElementFault> {
        let i = self.locate(d)?;
        self.slots.remove(i);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayFault {
    #[error("cycle {cycle}, datum `{data}`: {fault}")]
    Access { cycle: Cycle, data: DataId, fault: ElementFault },
    #[error("cycle {cycle}: second {side} access by `{data}` on a single-port element")]
    PortBusy { cycle: Cycle, data: DataId, side: &'static str },
}

impl ReplayFault {
    pub fn data(&self) -> &DataId {
        match self {
            ReplayFault::Access { data, .. } | ReplayFault::PortBusy { data, .. } => data,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    Peek,
    Take,
    Write,
}

/// Replays the accesses of `members` through one element of `kind` and
/// `capacity`: write at the write cycle, non-destructive access at each
/// intermediate read, removal at the last read. Reads are serviced before
/// writes within a cycle; each cycle allows one read-side and one write-side
/// access. Returns the peak occupancy.
pub fn replay(kind: StorageKind, capacity: usize, members: &[&Lifetime]) -> Result<usize, ReplayFault> {
    let mut ops: Vec<(Cycle, Phase, &DataId)> = Vec::new();
    for lt in members {
        ops.push((lt.tau_min, Phase::Write, &lt.data_id));
        let (last, rest) = lt.reads().split_last().expect("non-empty reads");
        ops.extend(rest.iter().map(|&r| (r, Phase::Peek, &lt.data_id)));
        ops.push((*last, Phase::Take, &lt.data_id));
    }
    ops.sort_by_key(|op| (op.0, op.1 == Phase::Write));

    let mut el = Element::new(kind, capacity);
    let mut peak = 0;
    let mut last_read: Option<Cycle> = None;
    let mut last_write: Option<Cycle> = None;
    for (cycle, phase, data) in ops {
        let (slot, side) = match phase {
            Phase::Write => (&mut last_write, "write"),
            _ => (&mut last_read, "read"),
        };
        if *slot == Some(cycle) {
            return Err(ReplayFault::PortBusy { cycle, data: data.clone(), side });
        }
        *slot = Some(cycle);
        let res = match phase {
            Phase::Peek => el.peek(data),
            Phase::Take => el.take(data),
            Phase::Write => el.write(data),
        };
        res.map_err(|fault| ReplayFault::Access { cycle, data: data.clone(), fault })?;
        peak = peak.max(el.occupancy());
    }
    Ok(peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lt(id: &str, w: Cycle, reads: &[Cycle]) -> Lifetime {
        Lifetime::new(id, w, reads.to_vec()).unwrap()
    }

    #[test]
    fn fifo_and_lifo_disciplines() {
        let a = lt("a", 0, &[4]);
        let c = lt("c", 1, &[3]);
        let b = lt("b", 2, &[8]);
        assert_eq!(replay(StorageKind::Fifo, 2, &[&a, &b]), Ok(2));
        assert!(replay(StorageKind::Fifo, 2, &[&a, &c]).is_err());
        assert_eq!(replay(StorageKind::Lifo, 2, &[&a, &c]), Ok(2));
        assert!(matches!(
            replay(StorageKind::Fifo, 1, &[&a, &b]),
            Err(ReplayFault::Access { cycle: 2, fault: ElementFault::Overflow { .. }, .. })
        ));
    }

    #[test]
    fn register_handoff_in_one_cycle() {
        let a = lt("a", 0, &[4]);
        let e = lt("e", 4, &[6]);
        assert_eq!(replay(StorageKind::Register, 1, &[&a, &e]), Ok(1));
    }

    #[test]
    fn intermediate_reads_are_non_destructive() {
        let a = lt("a", 0, &[3, 10]);
        let b = lt("b", 5, &[7]);
        assert_eq!(replay(StorageKind::Lifo, 2, &[&a, &b]), Ok(2));
        // b must leave at 7 while a still sits at the front of the queue
        assert_eq!(replay(StorageKind::Fifo, 2, &[&a, &b]).map_err(|f| f.data().clone()), Err("b".into()));
    }
}
