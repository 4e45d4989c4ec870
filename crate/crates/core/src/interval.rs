//! Closed cycle intervals and sorted sets of them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ids::Cycle;

/// Closed interval `[start, end]` of cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: Cycle,
    pub end: Cycle,
}

impl Interval {
    pub fn new(start: Cycle, end: Cycle) -> Self {
        assert!(start <= end, "interval start {start} after end {end}");
        Self { start, end }
    }

    /// Two uses conflict unless one ends no later than the other starts.
    /// Sharing an endpoint is allowed: the final read of one use is serviced
    /// before the first write of the next.
    pub fn overlaps(&self, other: &Interval) -> bool {
        !(self.end <= other.start || other.end <= self.start)
    }

    pub fn len(&self) -> Cycle {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Sorted set of mutually non-overlapping intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet(Vec<Interval>);

impl IntervalSet {
    pub fn single(iv: Interval) -> Self {
        Self(vec![iv])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn start(&self) -> Cycle {
        self.0[0].start
    }

    pub fn end(&self) -> Cycle {
        self.0.iter().map(|iv| iv.end).max().expect("interval set is never empty")
    }

    /// True when no interval of `self` overlaps any interval of `other`.
    pub fn disjoint(&self, other: &IntervalSet) -> bool {
        self.0.iter().all(|a| other.0.iter().all(|b| !a.overlaps(b)))
    }

    /// Union of two disjoint sets.
    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        debug_assert!(self.disjoint(other));
        let mut v: Vec<Interval> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort();
        IntervalSet(v)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
