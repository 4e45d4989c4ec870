//! Deterministic schedule generators for test corpora.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ids::Cycle;
use crate::schedule::{AccessEvent, Datum, Direction, Port, Schedule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// `d_i` written at `i`, read at `i + latency`.
    Identity { n: usize, latency: Cycle },
    /// Written in order, read in reverse order from cycle `n`.
    Reversal { n: usize },
    /// Row-major writes, column-major reads; `offset` defaults to the earliest legal start.
    Block { rows: usize, cols: usize, offset: Option<Cycle> },
    /// Written in order, read in a seeded random order starting at `offset`
    /// (default: the earliest legal start for the drawn order).
    Random { n: usize, seed: u64, offset: Option<Cycle> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("schedule needs at least one datum")]
    Empty,
    #[error("latency must be at least 1")]
    Latency,
    #[error("read offset {offset} would read `d{data}` before it is written (minimum offset {min})")]
    Offset { offset: Cycle, data: usize, min: Cycle },
}

pub const DATA_WIDTH: u32 = 8;

fn assemble(name: String, write_order: &[usize], read_order: &[usize], read_start: Cycle) -> Schedule {
    let n = write_order.len();
    let id = |i: usize| format!("d{i}");
    let mut events = Vec::with_capacity(2 * n);
    for (t, &d) in write_order.iter().enumerate() {
        events.push(AccessEvent::write(id(d).as_str(), "in0", t as Cycle));
    }
    for (k, &d) in read_order.iter().enumerate() {
        events.push(AccessEvent::read(id(d).as_str(), "out0", read_start + k as Cycle));
    }
    Schedule::new(
        Some(name),
        vec![
            Port { id: "in0".into(), dir: Direction::Input, width: DATA_WIDTH },
            Port { id: "out0".into(), dir: Direction::Output, width: DATA_WIDTH },
        ],
        (0..n).map(|i| Datum { id: id(i).into(), width: DATA_WIDTH }).collect(),
        events,
    )
    .expect("generated schedules are valid")
}

/// Earliest read start such that the k-th read of `read_order` follows the
/// write of its datum (datum `i` written at cycle `i`).
fn min_offset(read_order: &[usize]) -> Cycle {
    read_order.iter().enumerate().map(|(k, &d)| (d as i64 - k as i64 + 1).max(1) as Cycle).max().unwrap_or(1)
}

fn permuted(name: String, read_order: Vec<usize>, offset: Option<Cycle>) -> Result<Schedule, GenError> {
    let min = min_offset(&read_order);
    let offset = offset.unwrap_or(min);
    if let Some((_, &d)) = read_order.iter().enumerate().find(|&(k, &d)| offset + k as Cycle <= d as Cycle) {
        return Err(GenError::Offset { offset, data: d, min });
    }
    let writes: Vec<usize> = (0..read_order.len()).collect();
    Ok(assemble(name, &writes, &read_order, offset))
}

pub fn gen_schedule(kind: &GenKind) -> Result<Schedule, GenError> {
    match *kind {
        GenKind::Identity { n, latency } => {
            if n == 0 {
                return Err(GenError::Empty);
            }
            if latency < 1 {
                return Err(GenError::Latency);
            }
            let order: Vec<usize> = (0..n).collect();
            Ok(assemble(format!("identity_n{n}_l{latency}"), &order, &order, latency))
        }
        GenKind::Reversal { n } => {
            if n == 0 {
                return Err(GenError::Empty);
            }
            let writes: Vec<usize> = (0..n).collect();
            let reads: Vec<usize> = (0..n).rev().collect();
            Ok(assemble(format!("reversal_n{n}"), &writes, &reads, n as Cycle))
        }
        GenKind::Block { rows, cols, offset } => {
            if rows == 0 || cols == 0 {
                return Err(GenError::Empty);
            }
            let reads = (0..cols).flat_map(|c| (0..rows).map(move |r| r * cols + c)).collect();
            permuted(format!("block_{rows}x{cols}"), reads, offset)
        }
        GenKind::Random { n, seed, offset } => {
            if n == 0 {
                return Err(GenError::Empty);
            }
            let mut reads: Vec<usize> = (0..n).collect();
            reads.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            permuted(format!("random_n{n}_s{seed}"), reads, offset)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::AccessKind;

    fn reads(s: &Schedule) -> Vec<(String, Cycle)> {
        s.events()
            .iter()
            .filter(|e| e.kind == AccessKind::Read)
            .map(|e| (e.data.0.clone(), e.cycle))
            .collect()
    }

    #[test]
    fn identity_and_reversal() {
        let s = gen_schedule(&GenKind::Identity { n: 3, latency: 1 }).unwrap();
        assert_eq!(reads(&s), [("d0".into(), 1), ("d1".into(), 2), ("d2".into(), 3)]);
        let s = gen_schedule(&GenKind::Reversal { n: 3 }).unwrap();
        assert_eq!(reads(&s), [("d2".into(), 3), ("d1".into(), 4), ("d0".into(), 5)]);
    }

    #[test]
    fn block_reads_column_major() {
        let s = gen_schedule(&GenKind::Block { rows: 2, cols: 3, offset: Some(6) }).unwrap();
        let order: Vec<_> = reads(&s);
        let expect: Vec<(String, Cycle)> =
            ["d0", "d3", "d1", "d4", "d2", "d5"].iter().zip(6..).map(|(d, c)| (d.to_string(), c)).collect();
        assert_eq!(order, expect);
        // earliest legal start is (R-1)(C-1)+1
        assert!(gen_schedule(&GenKind::Block { rows: 2, cols: 3, offset: Some(3) }).is_ok());
        assert_eq!(
            gen_schedule(&GenKind::Block { rows: 2, cols: 3, offset: Some(2) }),
            Err(GenError::Offset { offset: 2, data: 3, min: 3 })
        );
    }

    #[test]
    fn bad_params() {
        assert_eq!(gen_schedule(&GenKind::Identity { n: 3, latency: 0 }), Err(GenError::Latency));
        assert_eq!(gen_schedule(&GenKind::Reversal { n: 0 }), Err(GenError::Empty));
    }

    #[test]
    fn random_is_seeded() {
        let a = gen_schedule(&GenKind::Random { n: 20, seed: 7, offset: None }).unwrap();
        let b = gen_schedule(&GenKind::Random { n: 20, seed: 7, offset: None }).unwrap();
        let c = gen_schedule(&GenKind::Random { n: 20, seed: 8, offset: None }).unwrap();
        assert_eq!(a, b);
        assert_ne!(reads(&a), reads(&c));
    }
}
