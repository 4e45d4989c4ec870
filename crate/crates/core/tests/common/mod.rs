#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use star_core::{gen_schedule, parse_schedule, AccessEvent, Datum, Direction, GenKind, Port, Schedule};

pub const SAMPLE: &str = include_str!("../data/sample.json");

pub fn sample() -> Schedule {
    parse_schedule(SAMPLE).expect("fixture parses")
}

pub fn identity(n: usize, latency: u64) -> Schedule {
    gen_schedule(&GenKind::Identity { n, latency }).unwrap()
}

pub fn reversal(n: usize) -> Schedule {
    gen_schedule(&GenKind::Reversal { n }).unwrap()
}

pub fn block(rows: usize, cols: usize) -> Schedule {
    gen_schedule(&GenKind::Block { rows, cols, offset: None }).unwrap()
}

pub fn random_perm(n: usize, seed: u64) -> Schedule {
    gen_schedule(&GenKind::Random { n, seed, offset: None }).unwrap()
}

/// Random schedule over several ports with up to `max_reads` reads per
/// datum. Every port carries at most one datum per cycle.
pub fn random_general(seed: u64, n: usize, ports: usize, max_reads: usize) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = (n as u64 * 2).max(4);
    let ins: Vec<String> = (0..ports).map(|i| format!("in{i}")).collect();
    let outs: Vec<String> = (0..ports).map(|i| format!("out{i}")).collect();
    let mut busy = std::collections::HashSet::new();
    let mut events = Vec::new();
    for d in 0..n {
        let id = format!("d{d}");
        let (w, wp) = loop {
            let c = rng.gen_range(0..horizon);
            let p = &ins[rng.gen_range(0..ports)];
            if busy.insert((p.clone(), c)) {
                break (c, p.clone());
            }
        };
        events.push(AccessEvent::write(id.as_str(), wp.as_str(), w));
        let reads = rng.gen_range(1..=max_reads);
        let mut placed = std::collections::BTreeSet::new();
        let mut window = horizon;
        while placed.len() < reads {
            window += 1;
            let c = w + rng.gen_range(1..=window);
            if placed.contains(&c) {
                continue;
            }
            let p = &outs[rng.gen_range(0..ports)];
            if busy.insert((p.clone(), c)) {
                placed.insert(c);
                events.push(AccessEvent::read(id.as_str(), p.as_str(), c));
            }
        }
    }
    let mut port_list: Vec<Port> =
        ins.iter().map(|p| Port { id: p.as_str().into(), dir: Direction::Input, width: 8 }).collect();
    port_list.extend(outs.iter().map(|p| Port { id: p.as_str().into(), dir: Direction::Output, width: 8 }));
    Schedule::new(
        Some(format!("general_s{seed}")),
        port_list,
        (0..n).map(|d| Datum { id: format!("d{d}").into(), width: 4 + (d % 5) as u32 }).collect(),
        events,
    )
    .expect("generator respects schedule invariants")
}

/// identity L in 1..=6, block up to 8x8, random permutations n <= 30 over 200 seeds.
pub fn corpora() -> Vec<Schedule> {
    let mut v = Vec::new();
    for latency in 1..=6 {
        for n in [1, 5, 12] {
            v.push(identity(n, latency));
        }
    }
    for rows in 1..=8 {
        for cols in 1..=8 {
            v.push(block(rows, cols));
        }
    }
    for seed in 0..200u64 {
        v.push(random_perm(2 + (seed as usize % 29), seed));
    }
    for n in 1..=8 {
        v.push(reversal(n));
    }
    v.push(sample());
    v
}

/// Cycles at whose end the datum is still stored.
pub fn resident_oracle(s: &Schedule) -> usize {
    let lts = star_core::compute_lifetimes(s);
    let end = lts.values().map(|l| l.tau_max()).max().unwrap();
    (0..=end).map(|t| lts.values().filter(|l| l.tau_min <= t && t < l.tau_max()).count()).max().unwrap()
}
