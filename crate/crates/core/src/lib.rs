//! Space-time adapter synthesis.
//!
//! Given a schedule of timestamped writes and reads over an adapter's ports,
//! this crate derives per-datum lifetimes, classifies every pair of data by
//! the storage discipline they could share (register, FIFO, LIFO), binds data
//! to FIFO/LIFO/register structures with a greedy chain search, merges
//! structures whose usage never overlaps, and emits the resulting
//! architecture as a JSON netlist and structural VHDL. Every architecture is
//! checked by a cycle-accurate simulator before it is returned.
//!
//! ```
//! use star_core::{gen_schedule, run_synthesis, GenKind, GreedyConfig};
//!
//! let s = gen_schedule(&GenKind::Identity { n: 10, latency: 3 }).unwrap();
//! let out = run_synthesis(&s, &GreedyConfig::default()).unwrap();
//! assert_eq!(out.report.final_capacity, 3);
//! assert_eq!(out.report.ctrl, 1);
//! ```

pub mod architecture;
pub mod binding;
pub mod element;
pub mod gen;
pub mod ids;
pub mod interval;
pub mod optimize;
pub mod pipeline;
pub mod rcg;
pub mod rtl;
pub mod schedule;
pub mod simulator;

pub use architecture::{
    emit_netlist, generate_architecture, load_netlist, ArchError, ControlAction, ControlOp, Link,
    NetlistError, StarArchitecture, StorageElement,
};
pub use binding::{
    fill_factor, greedy_bind, longest_chain, size_fifo, size_lifo, structure_lifetime, BoundGraph,
    CandidateStructure, ConfigError, GreedyConfig, HierNode, Priority,
};
pub use element::StorageKind;
pub use gen::{gen_schedule, GenError, GenKind};
pub use ids::{Cycle, DataId, PortId, StorageId};
pub use interval::{Interval, IntervalSet};
pub use optimize::{build_hier_rcg, merge_structures, optimize, HierRcg};
pub use pipeline::{report_csv, report_table, run_synthesis, Report, SynthError, Synthesis};
pub use rcg::{build_rcg, classify_pair, semantic_oracle, CompatTag, Rcg, RcgEdge};
pub use rtl::emit_rtl;
pub use schedule::{
    compute_lifetimes, maxlive, parse_schedule, AccessEvent, AccessKind, Datum, Direction, Lifetime, Port,
    Schedule, ScheduleError,
};
pub use simulator::{coarse_reference, occupancy_bound, simulate, SimFailure, SimTrace};
