//! End-to-end synthesis and metric reporting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::architecture::{generate_architecture, ArchError, StarArchitecture};
use crate::binding::{greedy_bind, BoundGraph, ConfigError, GreedyConfig, Priority};
use crate::ids::Cycle;
use crate::optimize::{build_hier_rcg, merge_structures};
use crate::rcg::{build_rcg, Rcg};
use crate::schedule::{compute_lifetimes, maxlive, Schedule};
use crate::simulator::{simulate, SimFailure, SimTrace};

/// Metrics of one synthesized adapter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schedule: String,
    pub n_data: usize,
    /// One register per datum.
    pub reference_capacity: usize,
    pub final_capacity: usize,
    pub saved: usize,
    pub ctrl: usize,
    pub maxlive: usize,
    pub makespan: Cycle,
    pub max_residency: Cycle,
    /// Data words per cycle over the makespan.
    pub throughput: f64,
    pub config: GreedyConfig,
}

#[derive(Debug)]
pub struct Synthesis {
    pub rcg: Rcg,
    pub bound: BoundGraph,
    pub optimized: BoundGraph,
    pub architecture: StarArchitecture,
    pub trace: SimTrace,
    pub report: Report,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("architecture generation failed: {0}")]
    Architecture(#[from] ArchError),
    #[error("generated architecture failed simulation: {failure}")]
    Verification { failure: SimFailure, trace: String },
}

impl SynthError {
    /// Whether the failure is an internal bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        !matches!(self, SynthError::Config(_))
    }
}

/// Graph construction, binding, merging and architecture generation,
/// gated by a full simulation of the result.
pub fn run_synthesis(s: &Schedule, cfg: &GreedyConfig) -> Result<Synthesis, SynthError> {
    cfg.validate()?;
    let lifetimes = compute_lifetimes(s);
    let rcg = build_rcg(&lifetimes);
    let bound = greedy_bind(&rcg, cfg);
    let optimized = merge_structures(&build_hier_rcg(&bound), &bound);
    let architecture = generate_architecture(&optimized, s)?;
    let trace = simulate(&architecture, s);
    if let Err(failure) = &trace.verdict {
        return Err(SynthError::Verification { failure: failure.clone(), trace: trace.dump() });
    }

    let n = s.len();
    let final_capacity = architecture.total_capacity();
    let makespan = s.makespan();
    let report = Report {
        schedule: s.name().unwrap_or("unnamed").to_owned(),
        n_data: n,
        reference_capacity: n,
        final_capacity,
        saved: n.saturating_sub(final_capacity),
        ctrl: architecture.ctrl(),
        maxlive: maxlive(s),
        makespan,
        max_residency: lifetimes.values().map(|l| l.tau_max() - l.tau_min).max().unwrap_or(0),
        throughput: n as f64 / makespan as f64,
        config: cfg.clone(),
    };
    Ok(Synthesis { rcg, bound, optimized, architecture, trace, report })
}

/// Flat CSV row.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub schedule: String,
    pub config: String,
    pub min_len: usize,
    pub fill: f64,
    pub fifo: bool,
    pub lifo: bool,
    pub priority: String,
    pub n_data: usize,
    pub reference_capacity: usize,
    pub final_capacity: usize,
    pub saved: usize,
    pub ctrl: usize,
    pub maxlive: usize,
    pub makespan: Cycle,
    pub max_residency: Cycle,
    pub throughput: String,
}

impl From<&Report> for ReportRow {
    fn from(r: &Report) -> Self {
        Self {
            schedule: r.schedule.clone(),
            config: r.config.label(),
            min_len: r.config.min_len,
            fill: r.config.fill_threshold,
            fifo: r.config.fifo_enabled,
            lifo: r.config.lifo_enabled,
            priority: match r.config.priority {
                Priority::FifoFirst => "fifo".into(),
                Priority::LifoFirst => "lifo".into(),
            },
            n_data: r.n_data,
            reference_capacity: r.reference_capacity,
            final_capacity: r.final_capacity,
            saved: r.saved,
            ctrl: r.ctrl,
            maxlive: r.maxlive,
            makespan: r.makespan,
            max_residency: r.max_residency,
            throughput: format!("{:.4}", r.throughput),
        }
    }
}

/// Rows sorted by schedule name, then config label.
fn rows(results: &[Report]) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = results.iter().map(ReportRow::from).collect();
    rows.sort_by(|a, b| (&a.schedule, &a.config).cmp(&(&b.schedule, &b.config)));
    rows
}

pub fn report_csv(results: &[Report]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows(results) {
        w.serialize(row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

/// Aligned plain-text table, one row per (schedule, config).
pub fn report_table(results: &[Report]) -> String {
    let header = [
        "schedule",
        "config",
        "n",
        "ref",
        "cap",
        "saved",
        "ctrl",
        "maxlive",
        "makespan",
        "residency",
        "words/cycle",
    ];
    let body: Vec<[String; 11]> = rows(results)
        .into_iter()
        .map(|r| {
            [
                r.schedule,
                r.config,
                r.n_data.to_string(),
                r.reference_capacity.to_string(),
                r.final_capacity.to_string(),
                r.saved.to_string(),
                r.ctrl.to_string(),
                r.maxlive.to_string(),
                r.makespan.to_string(),
                r.max_residency.to_string(),
                r.throughput,
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        padded.join("  ").trim_end().to_owned()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for row in &body {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
