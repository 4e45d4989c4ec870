//! Worked examples for each stage of the flow, on the canonical six-datum
//! schedule and on the generated identity/reversal/block families.

mod common;

use common::*;
use star_core::architecture::ControlAction;
use star_core::binding::assignment;
use star_core::*;

fn lt<'a>(s: &'a std::collections::BTreeMap<DataId, Lifetime>, id: &str) -> &'a Lifetime {
    &s[&DataId::from(id)]
}

fn edge_names(g: &Rcg, tag: CompatTag) -> Vec<(String, String)> {
    g.edges()
        .iter()
        .filter(|e| e.tag == tag)
        .map(|e| (g.vertices()[e.from].data_id.0.clone(), g.vertices()[e.to].data_id.0.clone()))
        .collect()
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn sample_parses_with_expected_lifetimes() {
    let s = sample();
    assert_eq!(s.len(), 6);
    assert_eq!(s.events().len(), 12);
    let lts = compute_lifetimes(&s);
    for (id, lo, hi) in [("a", 0, 4), ("c", 1, 3), ("b", 2, 8), ("e", 5, 6), ("f", 7, 11), ("d", 9, 10)] {
        let l = lt(&lts, id);
        assert_eq!((l.tau_min, l.tau_max()), (lo, hi), "{id}");
    }
    assert_eq!(compute_lifetimes(&s), lts);
}

#[test]
fn maxlive_examples_match_sweep() {
    assert_eq!(maxlive(&sample()), 3);
    assert_eq!(resident_oracle(&sample()), 3);
    assert_eq!(maxlive(&identity(5, 3)), 3);
    assert_eq!(maxlive(&identity(1, 1)), 1);
    for s in corpora() {
        assert_eq!(maxlive(&s), resident_oracle(&s), "{:?}", s.name());
    }
}

#[test]
fn sample_graph_edges() {
    let g = build_rcg(&compute_lifetimes(&sample()));
    assert_eq!(edge_names(&g, CompatTag::Fifo), pairs(&[("a", "b"), ("c", "b"), ("b", "f")]));
    assert_eq!(edge_names(&g, CompatTag::Lifo), pairs(&[("a", "c"), ("b", "e"), ("f", "d")]));
    assert_eq!(g.count(CompatTag::Register), 9);
    assert_eq!(g.edges().len(), 15);
    let dump = g.dump();
    assert!(dump.contains("a b FIFO\n"));
    assert!(dump.contains("vertex f 7 11\n"));
}

#[test]
fn identity_and_reversal_graphs() {
    let g = build_rcg(&compute_lifetimes(&identity(4, 2)));
    for e in g.edges() {
        let expect = if e.to - e.from == 1 { CompatTag::Fifo } else { CompatTag::Register };
        assert_eq!(e.tag, expect, "{e:?}");
    }
    assert_eq!(g.edges().len(), 6);

    let g = build_rcg(&compute_lifetimes(&reversal(4)));
    assert_eq!(g.edges().len(), 6);
    assert!(g.edges().iter().all(|e| e.tag == CompatTag::Lifo));
}

#[test]
fn chains_and_sizes() {
    let g = build_rcg(&compute_lifetimes(&identity(5, 3)));
    let c = longest_chain(&g, StorageKind::Fifo).unwrap();
    assert_eq!(c.members, vec![0, 1, 2, 3, 4]);
    assert_eq!(size_fifo(&c.members, &g), 3);

    let g = build_rcg(&compute_lifetimes(&reversal(4)));
    let c = longest_chain(&g, StorageKind::Lifo).unwrap();
    assert_eq!(size_lifo(&c.members), 4);
    assert!(longest_chain(&g, StorageKind::Fifo).is_none());
}

#[test]
fn reversal_binds_one_lifo() {
    let g = build_rcg(&compute_lifetimes(&reversal(4)));
    let cfg = GreedyConfig { fifo_enabled: false, ..GreedyConfig::default() };
    let b = greedy_bind(&g, &cfg);
    assert_eq!(b.nodes.len(), 1);
    assert_eq!(b.nodes[0].kind, StorageKind::Lifo);
    assert_eq!(b.nodes[0].capacity, 4);
}

#[test]
fn sample_architecture() {
    let s = sample();
    let out = run_synthesis(&s, &GreedyConfig::default()).unwrap();
    let a = &out.architecture;
    assert_eq!(a.storages.len(), 2);
    let fifo = a.storages.iter().find(|x| x.kind == StorageKind::Fifo).unwrap();
    assert_eq!((fifo.capacity, fifo.width), (2, 8));
    let reg = a.storages.iter().find(|x| x.kind == StorageKind::Register).unwrap();
    assert_eq!((reg.capacity, reg.width), (1, 8));
    assert_eq!(a.control.len(), 12);
    assert_eq!(a.interconnect.len(), 4);

    let trace = &out.trace;
    assert!(trace.passed());
    let peaks = occupancy_bound(trace);
    assert_eq!(peaks[&fifo.id], 2);
    assert_eq!(peaks[&reg.id], 1);

    let groups = assignment(&out.optimized);
    assert_eq!(groups[&DataId::from("a")].members, groups[&DataId::from("f")].members);
}

#[test]
fn identity_architecture_keeps_order() {
    let s = identity(5, 3);
    let out = run_synthesis(&s, &GreedyConfig::default()).unwrap();
    let a = &out.architecture;
    assert_eq!(a.storages.len(), 1);
    assert_eq!(a.storages[0].kind, StorageKind::Fifo);
    assert_eq!(a.storages[0].capacity, 3);
    let pushes: Vec<&str> =
        a.control.iter().filter(|op| op.action == ControlAction::Push).map(|op| op.data.as_str()).collect();
    let pops: Vec<&str> =
        a.control.iter().filter(|op| op.action == ControlAction::Pop).map(|op| op.data.as_str()).collect();
    assert_eq!(pushes, ["d0", "d1", "d2", "d3", "d4"]);
    assert_eq!(pops, pushes);
    assert_eq!(occupancy_bound(&out.trace)[&a.storages[0].id], 3);
}

#[test]
fn capacity_mutation_overflows() {
    let s = sample();
    let mut a = run_synthesis(&s, &GreedyConfig::default()).unwrap().architecture;
    let fifo = a.storages.iter_mut().find(|x| x.kind == StorageKind::Fifo).unwrap();
    fifo.capacity = 1;
    let fid = fifo.id.clone();
    let t = simulate(&a, &s);
    assert_eq!(
        t.verdict,
        Err(SimFailure::CapacityOverflow { cycle: 2, storage: fid, data: "b".into(), capacity: 1 })
    );
}

#[test]
fn swapped_pops_break_discipline() {
    let s = sample();
    let mut a = run_synthesis(&s, &GreedyConfig::default()).unwrap().architecture;
    let pops: Vec<usize> = a
        .control
        .iter()
        .enumerate()
        .filter(|(_, op)| op.action == ControlAction::Pop)
        .map(|(i, _)| i)
        .collect();
    let (i, j) = (pops[0], pops[1]);
    let (di, dj) = (a.control[i].data.clone(), a.control[j].data.clone());
    a.control[i].data = dj;
    a.control[j].data = di;
    let t = simulate(&a, &s);
    assert!(matches!(t.verdict, Err(SimFailure::DisciplineViolation { cycle: 4, .. })), "{:?}", t.verdict);
}

#[test]
fn dropped_op_is_missing() {
    let s = sample();
    let mut a = run_synthesis(&s, &GreedyConfig::default()).unwrap().architecture;
    let k = a.control.iter().position(|op| op.data.as_str() == "e" && !op.action.is_write()).unwrap();
    a.control.remove(k);
    let t = simulate(&a, &s);
    assert_eq!(
        t.verdict,
        Err(SimFailure::MissingOp {
            cycle: 6,
            port: "out0".into(),
            data: "e".into(),
            kind: AccessKind::Read
        })
    );
}

#[test]
fn shifted_op_is_wrong_cycle() {
    let s = identity(3, 2);
    let mut a = coarse_reference(&s);
    // an extra read of d0 while it is still held, one cycle early
    let mut early =
        a.control.iter().find(|op| op.data.as_str() == "d0" && !op.action.is_write()).unwrap().clone();
    early.cycle = 1;
    a.control.push(early);
    assert_eq!(
        simulate(&a, &s).verdict,
        Err(SimFailure::WrongCycle {
            cycle: 1,
            storage: "reg0".into(),
            port: "out0".into(),
            data: "d0".into()
        })
    );
}

#[test]
fn coarse_reference_examples() {
    let s = sample();
    let a = coarse_reference(&s);
    assert_eq!(a.storages.len(), 6);
    assert_eq!(a.total_capacity(), 6);
    assert_eq!(a.ctrl(), 6);
    assert!(simulate(&a, &s).passed());
    for s in corpora() {
        let a = coarse_reference(&s);
        assert_eq!(a.total_capacity(), s.len());
        assert!(simulate(&a, &s).passed(), "{:?}", s.name());
    }
}

#[test]
fn netlist_and_rtl_for_sample() {
    let out = run_synthesis(&sample(), &GreedyConfig::default()).unwrap();
    let doc = emit_netlist(&out.architecture);
    let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(v["format"], 1);
    assert_eq!(v["storages"].as_array().unwrap().len(), 2);
    assert_eq!(v["control"].as_array().unwrap().len(), 12);
    assert_eq!(load_netlist(&doc).unwrap(), out.architecture);

    let rtl = emit_rtl(&out.architecture);
    assert_eq!(rtl.matches(": star_fifo generic map").count(), 1);
    assert!(rtl.contains("DEPTH => 2"));
    assert_eq!(rtl.matches(": star_reg generic map").count(), 1);
    let states =
        rtl.lines().filter(|l| l.trim_start().starts_with("when ") && l.trim_end().ends_with("=>")).count();
    // 12 cycle states plus the `when others` arm
    assert_eq!(states, 13);
    assert!(!rtl.contains("star_lifo"));
}

#[test]
fn registers_only_rtl_has_no_queue_templates() {
    let out = run_synthesis(&sample(), &GreedyConfig::registers_only()).unwrap();
    let rtl = emit_rtl(&out.architecture);
    assert!(!rtl.contains("star_fifo"));
    assert!(!rtl.contains("star_lifo"));
    assert_eq!(rtl, emit_rtl(&out.architecture));
}

#[test]
fn rtl_matches_golden() {
    let out = run_synthesis(&sample(), &GreedyConfig::default()).unwrap();
    let rtl = emit_rtl(&out.architecture);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/sample.vhd");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(path, &rtl).unwrap();
    }
    let golden = std::fs::read_to_string(path).unwrap();
    assert_eq!(rtl, golden);
}

#[test]
fn report_examples() {
    let fig = run_synthesis(&sample(), &GreedyConfig::default()).unwrap().report;
    assert_eq!((fig.final_capacity, fig.saved, fig.ctrl, fig.maxlive), (3, 3, 2, 3));
    assert_eq!(fig.makespan, 12);
    assert_eq!(fig.max_residency, 6);

    let rev = run_synthesis(&reversal(8), &GreedyConfig::default()).unwrap().report;
    assert_eq!((rev.ctrl, rev.final_capacity, rev.saved), (1, 8, 0));

    let id = run_synthesis(&identity(10, 3), &GreedyConfig::default()).unwrap().report;
    assert_eq!((id.ctrl, id.final_capacity, id.saved), (1, 3, 7));
}

#[test]
fn report_table_rows() {
    let s = sample();
    let cfgs = [
        GreedyConfig::default(),
        GreedyConfig { min_len: 3, ..GreedyConfig::default() },
        GreedyConfig::registers_only(),
    ];
    let reports: Vec<Report> = cfgs.iter().map(|c| run_synthesis(&s, c).unwrap().report).collect();
    let text = report_table(&reports);
    assert_eq!(text.lines().count(), 4);
    let csv = report_csv(&reports);
    let rows = star_core::pipeline::parse_report_csv(&csv).unwrap();
    assert_eq!(rows.len(), 3);
    let nofl = rows.iter().find(|r| r.config == "No F/L").unwrap();
    let merged = run_synthesis(&s, &GreedyConfig::registers_only()).unwrap();
    assert_eq!(nofl.ctrl, merged.optimized.count(StorageKind::Register));
    assert!(rows.iter().all(|r| !r.config.is_empty()));
}
