//! Shared test fixtures: an independent reference simulator and random
//! generators.
#![allow(dead_code)]

use magicpool::{Capacity, Gate, GateKind, GateList, Schedule};
use proptest::prelude::*;

/// Distillery phase as seen between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Steps already spent on the current distillation.
    Working(u32),
    Stopped,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    /// At least one state was popped this step.
    Popped,
    /// One step of work elapsed and nothing completed.
    Tick,
    /// A distillation completed; the flags describe the pool afterwards.
    Deposit { full: bool, last: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Nothing,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum From {
    Working,
    Stopped,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum To {
    Same,
    Advance,
    Fresh,
    Stopped,
    Done,
}

/// (phase, signal, next phase, emitted switch). Every reachable pair is
/// listed; anything else is a bug in the driver.
const TABLE: &[(From, Signal, To, Emit)] = &[
    (From::Stopped, Signal::Popped, To::Fresh, Emit::On),
    (From::Working, Signal::Popped, To::Same, Emit::Nothing),
    (From::Done, Signal::Popped, To::Same, Emit::Nothing),
    (From::Working, Signal::Tick, To::Advance, Emit::Nothing),
    (From::Working, Signal::Deposit { full: false, last: false }, To::Fresh, Emit::Nothing),
    (From::Working, Signal::Deposit { full: true, last: false }, To::Stopped, Emit::Off),
    (From::Working, Signal::Deposit { full: false, last: true }, To::Done, Emit::Off),
    (From::Working, Signal::Deposit { full: true, last: true }, To::Done, Emit::Off),
];

pub fn transition(phase: Phase, signal: Signal) -> (Phase, Emit) {
    let from = match phase {
        Phase::Working(_) => From::Working,
        Phase::Stopped => From::Stopped,
        Phase::Done => From::Done,
    };
    let &(_, _, to, emit) = TABLE
        .iter()
        .find(|(f, s, _, _)| *f == from && *s == signal)
        .unwrap_or_else(|| panic!("no transition for {phase:?} on {signal:?}"));
    let next = match to {
        To::Same => phase,
        To::Advance => match phase {
            Phase::Working(p) => Phase::Working(p + 1),
            other => other,
        },
        To::Fresh => Phase::Working(0),
        To::Stopped => Phase::Stopped,
        To::Done => Phase::Done,
    };
    (next, emit)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefRow {
    pub occupancy: u32,
    pub produced: u32,
    pub consumed: u32,
    pub working: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefTrace {
    pub rows: Vec<RefRow>,
    /// (step, "distillOn" | "distillOff" | "delay")
    pub events: Vec<(usize, &'static str)>,
    pub executed_at: Vec<usize>,
}

/// Reference run over a per-step demand vector.
pub fn reference(demand: &[u32], capacity: Option<u32>, dist_t: u32) -> RefTrace {
    let total: u32 = demand.iter().sum();
    let mut phase = if total == 0 { Phase::Done } else { Phase::Working(0) };
    let (mut occ, mut produced, mut consumed) = (0u32, 0u32, 0u32);
    let mut out = RefTrace {
        rows: vec![],
        events: vec![],
        executed_at: vec![],
    };
    let mut pending: std::collections::VecDeque<u32> = demand.iter().copied().collect();
    let mut t = 0usize;
    while let Some(need) = pending.front_mut() {
        let pop = (*need).min(occ);
        if pop > 0 {
            occ -= pop;
            consumed += pop;
            *need -= pop;
            let (p, e) = transition(phase, Signal::Popped);
            phase = p;
            if e == Emit::On {
                out.events.push((t, "distillOn"));
            }
        }
        if *need == 0 {
            pending.pop_front();
            out.executed_at.push(t);
        } else {
            out.events.push((t, "delay"));
        }

        if let Phase::Working(p) = phase {
            let signal = if p + 1 == dist_t {
                occ += 1;
                produced += 1;
                Signal::Deposit {
                    full: capacity == Some(occ),
                    last: produced == total,
                }
            } else {
                Signal::Tick
            };
            let (p, e) = transition(phase, signal);
            phase = p;
            if e == Emit::Off {
                out.events.push((t, "distillOff"));
            }
        }

        out.rows.push(RefRow {
            occupancy: occ,
            produced,
            consumed,
            working: matches!(phase, Phase::Working(_)),
        });
        t += 1;
    }
    out
}

/// A schedule whose step `s` holds `demand[s]` T gates, or one H gate when
/// the demand is zero.
pub fn schedule_from_demand(demand: &[u32]) -> Schedule {
    let width = demand.iter().copied().max().unwrap_or(0) as usize;
    let filler = width;
    let mut gates = Vec::new();
    let mut steps = Vec::new();
    for (s, &d) in demand.iter().enumerate() {
        if d == 0 {
            gates.push(Gate::h(filler));
            steps.push(s);
        }
        for q in 0..d as usize {
            gates.push(Gate::t(q));
            steps.push(s);
        }
    }
    let list = GateList::from_gates(width + 1, gates).unwrap();
    Schedule::from_assignment(list, steps).unwrap()
}

/// Every demand vector with at most `max_len` steps and total at most
/// `max_total`.
pub fn all_demands(max_len: usize, max_total: u32) -> Vec<Vec<u32>> {
    fn grow(prefix: &mut Vec<u32>, left: u32, max_len: usize, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        if prefix.len() == max_len {
            return;
        }
        for d in 0..=left {
            prefix.push(d);
            grow(prefix, left - d, max_len, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), max_total, max_len, &mut out);
    out
}

pub fn capacity_of(limit: Option<u32>) -> Capacity {
    limit.map_or(Capacity::Unbounded, Capacity::bounded)
}

/// Compares a library trace against the reference; returns a description
/// of the first difference.
pub fn compare(demand: &[u32], limit: Option<u32>, dist_t: u32) -> Result<(), String> {
    let schedule = schedule_from_demand(demand);
    let cfg = magicpool::SimConfig::new(capacity_of(limit), dist_t).unwrap();
    let got = magicpool::simulate(&schedule, &cfg);
    let want = reference(demand, limit, dist_t);
    let ctx = || format!("demand {demand:?}, capacity {limit:?}, dist_t {dist_t}");
    if got.final_depth() != want.rows.len() {
        return Err(format!("{}: depth {} vs {}", ctx(), got.final_depth(), want.rows.len()));
    }
    for (r, w) in got.records().iter().zip(&want.rows) {
        let row = RefRow {
            occupancy: r.occupancy,
            produced: r.produced,
            consumed: r.consumed,
            working: r.distillery == magicpool::DistilleryState::Working,
        };
        if &row != w {
            return Err(format!("{}: step {} got {row:?} want {w:?}", ctx(), r.step));
        }
    }
    let events: Vec<(usize, String)> = got.events().iter().map(|e| (e.step, e.kind.to_string())).collect();
    let want_events: Vec<(usize, String)> = want.events.iter().map(|&(s, k)| (s, k.to_string())).collect();
    if events != want_events {
        return Err(format!("{}: events {events:?} vs {want_events:?}", ctx()));
    }
    if got.executed_at() != want.executed_at.as_slice() {
        return Err(format!("{}: executed_at differs", ctx()));
    }
    Ok(())
}

pub fn gate_strategy(num_qubits: usize) -> impl Strategy<Value = Gate> {
    let q = 0..num_qubits;
    prop_oneof![
        (q.clone(), prop::sample::select(vec![GateKind::InitZ, GateKind::InitX, GateKind::InitA]))
            .prop_map(|(q, k)| Gate::new(k, &[q]).unwrap()),
        (q.clone(), prop::sample::select(vec![GateKind::MeasureZ, GateKind::MeasureX]))
            .prop_map(|(q, k)| Gate::new(k, &[q]).unwrap()),
        (q.clone(), prop::sample::select(vec![GateKind::H, GateKind::S, GateKind::T]))
            .prop_map(|(q, k)| Gate::new(k, &[q]).unwrap()),
        (q.clone(), q)
            .prop_filter("distinct operands", |(a, b)| a != b)
            .prop_map(|(a, b)| Gate::cnot(a, b)),
    ]
}

pub fn gate_list_strategy() -> impl Strategy<Value = GateList> {
    (2usize..8).prop_flat_map(|nq| {
        prop::collection::vec(gate_strategy(nq), 0..60)
            .prop_map(move |gates| GateList::from_gates(nq, gates).unwrap())
    })
}

pub fn demand_strategy() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(prop_oneof![4 => Just(0u32), 3 => Just(1u32), 1 => 2u32..4], 0..60)
}
