//! Time-step scheduling of gate lists.
//!
//! Every gate occupies one time step. [`schedule_asap`] places each gate one
//! step after the latest earlier gate sharing a qubit with it, and
//! [`serialize_t`] then spreads steps holding several T-consuming gates so
//! that at most one distilled state is requested per step.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::gatelist::{self, Gate, GateList, ParseError};

/// 64-bit FNV-1a, used to tie schedules and traces back to their inputs.
pub(crate) fn fingerprint(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("assignment covers {got} gates but the list has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("gate #{gate} ({text}) at step {step} does not follow the previous gate on q{qubit} at step {previous}")]
    OrderViolation {
        gate: usize,
        text: String,
        qubit: usize,
        step: usize,
        previous: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduledParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("line {line}: expected `@<step>` prefix, found `{token}`")]
    MissingStep { line: usize, token: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: ScheduleError,
    },
}

/// Gates of a [`GateList`] assigned to discrete time steps.
///
/// Gates keep their list order; `step_of[i]` is the step of gate `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    list: GateList,
    step_of: Vec<usize>,
    steps: Vec<Vec<usize>>,
    source: u64,
    id: u64,
    t_serialized: bool,
}

impl Schedule {
    /// Builds a schedule from an explicit step per gate, checking that every
    /// qubit sees its gates at strictly increasing steps.
    pub fn from_assignment(list: GateList, step_of: Vec<usize>) -> Result<Self, ScheduleError> {
        if step_of.len() != list.len() {
            return Err(ScheduleError::LengthMismatch {
                expected: list.len(),
                got: step_of.len(),
            });
        }
        let mut last: Vec<Option<usize>> = vec![None; list.num_qubits()];
        for (i, (gate, &step)) in list.iter().zip(&step_of).enumerate() {
            for &q in gate.qubits() {
                if let Some(previous) = last[q] {
                    if step <= previous {
                        return Err(ScheduleError::OrderViolation {
                            gate: i,
                            text: gate.to_string(),
                            qubit: q,
                            step,
                            previous,
                        });
                    }
                }
                last[q] = Some(step);
            }
        }
        Ok(Self::assemble(list, step_of))
    }

    fn assemble(list: GateList, step_of: Vec<usize>) -> Self {
        let depth = step_of.iter().map(|&s| s + 1).max().unwrap_or(0);
        let mut steps = vec![Vec::new(); depth];
        for (i, &s) in step_of.iter().enumerate() {
            steps[s].push(i);
        }
        let t_serialized = steps.iter().all(|gates| {
            gates
                .iter()
                .filter(|&&i| list.gates()[i].consumes_t_state())
                .count()
                <= 1
        });
        let source = fingerprint(list.to_text().as_bytes());
        let mut schedule = Schedule {
            list,
            step_of,
            steps,
            source,
            id: 0,
            t_serialized,
        };
        schedule.id = fingerprint(schedule.to_text().as_bytes());
        schedule
    }

    pub fn num_qubits(&self) -> usize {
        self.list.num_qubits()
    }

    /// The gate list in its original order.
    pub fn gate_list(&self) -> &GateList {
        &self.list
    }

    pub fn step_of(&self, gate: usize) -> usize {
        self.step_of[gate]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.step_of
    }

    /// Gates at `step`, in list order.
    pub fn step(&self, step: usize) -> impl Iterator<Item = &Gate> + '_ {
        self.steps
            .get(step)
            .into_iter()
            .flatten()
            .map(move |&i| &self.list.gates()[i])
    }

    /// Indices into the gate list, grouped by step.
    pub fn steps(&self) -> &[Vec<usize>] {
        &self.steps
    }

    /// Number of time steps up to and including the last occupied one.
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn t_count(&self) -> usize {
        self.list.t_count()
    }

    /// T-consuming gates requested at each step.
    pub fn t_demand(&self) -> Vec<u32> {
        (0..self.depth())
            .map(|s| self.step(s).filter(|g| g.consumes_t_state()).count() as u32)
            .collect()
    }

    pub fn is_t_serialized(&self) -> bool {
        self.t_serialized
    }

    /// Fingerprint of the source gate list.
    pub fn source_id(&self) -> u64 {
        self.source
    }

    /// Fingerprint of this schedule (gate list plus step assignment).
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Scheduled text form; no trailing newline.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the scheduled gate list format. `@<step> distillOn` and
    /// `@<step> distillOff` annotation lines are accepted and skipped.
    pub fn parse(text: &str) -> Result<Self, ScheduledParseError> {
        let mut list: Option<GateList> = None;
        let mut step_of = Vec::new();
        let mut line_of = Vec::new();
        for (line, tokens) in gatelist::content_lines(text) {
            let Some(list) = list.as_mut() else {
                list = Some(GateList::new(gatelist::parse_header(line, &tokens)?));
                continue;
            };
            let step = tokens[0]
                .strip_prefix('@')
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| ScheduledParseError::MissingStep {
                    line,
                    token: tokens[0].to_string(),
                })?;
            let rest = &tokens[1..];
            if rest.is_empty() {
                return Err(ParseError::Malformed {
                    line,
                    token: tokens[0].to_string(),
                }
                .into());
            }
            if rest.len() == 1
                && (rest[0].eq_ignore_ascii_case("distillOn")
                    || rest[0].eq_ignore_ascii_case("distillOff"))
            {
                continue;
            }
            let gate = gatelist::parse_gate(line, rest)?;
            list.push(gate)
                .map_err(|source| ParseError::InvalidGate { line, source })?;
            step_of.push(step);
            line_of.push(line);
        }
        let list = list.ok_or(ParseError::Empty)?;
        Schedule::from_assignment(list, step_of).map_err(|source| {
            let line = match &source {
                ScheduleError::OrderViolation { gate, .. } => line_of[*gate],
                ScheduleError::LengthMismatch { .. } => 0,
            };
            ScheduledParseError::Invalid { line, source }
        })
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qubits {}", self.num_qubits())?;
        for (s, gates) in self.steps.iter().enumerate() {
            for &i in gates {
                write!(f, "\n@{s} {}", self.list.gates()[i])?;
            }
        }
        Ok(())
    }
}

/// Places every gate at the earliest step after all earlier gates on its
/// qubits.
pub fn schedule_asap(list: &GateList) -> Schedule {
    let mut free_at = vec![0usize; list.num_qubits()];
    let step_of = list
        .iter()
        .map(|gate| {
            let step = gate.qubits().iter().map(|&q| free_at[q]).max().unwrap_or(0);
            for &q in gate.qubits() {
                free_at[q] = step + 1;
            }
            step
        })
        .collect();
    Schedule::assemble(list.clone(), step_of)
}

/// Per-qubit predecessor and successor links between gates.
struct Dependencies {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl Dependencies {
    fn of(list: &GateList) -> Self {
        let mut last: Vec<Option<usize>> = vec![None; list.num_qubits()];
        let mut preds = vec![Vec::new(); list.len()];
        let mut succs = vec![Vec::new(); list.len()];
        for (i, gate) in list.iter().enumerate() {
            for &q in gate.qubits() {
                if let Some(p) = last[q] {
                    if !preds[i].contains(&p) {
                        preds[i].push(p);
                        succs[p].push(i);
                    }
                }
                last[q] = Some(i);
            }
        }
        Dependencies { preds, succs }
    }

    /// Gates on the longest dependency path starting at each gate.
    fn remaining_chain(&self) -> Vec<usize> {
        let mut chain = vec![1usize; self.succs.len()];
        for i in (0..self.succs.len()).rev() {
            chain[i] = 1 + self.succs[i].iter().map(|&j| chain[j]).max().unwrap_or(0);
        }
        chain
    }
}

/// Rearranges `schedule` so that no step holds more than one T-consuming
/// gate.
///
/// Steps are scanned in time order. Where a step holds several T-consuming
/// gates, the one with the longest remaining dependency chain stays (lowest
/// qubit index on ties) and the others move one step later. Later gates are
/// pushed only where a move would otherwise break per-qubit order.
pub fn serialize_t(schedule: &Schedule) -> Schedule {
    if schedule.is_t_serialized() {
        return schedule.clone();
    }
    let list = schedule.gate_list();
    let gates = list.gates();
    let deps = Dependencies::of(list);
    let chain = deps.remaining_chain();
    let mut step_of = schedule.assignment().to_vec();

    let mut t_at: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, gate) in gates.iter().enumerate() {
        if gate.consumes_t_state() {
            t_at.entry(step_of[i]).or_default().insert(i);
        }
    }

    let mut t = 0;
    while let Some((&step, _)) = t_at.range(t..).next() {
        t = step;
        let crowded: Vec<usize> = t_at[&t].iter().copied().collect();
        if crowded.len() > 1 {
            let keep = *crowded
                .iter()
                .min_by_key(|&&i| (std::cmp::Reverse(chain[i]), gates[i].min_qubit(), i))
                .expect("non-empty");
            for &moved in crowded.iter().filter(|&&i| i != keep) {
                shift_later(moved, t + 1, &mut step_of, &deps, gates, &mut t_at);
            }
        }
        t += 1;
    }

    Schedule::assemble(list.clone(), step_of)
}

/// Moves `gate` to `to` and pushes dependants forward as far as needed to
/// keep every per-qubit order strict.
fn shift_later(
    gate: usize,
    to: usize,
    step_of: &mut [usize],
    deps: &Dependencies,
    gates: &[Gate],
    t_at: &mut BTreeMap<usize, BTreeSet<usize>>,
) {
    let mut relocate = |i: usize, new_step: usize, step_of: &mut [usize]| {
        if gates[i].consumes_t_state() {
            let old = step_of[i];
            if let Some(set) = t_at.get_mut(&old) {
                set.remove(&i);
                if set.is_empty() {
                    t_at.remove(&old);
                }
            }
            t_at.entry(new_step).or_default().insert(i);
        }
        step_of[i] = new_step;
    };

    relocate(gate, to, step_of);
    // List order is a topological order, so a min-ordered worklist settles
    // each gate once all of its predecessors are final.
    let mut pending: BTreeSet<usize> = deps.succs[gate].iter().copied().collect();
    while let Some(i) = pending.pop_first() {
        let earliest = deps.preds[i]
            .iter()
            .map(|&p| step_of[p] + 1)
            .max()
            .unwrap_or(0);
        if earliest > step_of[i] {
            relocate(i, earliest, step_of);
            pending.extend(deps.succs[i].iter().copied());
        }
    }
}

/// Per-step count of T-consuming gates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TDistribution {
    pub per_step: Vec<u32>,
}

impl TDistribution {
    pub fn total(&self) -> u64 {
        self.per_step.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn max(&self) -> u32 {
        self.per_step.iter().copied().max().unwrap_or(0)
    }

    /// `step,t_count` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["step", "t_count"])
            .expect("in-memory write");
        for (step, count) in self.per_step.iter().enumerate() {
            writer
                .write_record([step.to_string(), count.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

pub fn t_distribution(schedule: &Schedule) -> TDistribution {
    TDistribution {
        per_step: schedule.t_demand(),
    }
}
