//! Step-by-step simulation of the distillery and the connection pool.
//!
//! Timing conventions:
//!
//! * The distillery is working from step 0. A distillation that is worked
//!   on during steps `b ..= b + dist_t - 1` deposits its state at the end of
//!   step `b + dist_t - 1`; the state can be consumed from step
//!   `b + dist_t` on.
//! * Within a step the computation first draws the states it needs from
//!   the pool. If the pool cannot cover the step, the step is retried one
//!   step later and a delay is recorded; the rest of the schedule shifts
//!   rigidly.
//! * Any consumption restarts a stopped distillery in the same step, so the
//!   new distillation deposits `dist_t` steps later.
//! * After a deposit the distillery stops if the pool is full, or for good
//!   once every required state has been distilled.
//!
//! Each [`StepRecord`] is the state at the end of its step, so in an
//! uncontrolled run `produced = min(total, (step + 1) / dist_t)`.

use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use thiserror::Error;

use crate::scheduler::Schedule;

/// Maximum number of stored connections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Bounded(NonZeroU32),
    Unbounded,
}

impl Capacity {
    /// # Panics
    /// If `k` is zero.
    pub fn bounded(k: u32) -> Self {
        Capacity::Bounded(NonZeroU32::new(k).expect("pool capacity must be positive"))
    }

    pub fn limit(self) -> Option<u32> {
        match self {
            Capacity::Bounded(k) => Some(k.get()),
            Capacity::Unbounded => None,
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, Capacity::Bounded(_))
    }

    fn is_full(self, occupancy: u32) -> bool {
        self.limit().is_some_and(|k| occupancy >= k)
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Bounded(k) => write!(f, "{k}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("capacity must be a positive integer or `unbounded`, got `{0}`")]
pub struct CapacityParseError(String);

impl FromStr for Capacity {
    type Err = CapacityParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("unbounded") {
            return Ok(Capacity::Unbounded);
        }
        s.parse::<NonZeroU32>()
            .map(Capacity::Bounded)
            .map_err(|_| CapacityParseError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolState {
    Full,
    Empty,
    Accepting,
}

impl PoolState {
    pub fn of(occupancy: u32, capacity: Capacity) -> Self {
        if capacity.is_full(occupancy) {
            PoolState::Full
        } else if occupancy == 0 {
            PoolState::Empty
        } else {
            PoolState::Accepting
        }
    }
}

/// `Distilled`, `Start` and `Stop` are instantaneous; records only ever
/// show `Working` or `Stopped`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistilleryState {
    Working,
    Distilled,
    Stopped,
    Start,
    Stop,
}

impl fmt::Display for DistilleryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistilleryState::Working => "working",
            DistilleryState::Distilled => "distilled",
            DistilleryState::Stopped => "stopped",
            DistilleryState::Start => "start",
            DistilleryState::Stop => "stop",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SimConfigError {
    #[error("distillation time must be at least one step")]
    ZeroDistillationTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub capacity: Capacity,
    /// Time steps per distillation.
    pub dist_t: u32,
}

impl SimConfig {
    pub const DEFAULT_DIST_T: u32 = 3;

    pub fn new(capacity: Capacity, dist_t: u32) -> Result<Self, SimConfigError> {
        if dist_t == 0 {
            return Err(SimConfigError::ZeroDistillationTime);
        }
        Ok(SimConfig { capacity, dist_t })
    }

    pub fn uncontrolled() -> Self {
        SimConfig {
            capacity: Capacity::Unbounded,
            dist_t: Self::DEFAULT_DIST_T,
        }
    }

    pub fn controlled(capacity: u32) -> Self {
        SimConfig {
            capacity: Capacity::bounded(capacity),
            dist_t: Self::DEFAULT_DIST_T,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub occupancy: u32,
    pub produced: u32,
    pub consumed: u32,
    pub distillery: DistilleryState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    DistillOn,
    DistillOff,
    Delay,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::DistillOn => "distillOn",
            EventKind::DistillOff => "distillOff",
            EventKind::Delay => "delay",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub step: usize,
    pub kind: EventKind,
}

/// Outcome of one simulation run. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    records: Vec<StepRecord>,
    events: Vec<Event>,
    executed_at: Vec<usize>,
    total_to_distill: u32,
    config: SimConfig,
    schedule_id: u64,
}

impl SimTrace {
    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Executed time step of each schedule step.
    pub fn executed_at(&self) -> &[usize] {
        &self.executed_at
    }

    /// Schedule depth plus delays.
    pub fn final_depth(&self) -> usize {
        self.records.len()
    }

    pub fn total_to_distill(&self) -> u32 {
        self.total_to_distill
    }

    pub fn config(&self) -> SimConfig {
        self.config
    }

    pub fn schedule_id(&self) -> u64 {
        self.schedule_id
    }

    pub fn delays(&self) -> usize {
        self.count(EventKind::Delay)
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn max_occupancy(&self) -> u32 {
        max_occupancy(self)
    }

    /// Last step at which the pool holds its maximum, i.e. where draining
    /// starts. `None` for an empty trace.
    pub fn peak_step(&self) -> Option<usize> {
        let max = self.max_occupancy();
        self.records
            .iter()
            .rev()
            .find(|r| r.occupancy == max)
            .map(|r| r.step)
    }

    /// First step after the peak at which the pool is empty again.
    pub fn drained_step(&self) -> Option<usize> {
        let peak = self.peak_step()?;
        self.records[peak..]
            .iter()
            .find(|r| r.occupancy == 0)
            .map(|r| r.step)
    }

    /// `step,occupancy,produced,consumed,state` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["step", "occupancy", "produced", "consumed", "state"])
            .expect("in-memory write");
        for r in &self.records {
            writer
                .write_record([
                    r.step.to_string(),
                    r.occupancy.to_string(),
                    r.produced.to_string(),
                    r.consumed.to_string(),
                    r.distillery.to_string(),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    /// `step,event` CSV with header.
    pub fn events_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["step", "event"])
            .expect("in-memory write");
        for e in &self.events {
            writer
                .write_record([e.step.to_string(), e.kind.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

pub fn max_occupancy(trace: &SimTrace) -> u32 {
    trace
        .records
        .iter()
        .map(|r| r.occupancy)
        .max()
        .unwrap_or(0)
}

enum Distillery {
    /// `progress` steps of the current distillation are complete.
    Working { progress: u32 },
    Stopped,
    /// Every required state has been distilled.
    Finished,
}

/// Runs the schedule against the distillery and pool.
///
/// The number of states to distill is the schedule's T-count. Schedules with
/// several T-consuming gates in one step draw what the pool holds and wait
/// for the rest.
pub fn simulate(schedule: &Schedule, cfg: &SimConfig) -> SimTrace {
    let demand = schedule.t_demand();
    let total = schedule.t_count() as u32;
    let depth = schedule.depth();

    let mut records = Vec::with_capacity(depth);
    let mut events = Vec::new();
    let mut executed_at = Vec::with_capacity(depth);

    let mut distillery = if total > 0 {
        Distillery::Working { progress: 0 }
    } else {
        Distillery::Finished
    };
    let mut occupancy = 0u32;
    let mut produced = 0u32;
    let mut consumed = 0u32;
    let mut cursor = 0usize;
    let mut outstanding = demand.first().copied().unwrap_or(0);
    let mut now = 0usize;

    while cursor < depth {
        // Consume.
        let take = outstanding.min(occupancy);
        if take > 0 {
            occupancy -= take;
            consumed += take;
            outstanding -= take;
            if matches!(distillery, Distillery::Stopped) {
                distillery = Distillery::Working { progress: 0 };
                events.push(Event {
                    step: now,
                    kind: EventKind::DistillOn,
                });
            }
        }
        if outstanding > 0 {
            events.push(Event {
                step: now,
                kind: EventKind::Delay,
            });
        } else {
            executed_at.push(now);
            cursor += 1;
            outstanding = demand.get(cursor).copied().unwrap_or(0);
        }

        // Produce.
        if let Distillery::Working { progress } = &mut distillery {
            *progress += 1;
            if *progress == cfg.dist_t {
                occupancy += 1;
                produced += 1;
                if produced == total {
                    distillery = Distillery::Finished;
                    events.push(Event {
                        step: now,
                        kind: EventKind::DistillOff,
                    });
                } else if cfg.capacity.is_full(occupancy) {
                    distillery = Distillery::Stopped;
                    events.push(Event {
                        step: now,
                        kind: EventKind::DistillOff,
                    });
                } else {
                    *progress = 0;
                }
            }
        }

        records.push(StepRecord {
            step: now,
            occupancy,
            produced,
            consumed,
            distillery: match distillery {
                Distillery::Working { .. } => DistilleryState::Working,
                Distillery::Stopped | Distillery::Finished => DistilleryState::Stopped,
            },
        });
        now += 1;
    }

    SimTrace {
        records,
        events,
        executed_at,
        total_to_distill: total,
        config: *cfg,
        schedule_id: schedule.id(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotateError {
    #[error("trace was produced from a different schedule")]
    ProvenanceMismatch,
}

/// Scheduled gate list on the executed timeline, with `@<step> distillOn`
/// and `@<step> distillOff` lines after the gates of the step where the
/// distillery switched. No trailing newline.
pub fn annotate(schedule: &Schedule, trace: &SimTrace) -> Result<String, AnnotateError> {
    if trace.schedule_id != schedule.id() || trace.executed_at.len() != schedule.depth() {
        return Err(AnnotateError::ProvenanceMismatch);
    }
    let mut out = format!("qubits {}", schedule.num_qubits());
    let mut switches = trace
        .events
        .iter()
        .filter(|e| e.kind != EventKind::Delay)
        .peekable();
    let mut executed = trace.executed_at.iter().enumerate().peekable();
    for now in 0..trace.final_depth() {
        while let Some((s, _)) = executed.next_if(|(_, &at)| at == now) {
            for gate in schedule.step(s) {
                out.push_str(&format!("\n@{now} {gate}"));
            }
        }
        while let Some(e) = switches.next_if(|e| e.step == now) {
            out.push_str(&format!("\n@{now} {}", e.kind));
        }
    }
    Ok(out)
}
