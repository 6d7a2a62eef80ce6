//! Distillery and connection-pool simulation for surface-code circuits.
//!
//! A Clifford+T [`GateList`] is scheduled into time steps, its T-consuming
//! gates are spread so that at most one distilled state is requested per
//! step, and the distillery feeding a bounded pool of connections is
//! simulated step by step. The resulting traces size a three-partition
//! layout (distillery, pool, computation) in plumbing pieces.
//!
//! ```
//! use magicpool::{estimate, generate_adder, AdderSpec, EstimateOptions};
//!
//! let adder = generate_adder(&AdderSpec::new(64).unwrap());
//! let est = estimate(&adder, Some(64), &EstimateOptions::default()).unwrap();
//! assert_eq!(est.report.depth, 2272);
//! assert_eq!(est.baseline.width, 73);
//! ```

pub mod addergen;
pub mod distsim;
pub mod gatelist;
pub mod layout;
pub mod pipeline;
pub mod scheduler;

pub use addergen::{generate_adder, AdderError, AdderSpec};
pub use distsim::{
    annotate, max_occupancy, simulate, Capacity, DistilleryState, Event, EventKind, PoolState,
    SimConfig, SimTrace, StepRecord,
};
pub use gatelist::{Gate, GateKind, GateList, ParseError};
pub use layout::{LayoutError, LayoutParams, Mode, ResourceReport};
pub use pipeline::{estimate, Estimate, EstimateError, EstimateOptions};
pub use scheduler::{schedule_asap, serialize_t, t_distribution, Schedule, TDistribution};
