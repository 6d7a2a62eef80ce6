//! Bounding-box geometry in plumbing pieces.
//!
//! The layout stacks three partitions: the distillery on top, one row of
//! pooled connections below it, and the computation underneath with
//! `qubits_per_row` qubits per row. Time runs along the depth axis, two
//! pieces per time step.

use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::distsim::Capacity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("distillation box depth {box_depth} is not a positive multiple of {pieces_per_step} pieces per step")]
    BoxDepth {
        box_depth: u64,
        pieces_per_step: u64,
    },
    #[error("{qubits_per_row} qubits per row plus a routing slot need {needed} pieces, box is {box_width} wide")]
    RowTooWide {
        qubits_per_row: u64,
        needed: u64,
        box_width: u64,
    },
    #[error("qubits per row must be positive")]
    NoQubitsPerRow,
    #[error("pool capacity must be positive")]
    NoPoolCapacity,
    #[error("controlled pool held {max_pool} connections, which needs {needed} pieces but the box is {box_width} wide")]
    PoolTooWide {
        max_pool: u64,
        needed: u64,
        box_width: u64,
    },
    #[error("controlled volume is zero")]
    ZeroVolume,
    #[error("the bare layout only applies to circuits without T-consuming gates")]
    BareWithDistillery,
}

/// Plumbing-piece dimensions of the layout building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutParams {
    pub box_depth: u64,
    pub box_width: u64,
    pub box_height: u64,
    pub qubits_per_row: u64,
    pub pool_capacity_default: u32,
    pub pieces_per_step: u64,
    /// Height of the single row of pooled connections.
    pub pool_row_height: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            box_depth: 6,
            box_width: 16,
            box_height: 10,
            qubits_per_row: 7,
            pool_capacity_default: 7,
            pieces_per_step: 2,
            pool_row_height: 2,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.box_depth == 0 || !self.box_depth.is_multiple_of(self.pieces_per_step) {
            return Err(LayoutError::BoxDepth {
                box_depth: self.box_depth,
                pieces_per_step: self.pieces_per_step,
            });
        }
        if self.qubits_per_row == 0 {
            return Err(LayoutError::NoQubitsPerRow);
        }
        let needed = 2 * (self.qubits_per_row + 1);
        if needed > self.box_width {
            return Err(LayoutError::RowTooWide {
                qubits_per_row: self.qubits_per_row,
                needed,
                box_width: self.box_width,
            });
        }
        if self.pool_capacity_default == 0 {
            return Err(LayoutError::NoPoolCapacity);
        }
        Ok(())
    }

    /// Time steps per distillation.
    pub fn dist_t(&self) -> u64 {
        self.box_depth / self.pieces_per_step
    }
}

pub fn layout_depth(final_depth_steps: u64, params: &LayoutParams) -> u64 {
    params.pieces_per_step * final_depth_steps
}

pub fn qubit_rows(num_qubits: u64, params: &LayoutParams) -> u64 {
    num_qubits.div_ceil(params.qubits_per_row)
}

pub fn layout_height(num_qubits: u64, params: &LayoutParams) -> u64 {
    params.box_height + params.pool_row_height + qubit_rows(num_qubits, params)
}

/// Controlled pools fit under the distillery. An uncontrolled pool spills
/// over once its connections (two pieces each, plus one routing column) are
/// wider than a box.
pub fn layout_width(max_pool: u64, controlled: bool, params: &LayoutParams) -> Result<u64, LayoutError> {
    if controlled {
        let needed = 2 * max_pool;
        if needed > params.box_width {
            return Err(LayoutError::PoolTooWide {
                max_pool,
                needed,
                box_width: params.box_width,
            });
        }
        Ok(params.box_width)
    } else {
        Ok(params.box_width.max(2 * max_pool + 1))
    }
}

/// Width and height of the computation partition on its own.
pub fn bare_extent(num_qubits: u64, params: &LayoutParams) -> (u64, u64) {
    (2 * params.qubits_per_row + 2, qubit_rows(num_qubits, params))
}

/// Lower bound on execution time, in steps, imposed by the distillery.
pub fn min_execution_time(t_count: u64, params: &LayoutParams) -> u64 {
    t_count * params.dist_t()
}

pub fn volume(depth: u64, width: u64, height: u64) -> u64 {
    depth * width * height
}

pub fn improvement(baseline: &ResourceReport, controlled: &ResourceReport) -> Result<f64, LayoutError> {
    if controlled.volume == 0 {
        return Err(LayoutError::ZeroVolume);
    }
    Ok(baseline.volume as f64 / controlled.volume as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Controlled,
    Uncontrolled,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Controlled => "controlled",
            Mode::Uncontrolled => "uncontrolled",
        }
    }
}

/// Resource estimate for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport {
    /// Adder width when the circuit is a generated adder.
    pub n: Option<u64>,
    pub t_count: u64,
    pub mode: Mode,
    pub capacity: Capacity,
    pub depth: u64,
    pub width: u64,
    pub height: u64,
    pub volume: u64,
    pub max_pool: u64,
    pub delays: u64,
    pub improvement: Option<f64>,
}

impl ResourceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl Serialize for ResourceReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(11))?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("t_count", &self.t_count)?;
        map.serialize_entry("mode", self.mode.as_str())?;
        match self.capacity.limit() {
            Some(k) => map.serialize_entry("capacity", &k)?,
            None => map.serialize_entry("capacity", "unbounded")?,
        }
        map.serialize_entry("depth", &self.depth)?;
        map.serialize_entry("width", &self.width)?;
        map.serialize_entry("height", &self.height)?;
        map.serialize_entry("volume", &self.volume)?;
        map.serialize_entry("max_pool", &self.max_pool)?;
        map.serialize_entry("delays", &self.delays)?;
        map.serialize_entry("improvement", &self.improvement)?;
        map.end()
    }
}
