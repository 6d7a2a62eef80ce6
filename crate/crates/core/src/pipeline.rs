//! End-to-end estimate: schedule, serialize, simulate with and without
//! control, and size both layouts.

use thiserror::Error;

use crate::distsim::{simulate, Capacity, SimConfig, SimConfigError, SimTrace};
use crate::gatelist::GateList;
use crate::layout::{self, LayoutError, LayoutParams, Mode, ResourceReport};
use crate::scheduler::{schedule_asap, serialize_t, Schedule};

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Config(#[from] SimConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateOptions {
    pub capacity: Capacity,
    pub params: LayoutParams,
    /// Size Clifford-only circuits without distillery and pool partitions.
    pub bare: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        let params = LayoutParams::default();
        EstimateOptions {
            capacity: Capacity::bounded(params.pool_capacity_default),
            params,
            bare: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Estimate {
    pub asap: Schedule,
    pub serialized: Schedule,
    pub uncontrolled: SimTrace,
    pub controlled: SimTrace,
    pub baseline: ResourceReport,
    pub report: ResourceReport,
}

impl Estimate {
    pub fn improvement(&self) -> f64 {
        self.report.improvement.expect("controlled report carries its improvement")
    }

    /// Both reports as a JSON array, baseline first.
    pub fn reports_json(&self) -> String {
        serde_json::to_string_pretty(&[&self.baseline, &self.report]).expect("reports serialize")
    }
}

pub fn estimate(list: &GateList, n: Option<u64>, opts: &EstimateOptions) -> Result<Estimate, EstimateError> {
    let params = &opts.params;
    params.validate()?;
    let dist_t = u32::try_from(params.dist_t()).unwrap_or(u32::MAX);
    let baseline_cfg = SimConfig::new(Capacity::Unbounded, dist_t)?;
    let controlled_cfg = SimConfig::new(opts.capacity, dist_t)?;

    let asap = schedule_asap(list);
    let serialized = serialize_t(&asap);
    let uncontrolled = simulate(&serialized, &baseline_cfg);
    let controlled = simulate(&serialized, &controlled_cfg);

    let t_count = serialized.t_count() as u64;
    if opts.bare && t_count > 0 {
        return Err(LayoutError::BareWithDistillery.into());
    }
    let num_qubits = list.num_qubits() as u64;

    let size = |trace: &SimTrace, mode: Mode| -> Result<ResourceReport, LayoutError> {
        let max_pool = u64::from(trace.max_occupancy());
        let depth = layout::layout_depth(trace.final_depth() as u64, params);
        let (width, height) = if opts.bare {
            layout::bare_extent(num_qubits, params)
        } else {
            (
                layout::layout_width(max_pool, mode == Mode::Controlled, params)?,
                layout::layout_height(num_qubits, params),
            )
        };
        Ok(ResourceReport {
            n,
            t_count,
            mode,
            capacity: trace.config().capacity,
            depth,
            width,
            height,
            volume: layout::volume(depth, width, height),
            max_pool,
            delays: trace.delays() as u64,
            improvement: None,
        })
    };

    let baseline = size(&uncontrolled, Mode::Uncontrolled)?;
    let mut report = size(&controlled, Mode::Controlled)?;
    report.improvement = Some(layout::improvement(&baseline, &report)?);

    Ok(Estimate {
        asap,
        serialized,
        uncontrolled,
        controlled,
        baseline,
        report,
    })
}
