use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use magicpool::{
    annotate, estimate, generate_adder, schedule_asap, serialize_t, simulate, t_distribution,
    AdderSpec, Capacity, EstimateOptions, GateList, LayoutParams, Schedule, SimConfig,
};

#[derive(Parser)]
#[command(name = "magicpool", version, about = "Distillery and connection-pool simulator for Clifford+T circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an n-bit ripple-carry adder gate list.
    GenAdder {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Schedule a gate list as soon as possible.
    Schedule {
        input: PathBuf,
        /// Spread T-consuming gates to at most one per step.
        #[arg(long)]
        serialize_t: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scheduled gate list against the distillery and pool.
    Simulate {
        scheduled: PathBuf,
        #[arg(long)]
        capacity: Capacity,
        #[arg(long, default_value_t = SimConfig::DEFAULT_DIST_T)]
        dist_t: u32,
        /// Per-step pool trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Scheduled gate list with distillOn/distillOff lines.
        #[arg(long)]
        annotated: Option<PathBuf>,
        /// Event log CSV.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Number of T-consuming gates per step of a scheduled gate list.
    Distribution {
        scheduled: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate bounding boxes with and without distillery control.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(required_unless_present = "adder", conflicts_with = "adder")]
    input: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    adder: Option<u64>,
    /// Pool capacity for the controlled run [default: 7].
    #[arg(long)]
    capacity: Option<Capacity>,
    #[arg(long)]
    report: PathBuf,
    /// Directory for traces, event logs, annotated lists and the distribution.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    /// Leave out the distillery and pool partitions (Clifford-only circuits).
    #[arg(long)]
    bare: bool,
    #[command(flatten)]
    layout: LayoutArgs,
}

#[derive(Args)]
struct LayoutArgs {
    /// Distillation box depth in pieces; two pieces make one time step.
    #[arg(long, default_value_t = LayoutParams::default().box_depth)]
    box_depth: u64,
    #[arg(long, default_value_t = LayoutParams::default().box_width)]
    box_width: u64,
    #[arg(long, default_value_t = LayoutParams::default().box_height)]
    box_height: u64,
    #[arg(long, default_value_t = LayoutParams::default().qubits_per_row)]
    qubits_per_row: u64,
    #[arg(long, default_value_t = LayoutParams::default().pool_row_height)]
    pool_row_height: u64,
}

impl LayoutArgs {
    fn params(&self) -> LayoutParams {
        LayoutParams {
            box_depth: self.box_depth,
            box_width: self.box_width,
            box_height: self.box_height,
            qubits_per_row: self.qubits_per_row,
            pool_row_height: self.pool_row_height,
            ..LayoutParams::default()
        }
    }
}

/// Files to be written together: all or none.
#[derive(Default)]
struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    fn add(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    fn commit(self) -> Result<()> {
        let mut seen = HashSet::new();
        for (path, _) in &self.files {
            let abs = std::path::absolute(path).with_context(|| format!("resolving {}", path.display()))?;
            if !seen.insert(abs) {
                bail!("output path {} is used more than once", path.display());
            }
        }
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, contents) in &self.files {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file next to {}", path.display()))?;
            tmp.write_all(contents.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            staged.push((tmp, path));
        }
        let mut done: Vec<&PathBuf> = Vec::new();
        for (tmp, path) in staged {
            if let Err(e) = tmp.persist(path) {
                for p in done {
                    let _ = fs::remove_file(p);
                }
                return Err(e.error).with_context(|| format!("writing {}", path.display()));
            }
            done.push(path);
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_gate_list(path: &Path) -> Result<GateList> {
    GateList::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_schedule(path: &Path) -> Result<Schedule> {
    Schedule::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenAdder { n, out } => {
            let spec = AdderSpec::new(n as usize)?;
            let list = generate_adder(&spec);
            let mut outputs = Outputs::default();
            outputs.add(out, with_newline(list.to_text()));
            outputs.commit()?;
            println!("{n}-bit adder: {} qubits, {} gates, T-count {}", list.num_qubits(), list.len(), list.t_count());
        }
        Command::Schedule { input, serialize_t: serialize, out } => {
            let list = read_gate_list(&input)?;
            let mut schedule = schedule_asap(&list);
            if serialize {
                schedule = serialize_t(&schedule);
            }
            let mut outputs = Outputs::default();
            outputs.add(out, with_newline(schedule.to_text()));
            outputs.commit()?;
            println!(
                "depth {} steps, max {} T per step",
                schedule.depth(),
                t_distribution(&schedule).max()
            );
        }
        Command::Simulate { scheduled, capacity, dist_t, trace, annotated, events } => {
            let schedule = read_schedule(&scheduled)?;
            let cfg = SimConfig::new(capacity, dist_t)?;
            let result = simulate(&schedule, &cfg);
            let mut outputs = Outputs::default();
            if let Some(p) = trace {
                outputs.add(p, result.to_csv());
            }
            if let Some(p) = annotated {
                outputs.add(p, with_newline(annotate(&schedule, &result)?));
            }
            if let Some(p) = events {
                outputs.add(p, result.events_csv());
            }
            outputs.commit()?;
            println!(
                "final depth {} steps, max pool {}, delays {}",
                result.final_depth(),
                result.max_occupancy(),
                result.delays()
            );
        }
        Command::Distribution { scheduled, out } => {
            let schedule = read_schedule(&scheduled)?;
            let mut outputs = Outputs::default();
            outputs.add(out, t_distribution(&schedule).to_csv());
            outputs.commit()?;
        }
        Command::Estimate(args) => cmd_estimate(args)?,
    }
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let params = args.layout.params();
    params.validate()?;
    let (list, n) = match (&args.input, args.adder) {
        (Some(path), None) => (read_gate_list(path)?, None),
        (None, Some(n)) => (generate_adder(&AdderSpec::new(n as usize)?), Some(n)),
        _ => unreachable!("clap enforces exactly one input"),
    };
    let opts = EstimateOptions {
        capacity: args.capacity.unwrap_or(Capacity::bounded(params.pool_capacity_default)),
        params,
        bare: args.bare,
    };
    let est = estimate(&list, n, &opts)?;

    let mut outputs = Outputs::default();
    outputs.add(&args.report, with_newline(est.reports_json()));
    let mut created_dir = None;
    if let Some(dir) = &args.trace_dir {
        if !dir.exists() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            created_dir = Some(dir);
        }
        outputs.add(dir.join("schedule.txt"), with_newline(est.serialized.to_text()));
        outputs.add(dir.join("distribution.csv"), t_distribution(&est.serialized).to_csv());
        for (name, trace) in [("uncontrolled", &est.uncontrolled), ("controlled", &est.controlled)] {
            outputs.add(dir.join(format!("{name}_trace.csv")), trace.to_csv());
            outputs.add(dir.join(format!("{name}_events.csv")), trace.events_csv());
            outputs.add(
                dir.join(format!("{name}_annotated.txt")),
                with_newline(annotate(&est.serialized, trace)?),
            );
        }
    }
    if let Err(e) = outputs.commit() {
        if let Some(dir) = created_dir {
            let _ = fs::remove_dir(dir);
        }
        return Err(e);
    }

    println!("mode          capacity    depth  width height       volume  max_pool delays");
    for r in [&est.baseline, &est.report] {
        println!(
            "{:<12} {:>9} {:>8} {:>6} {:>6} {:>12} {:>9} {:>6}",
            r.mode.as_str(),
            r.capacity.to_string(),
            r.depth,
            r.width,
            r.height,
            r.volume,
            r.max_pool,
            r.delays
        );
    }
    println!("improvement {:.2}", est.improvement());
    Ok(())
}

fn main() -> std::process::ExitCode {
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
