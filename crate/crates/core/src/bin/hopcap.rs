use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hopcap::capacity::Scenario;
use hopcap::harness::{compare_table4, run_sweep, write_plot_csv, write_rows, ExperimentSpec};
use hopcap::layout::{build_layout, NodeId};
use hopcap::packetsim::{measured_delivery_rate, measured_latency, recommended_periods, run_sim};
use hopcap::schedule::{Flow, Mode};
use hopcap::{Error, Result};

#[derive(Parser)]
#[command(
    name = "hopcap",
    version,
    about = "TDMA line-network capacity and XOR relay simulation"
)]
struct Cli {
    /// Experiment config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set row_separation_m=500`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print node coordinates and the distance matrix.
    Layout {
        #[arg(long)]
        streams: Option<usize>,
    },
    /// SINR, bottlenecks and capacity for one configuration.
    Capacity {
        #[command(flatten)]
        run: RunArgs,
        /// List every reception event.
        #[arg(long)]
        events: bool,
    },
    /// Packet-level simulation of a single route.
    Simulate {
        #[arg(long, default_value = "nc")]
        mode: Mode,
        /// Nodes on the route, including both sources.
        #[arg(long, default_value_t = 5)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        z: usize,
        /// Schedule cycles to simulate.
        #[arg(long)]
        periods: Option<usize>,
        /// Print the slot-by-slot table.
        #[arg(long)]
        trace: bool,
        /// Write the trace as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full sweep over streams, modes, hops and periods.
    Sweep {
        /// CSV destination (overrides the `output` key; default stdout).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write capacity-vs-Z pivot CSV for plotting.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Compare the sweep with the published TR/NC table.
    Table4,
    /// Print the effective configuration.
    Config,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "nc")]
    mode: Mode,
    #[arg(long, default_value_t = 4)]
    z: usize,
    #[arg(long, default_value_t = 4)]
    hops: usize,
    #[arg(long, default_value_t = 1)]
    streams: usize,
}

fn load_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let mut spec = match &cli.config {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::default(),
    };
    for o in &cli.overrides {
        spec.apply_override(o)?;
    }
    Ok(spec)
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    let spec = load_spec(&cli)?;
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Config => {
            spec.validate()?;
            write!(out, "{}", spec.to_config_string())?;
        }
        Command::Layout { streams } => {
            let layout =
                spec.layout_for(streams.unwrap_or(*spec.streams.iter().max().unwrap_or(&1)));
            let g = build_layout(layout)?;
            if !layout.within_validated_range() {
                writeln!(
                    out,
                    "# note: more nodes per stream than the reference experiments used"
                )?;
            }
            writeln!(out, "node      x_m       y_m")?;
            for id in g.node_ids() {
                let (x, y) = g.position(id);
                writeln!(out, "{:<6} {:>8.1} {:>9.1}", id.to_string(), x, y)?;
            }
            let ids: Vec<NodeId> = g.node_ids().collect();
            write!(out, "\n{:<6}", "")?;
            for id in &ids {
                write!(out, " {:>8}", id.to_string())?;
            }
            writeln!(out)?;
            for a in &ids {
                write!(out, "{:<6}", a.to_string())?;
                for b in &ids {
                    write!(out, " {:>8.1}", g.distance(*a, *b))?;
                }
                writeln!(out)?;
            }
        }
        Command::Capacity { run, events } => {
            spec.radio.validate()?;
            let scenario = Scenario {
                layout: spec.layout_for(run.streams),
                radio: spec.radio,
                mode: run.mode,
                z: run.z,
                hops: run.hops,
                phase: spec.phase,
            };
            let report = scenario.analyze()?;
            writeln!(
                out,
                "mode {} Z={} hops={} streams={} (phase {})",
                run.mode, run.z, run.hops, run.streams, spec.phase
            )?;
            for s in &report.streams {
                writeln!(
                    out,
                    "stream {}: forward {:.6} Mbps, reverse {:.6} Mbps, capacity {:.6} Mbps/slot",
                    s.stream + 1,
                    s.forward_bottleneck_bps / 1e6,
                    s.reverse_bottleneck_bps / 1e6,
                    s.capacity_per_timeslot_bps / 1e6
                )?;
                if *events {
                    for e in &s.events {
                        let interferers: Vec<String> = e
                            .event
                            .interferers
                            .iter()
                            .map(ToString::to_string)
                            .collect();
                        writeln!(
                            out,
                            "  slot {:>2} {} -> {} {:<7} sinr {:>10.4} rate {:>9.6} Mbps  interferers [{}]",
                            e.event.slot,
                            e.event.wanted_tx,
                            e.event.receiver,
                            e.event.flow.to_string(),
                            e.sinr,
                            e.rate_bps / 1e6,
                            interferers.join(" ")
                        )?;
                    }
                }
            }
            writeln!(out, "network total {:.6} Mbps/slot", report.total_bps / 1e6)?;
        }
        Command::Simulate {
            mode,
            nodes,
            z,
            periods,
            trace,
            csv,
        } => {
            let periods = periods.unwrap_or_else(|| recommended_periods(*nodes));
            let t = run_sim(*mode, *nodes, *z, periods)?;
            if *trace {
                write!(out, "{}", t.render_table())?;
            }
            if let Some(path) = csv {
                t.write_csv(File::create(path)?)?;
            }
            let delivered = t.deliveries().count();
            writeln!(out, "{} slots, {} deliveries", t.len(), delivered)?;
            match measured_delivery_rate(&t) {
                Ok(rate) => writeln!(out, "steady-state delivery rate {rate} packets/slot")?,
                Err(e) => writeln!(out, "delivery rate unavailable: {e}")?,
            }
            for flow in [Flow::Forward, Flow::Reverse] {
                match measured_latency(&t, flow) {
                    Ok(l) => writeln!(out, "{flow} latency {l} slots")?,
                    Err(e) => writeln!(out, "{flow} latency unavailable: {e}")?,
                }
            }
        }
        Command::Sweep { output: path, plot } => {
            let rows = run_sweep(&spec)?;
            write_rows(&rows, output(path.as_ref().or(spec.output.as_ref()))?)?;
            if let Some(p) = plot {
                write_plot_csv(&rows, File::create(p)?)?;
            }
        }
        Command::Table4 => {
            let rows = run_sweep(&spec)?;
            let report = compare_table4(&rows)?;
            write!(out, "{}", report.render())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
