//! `julienne` — partition task-graph applications into energy-bounded bursts
//! and replay them against harvested-power traces.
//!
//! Exit codes: 0 success, 1 infeasible bound or failed consistency check,
//! 2 input errors (unreadable files, parse errors, bad flags).

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use julienne_core::{
    adl, bench, build_cost_table, optimal_partition, partition_from_lines, partition_to_lines,
    q_min, simulate, sweep, Application, EmuConfig, EnergyModel, Feasibility, Infeasible,
    Partition, PartitionReport, PowerTrace, ResidualPolicy, SingleTaskMode, Solution, SweepGrid,
    SweepPoint,
};
use serde_json::json;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "julienne",
    version,
    about = "Energy-burst partitioning for intermittently powered task graphs"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized generators.
    #[arg(long, global = true, env = "JULIENNE_SEED", default_value_t = 0)]
    seed: u64,

    /// Cap on worker threads for parallel work (sweeps, cost tables).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Residual {
    Keep,
    Drain,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Thermal,
    Visual,
    Chain,
    Fanin,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Scheme {
    SingleTask,
    Whole,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RetainMode {
    Live,
    Total,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an application file and report whether it is well formed.
    Validate {
        /// Application file (`-` for stdin).
        app: String,
    },
    /// Compute the minimum-energy partition under a per-burst bound.
    Partition {
        app: String,
        /// Energy bound per burst; plain numbers are uJ, `mJ`/`J` suffixes
        /// are accepted (e.g. `132mJ`).
        #[arg(long, value_parser = parse_energy)]
        qmax: f64,
        /// Dump the pruned burst-cost table as CSV to this file.
        #[arg(long)]
        dump_table: Option<PathBuf>,
        /// Save the burst list (loadable by `simulate --partition`).
        #[arg(long)]
        save_partition: Option<PathBuf>,
    },
    /// Compute the minimum storage capacity and its witness partition.
    Qmin { app: String },
    /// Partition across a grid of bounds and report one row per bound.
    Sweep {
        app: String,
        /// Comma-separated bounds (uJ or suffixed).
        #[arg(long, value_delimiter = ',', value_parser = parse_energy, conflicts_with = "auto")]
        qmax_list: Option<Vec<f64>>,
        /// Log-spaced grid from Q_min to 1.05x the whole-application burst.
        #[arg(long)]
        auto: bool,
        /// Number of points in the auto grid.
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Replay a partition against a harvested-power trace.
    Simulate {
        app: String,
        /// Burst-list file, or an energy bound to partition with on the fly.
        #[arg(long)]
        partition: String,
        /// Power trace CSV with header `time_s,power_uW`.
        #[arg(long)]
        trace: PathBuf,
        /// Energy buffer capacity.
        #[arg(long, value_parser = parse_energy)]
        capacity: f64,
        /// Charge already in the buffer at time zero.
        #[arg(long, value_parser = parse_energy, default_value = "0")]
        initial: f64,
        /// Fraction of harvested power that reaches the buffer.
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        /// What happens to charge left after a burst.
        #[arg(long, value_enum, default_value_t = Residual::Keep)]
        residual: Residual,
    },
    /// Generate a benchmark application as `.adl`.
    Bench {
        #[arg(long, value_enum)]
        variant: Variant,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Task count (chain, random).
        #[arg(long, default_value_t = 8)]
        tasks: usize,
        /// Producer count (fanin).
        #[arg(long, default_value_t = 5)]
        producers: usize,
        /// Packet size (chain, fanin).
        #[arg(long, default_value_t = 1024)]
        packet_bytes: u64,
        /// Per-task energy in uJ (chain, fanin).
        #[arg(long, default_value_t = 500.0)]
        task_energy: f64,
        /// Packet size cap (random).
        #[arg(long, default_value_t = 4096)]
        max_packet_bytes: u64,
        /// Task energy cap in uJ (random).
        #[arg(long, default_value_t = 500.0)]
        max_energy: f64,
        /// Reads per task cap (random).
        #[arg(long, default_value_t = 3)]
        max_reads: usize,
        /// Normalized-image size override (thermal, visual).
        #[arg(long)]
        norm_bytes: Option<u64>,
        /// CNN result packet size override (thermal, visual).
        #[arg(long)]
        result_bytes: Option<u64>,
        /// Ranked-list packet size override (thermal, visual).
        #[arg(long)]
        ranked_bytes: Option<u64>,
    },
    /// Evaluate a fixed partitioning scheme.
    Baseline {
        app: String,
        #[arg(long, value_enum)]
        scheme: Scheme,
        /// Single-task only: save and restore live state instead of tracking
        /// dependencies.
        #[arg(long)]
        retain_all: bool,
        /// What "all state" means under --retain-all.
        #[arg(long, value_enum, default_value_t = RetainMode::Live)]
        retain_mode: RetainMode,
    },
}

fn parse_energy(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let table: [(&str, f64); 7] = [
        ("uJ", 1.0),
        ("uj", 1.0),
        ("µJ", 1.0),
        ("mJ", 1e3),
        ("mj", 1e3),
        ("J", 1e6),
        ("j", 1e6),
    ];
    let (digits, scale) = table
        .iter()
        .find_map(|(suffix, scale)| t.strip_suffix(suffix).map(|d| (d, *scale)))
        .unwrap_or((t, 1.0));
    let value: f64 = digits
        .trim()
        .parse()
        .map_err(|_| format!("invalid energy '{s}'"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("energy '{s}' must be finite and non-negative"));
    }
    Ok(value * scale)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    match cli.command {
        Command::Validate { app } => cmd_validate(&app),
        Command::Partition {
            app,
            qmax,
            dump_table,
            save_partition,
        } => cmd_partition(&app, qmax, dump_table, save_partition, format),
        Command::Qmin { app } => cmd_qmin(&app, format),
        Command::Sweep {
            app,
            qmax_list,
            auto,
            points,
        } => cmd_sweep(&app, qmax_list, auto, points, format),
        Command::Simulate {
            app,
            partition,
            trace,
            capacity,
            initial,
            efficiency,
            residual,
        } => cmd_simulate(
            &app, &partition, &trace, capacity, initial, efficiency, residual, format,
        ),
        Command::Bench {
            variant,
            out,
            tasks,
            producers,
            packet_bytes,
            task_energy,
            max_packet_bytes,
            max_energy,
            max_reads,
            norm_bytes,
            result_bytes,
            ranked_bytes,
        } => cmd_bench(BenchArgs {
            variant,
            out,
            tasks,
            producers,
            packet_bytes,
            task_energy,
            max_packet_bytes,
            max_energy,
            max_reads,
            norm_bytes,
            result_bytes,
            ranked_bytes,
            seed: cli.seed,
        }),
        Command::Baseline {
            app,
            scheme,
            retain_all,
            retain_mode,
        } => cmd_baseline(&app, scheme, retain_all, retain_mode, format),
    }
}

fn read_source(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        Ok(buf)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_app(path: &str) -> Result<Application> {
    let text = read_source(path)?;
    match adl::parse(&text) {
        Ok(output) => {
            for w in &output.warnings {
                eprintln!("{path}: warning: {w}");
            }
            Ok(output.app)
        }
        Err(errors) => {
            let listing: Vec<String> = errors.iter().map(|e| format!("{path}:{e}")).collect();
            Err(anyhow!("{}", listing.join("\n")))
        }
    }
}

fn cmd_validate(path: &str) -> Result<ExitCode> {
    let app = load_app(path)?;
    println!(
        "ok: {} tasks, {} packets, E_app={} uJ",
        app.n_tasks(),
        app.n_packets(),
        app.e_app()
    );
    Ok(ExitCode::SUCCESS)
}

fn report_json(report: &PartitionReport, extra: &[(&str, serde_json::Value)]) -> serde_json::Value {
    let mut value = serde_json::to_value(report).expect("report serializes");
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert("schema_version".into(), json!(1));
    for (k, v) in extra {
        obj.insert((*k).to_string(), v.clone());
    }
    value
}

fn print_report(app: &Application, report: &PartitionReport, format: Format, header: &str) {
    match format {
        Format::Text => {
            let overhead = report.e_total - report.e_app;
            println!("{header}");
            println!("bursts: {}", report.n_bursts);
            println!(
                "e_total: {} uJ (startup {} + read {} + write {} + app {})",
                report.e_total,
                report.e_startup_total,
                report.e_read_total,
                report.e_write_total,
                report.e_app
            );
            if report.e_app > 0.0 {
                println!(
                    "overhead: {} uJ ({:.4}% of E_app)",
                    overhead,
                    overhead / report.e_app * 100.0
                );
            }
            println!("q_needed: {} uJ", report.q_needed);
            println!(
                "bytes: loaded {} / stored {}",
                report.bytes_loaded, report.bytes_stored
            );
            print!("{}", partition_to_lines(report));
        }
        Format::Json => {
            let _ = app;
            println!(
                "{}",
                serde_json::to_string_pretty(&report_json(report, &[])).expect("json")
            );
        }
        Format::Csv => {
            println!("burst,i,j,energy_uJ,load_B,store_B");
            for (idx, b) in report.per_burst.iter().enumerate() {
                println!(
                    "{},{},{},{},{},{}",
                    idx + 1,
                    b.i,
                    b.j,
                    b.energy,
                    b.bytes_loaded,
                    b.bytes_stored
                );
            }
        }
    }
}

fn cmd_partition(
    path: &str,
    qmax: f64,
    dump_table: Option<PathBuf>,
    save_partition: Option<PathBuf>,
    format: Format,
) -> Result<ExitCode> {
    let app = load_app(path)?;
    if let Some(table_path) = &dump_table {
        let table = build_cost_table(&app, qmax)?;
        let mut buf = Vec::new();
        table.dump_csv(&mut buf)?;
        fs::write(table_path, buf).with_context(|| format!("writing {}", table_path.display()))?;
    }
    match optimal_partition(&app, qmax)? {
        Feasibility::Feasible(sol) => {
            if let Some(out) = &save_partition {
                fs::write(out, partition_to_lines(&sol.report))
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            if format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report_json(
                        &sol.report,
                        &[("qmax_uJ", json!(qmax)), ("feasible", json!(true))]
                    ))
                    .expect("json")
                );
            } else {
                print_report(&app, &sol.report, format, &format!("qmax: {qmax} uJ"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Feasibility::Infeasible(evidence) => {
            report_infeasible(qmax, evidence, format);
            Ok(ExitCode::from(1))
        }
    }
}

fn report_infeasible(qmax: f64, evidence: Infeasible, format: Format) {
    eprintln!("infeasible at qmax={qmax} uJ: {evidence}");
    if format == Format::Json {
        let mut obj = serde_json::Map::new();
        obj.insert("schema_version".into(), json!(1));
        obj.insert("qmax_uJ".into(), json!(qmax));
        obj.insert("feasible".into(), json!(false));
        match evidence {
            Infeasible::QMin { q_min } => {
                obj.insert("q_min".into(), json!(q_min));
            }
            Infeasible::Blocked { task } => {
                obj.insert("blocked_task".into(), json!(task));
            }
        }
        println!("{}", serde_json::to_string_pretty(&obj).expect("json"));
    }
}

fn cmd_qmin(path: &str, format: Format) -> Result<ExitCode> {
    let app = load_app(path)?;
    let result = q_min(&app)?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report_json(
                &result.solution.report,
                &[("q_min", json!(result.q_min))]
            ))
            .expect("json")
        ),
        _ => {
            println!("q_min: {} uJ", result.q_min);
            print_report(
                &app,
                &result.solution.report,
                format,
                "witness partition at q_min:",
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct SweepRow {
    q_max: f64,
    n_bursts: Option<usize>,
    e_total: Option<f64>,
    overhead: Option<f64>,
    overhead_pct: Option<f64>,
}

fn sweep_rows(app: &Application, points: &[SweepPoint]) -> Vec<SweepRow> {
    let e_app = app.e_app();
    points
        .iter()
        .map(|p| match &p.result {
            Some(Solution { report, .. }) => SweepRow {
                q_max: p.q_max,
                n_bursts: Some(report.n_bursts),
                e_total: Some(report.e_total),
                overhead: Some(report.e_total - e_app),
                overhead_pct: (e_app > 0.0).then(|| (report.e_total - e_app) / e_app * 100.0),
            },
            None => SweepRow {
                q_max: p.q_max,
                n_bursts: None,
                e_total: None,
                overhead: None,
                overhead_pct: None,
            },
        })
        .collect()
}

fn cmd_sweep(
    path: &str,
    qmax_list: Option<Vec<f64>>,
    auto: bool,
    points: usize,
    format: Format,
) -> Result<ExitCode> {
    let app = load_app(path)?;
    let grid = match (qmax_list, auto) {
        (Some(values), false) => SweepGrid::Explicit(values),
        (None, true) => SweepGrid::Auto { points },
        (None, false) => bail!("pass --qmax-list <values> or --auto"),
        (Some(_), true) => unreachable!("clap rejects the combination"),
    };
    let result = sweep(&app, &grid)?;
    let rows = sweep_rows(&app, &result);
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let optn = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    match format {
        Format::Csv | Format::Text => {
            println!("qmax_uJ,n_bursts,e_total_uJ,overhead_uJ,overhead_pct,feasible");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{}",
                    r.q_max,
                    optn(r.n_bursts),
                    opt(r.e_total),
                    opt(r.overhead),
                    opt(r.overhead_pct),
                    r.n_bursts.is_some()
                );
            }
        }
        Format::Json => {
            let points: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "qmax_uJ": r.q_max,
                        "n_bursts": r.n_bursts,
                        "e_total_uJ": r.e_total,
                        "overhead_uJ": r.overhead,
                        "overhead_pct": r.overhead_pct,
                        "feasible": r.n_bursts.is_some(),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "schema_version": 1,
                    "points": points,
                }))
                .expect("json")
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &str,
    partition_arg: &str,
    trace_path: &PathBuf,
    capacity: f64,
    initial: f64,
    efficiency: f64,
    residual: Residual,
    format: Format,
) -> Result<ExitCode> {
    let app = load_app(path)?;
    let partition = resolve_partition(&app, partition_arg)?;
    let partition = match partition {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    let trace_text = fs::read_to_string(trace_path)
        .with_context(|| format!("reading {}", trace_path.display()))?;
    let trace = PowerTrace::from_csv(&trace_text)?;
    let mut emu = EmuConfig::new(capacity);
    emu.initial_charge = initial;
    emu.harvest_efficiency = efficiency;
    emu.residual_policy = match residual {
        Residual::Keep => ResidualPolicy::Keep,
        Residual::Drain => ResidualPolicy::Drain,
    };
    let report = simulate(&app, &partition, &trace, &emu)?;
    match format {
        Format::Text => {
            println!(
                "completed: {}{}",
                report.completed,
                report
                    .completion_time_s
                    .map(|t| format!(" at {t} s"))
                    .unwrap_or_default()
            );
            println!(
                "energy: harvested {} uJ, consumed {} uJ, discarded {} uJ, buffer {} uJ",
                report.harvested_uj,
                report.consumed_uj,
                report.discarded_uj,
                report.buffer_final_uj
            );
            println!("consistency: {}", report.consistency);
            print!("{}", report.to_csv());
        }
        Format::Csv => print!("{}", report.to_csv()),
        Format::Json => {
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value
                .as_object_mut()
                .expect("object")
                .insert("schema_version".into(), json!(1));
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
    }
    if report.consistency.is_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

/// `--partition` accepts an energy bound (partition on the fly) or a
/// burst-list file path.
fn resolve_partition(app: &Application, arg: &str) -> Result<Result<Partition, ExitCode>> {
    if let Ok(qmax) = parse_energy(arg) {
        return match optimal_partition(app, qmax)? {
            Feasibility::Feasible(sol) => Ok(Ok(sol.partition)),
            Feasibility::Infeasible(evidence) => {
                eprintln!("infeasible at qmax={qmax} uJ: {evidence}");
                Ok(Err(ExitCode::from(1)))
            }
        };
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading partition file {arg}"))?;
    Ok(Ok(partition_from_lines(&text, app.n_tasks())?))
}

struct BenchArgs {
    variant: Variant,
    out: Option<PathBuf>,
    tasks: usize,
    producers: usize,
    packet_bytes: u64,
    task_energy: f64,
    max_packet_bytes: u64,
    max_energy: f64,
    max_reads: usize,
    norm_bytes: Option<u64>,
    result_bytes: Option<u64>,
    ranked_bytes: Option<u64>,
    seed: u64,
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let headcount_params = {
        let mut p = bench::HeadcountParams::default();
        if let Some(v) = args.norm_bytes {
            p.norm_image_bytes = v;
        }
        if let Some(v) = args.result_bytes {
            p.result_bytes = v;
        }
        if let Some(v) = args.ranked_bytes {
            p.ranked_bytes = v;
        }
        p
    };
    let spec = match args.variant {
        Variant::Thermal => bench::BenchSpec::Thermal(headcount_params),
        Variant::Visual => bench::BenchSpec::Visual(headcount_params),
        Variant::Chain => bench::BenchSpec::Chain {
            tasks: args.tasks,
            packet_bytes: args.packet_bytes,
            task_energy: args.task_energy,
            model: EnergyModel::fram(),
        },
        Variant::Fanin => bench::BenchSpec::FanIn {
            producers: args.producers,
            packet_bytes: args.packet_bytes,
            task_energy: args.task_energy,
            model: EnergyModel::fram(),
        },
        Variant::Random => bench::BenchSpec::Random(bench::RandomParams {
            tasks: args.tasks,
            seed: args.seed,
            max_packet_bytes: args.max_packet_bytes,
            max_task_energy: args.max_energy,
            max_reads: args.max_reads,
            ..bench::RandomParams::default()
        }),
    };
    let generated = bench::gen_synthetic(&spec)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &generated.adl)
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "wrote {}: {} tasks, {} packets, E_app={} uJ",
                path.display(),
                generated.app.n_tasks(),
                generated.app.n_packets(),
                generated.app.e_app()
            );
        }
        None => print!("{}", generated.adl),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_baseline(
    path: &str,
    scheme: Scheme,
    retain_all: bool,
    retain_mode: RetainMode,
    format: Format,
) -> Result<ExitCode> {
    let app = load_app(path)?;
    let (sol, label) = match scheme {
        Scheme::Whole => {
            if retain_all {
                bail!("--retain-all applies only to --scheme single-task");
            }
            (julienne_core::baseline_whole(&app), "whole application")
        }
        Scheme::SingleTask => {
            let mode = if retain_all {
                match retain_mode {
                    RetainMode::Live => SingleTaskMode::RetainLive,
                    RetainMode::Total => SingleTaskMode::RetainTotal,
                }
            } else {
                SingleTaskMode::Optimized
            };
            (
                julienne_core::baseline_single_task(&app, mode),
                "single task",
            )
        }
    };
    if format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report_json(&sol.report, &[("scheme", json!(label))]))
                .expect("json")
        );
    } else {
        print_report(&app, &sol.report, format, &format!("scheme: {label}"));
    }
    Ok(ExitCode::SUCCESS)
}
