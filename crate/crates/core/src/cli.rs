//! Command-line front end. `main` only parses arguments and maps errors to
//! an exit status; everything else is here so it can be driven from tests.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divergence::divergence_array_at;
use crate::error::{Error, Result};
use crate::format::{load_index, read_batch, save_index, write_batch};
use crate::index::{build_full_arrays, build_index, PbwtIndex};
use crate::panel::{parse_panel, parse_queries, HaplotypePanel};
use crate::prefix::prefix_array_at;
use crate::report::{
    accumulate, compute_threshold, flush_endpoints, BatchPolicy, EndpointRequest, ReportEntry,
};
use crate::smem::{collect_records, SmemBatchInput};
use crate::stats::OpCounts;
use crate::verify::{
    check_index, check_sweep, random_panel, random_queries, verify_panel, PanelCheck,
};

#[derive(Debug, Parser)]
#[command(
    name = "pbwt-batch",
    version,
    about = "Batched PBWT prefix-array reporting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from a panel file.
    Build(BuildArgs),
    /// Report the haplotypes of every SMEM of every query.
    Query(QueryArgs),
    /// Print one prefix array or absolute divergence array.
    Dump(DumpArgs),
    /// Check the sweeps against reference arrays on a panel and random panels.
    Verify(VerifyArgs),
    /// Report operation counts for a query workload.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Index file to write.
    #[arg(short, long, visible_short_alias = 'x')]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Interval,
    Endpoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Pa,
    Da,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(short = 'x', long)]
    pub index: PathBuf,
    /// Panel file; the reference SMEM finder needs it.
    #[arg(short, long, required_unless_present = "batch")]
    pub input: Option<PathBuf>,
    #[arg(short, long, required_unless_present = "batch")]
    pub queries: Option<PathBuf>,
    /// Also write the collected records as a batch file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Answer a previously written batch file instead of finding SMEMs.
    #[arg(long, conflicts_with_all = ["input", "queries", "output"])]
    pub batch: Option<PathBuf>,
    #[arg(long)]
    pub batch_threshold: Option<u64>,
    #[arg(long)]
    pub with_starts: bool,
    #[arg(long, value_enum, default_value_t = Mode::Interval)]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(short = 'x', long)]
    pub index: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::Pa)]
    pub which: Which,
    #[arg(long)]
    pub column: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Index file to check against the panel.
    #[arg(short = 'x', long, requires = "input")]
    pub index: Option<PathBuf>,
    #[arg(short, long)]
    pub queries: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Query file; random queries are drawn from the panel when absent.
    #[arg(short, long)]
    pub queries: Option<PathBuf>,
    /// Number of random queries.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub batch_threshold: Option<u64>,
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn load_panel(path: &Path) -> Result<HaplotypePanel> {
    parse_panel(&read_text(path)?)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Build(args) => cmd_build(&args, out),
        Command::Query(args) => cmd_query(&args, out),
        Command::Dump(args) => cmd_dump(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    }
}

pub fn cmd_build(args: &BuildArgs, out: &mut dyn Write) -> Result<()> {
    let panel = load_panel(&args.input)?;
    let index = build_index(&panel);
    save_index(&args.output, &index)?;
    writeln!(
        out,
        "h={} l={} sigma={} r={} B={}",
        index.height(),
        index.length(),
        index.sigma(),
        index.runs(),
        compute_threshold(index.runs(), index.height() as u64)
    )?;
    Ok(())
}

fn write_entries(out: &mut dyn Write, entries: &[ReportEntry], with_starts: bool) -> Result<()> {
    let mut w = BufWriter::new(out);
    for e in entries {
        write!(w, "{}\t{}\t{}", e.query_id, e.end_col, e.haplotype_id)?;
        if with_starts {
            match e.start_col {
                Some(s) => write!(w, "\t{}", s)?,
                None => write!(w, "\t.")?,
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the reporting pipeline on an already loaded index, panel and queries.
pub fn query_entries(
    index: &PbwtIndex,
    panel: &HaplotypePanel,
    queries_text: &str,
    policy: BatchPolicy,
    mode: Mode,
    with_starts: bool,
) -> Result<(SmemBatchInput, Vec<ReportEntry>)> {
    if index.height() != panel.height() || index.length() != panel.length() {
        return Err(Error::State(format!(
            "index is {}x{} but panel is {}x{}",
            index.height(),
            index.length(),
            panel.height(),
            panel.length()
        )));
    }
    let queries = parse_queries(queries_text, panel.length())?;
    let arrays = build_full_arrays(panel);
    let batch = collect_records(panel, &arrays, &queries, with_starts)?;
    let entries = match mode {
        Mode::Interval => accumulate(index, policy, batch.records.iter().copied())?.entries,
        Mode::Endpoints => {
            let requests: Vec<_> = batch
                .records
                .iter()
                .map(|r| EndpointRequest::from_record(r, &arrays))
                .collect();
            let b = policy.threshold(index).min(usize::MAX as u64) as usize;
            let mut entries = Vec::new();
            for chunk in requests.chunks(b.max(1)) {
                entries.extend(flush_endpoints(index, chunk)?.entries);
            }
            entries
        }
    };
    Ok((batch, entries))
}

pub fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Result<()> {
    let index = load_index(&args.index)?;
    let policy = BatchPolicy {
        threshold_override: args.batch_threshold.map(|b| b.max(1)),
    };

    if let Some(batch_path) = &args.batch {
        if args.mode == Mode::Endpoints {
            return Err(Error::State(
                "endpoints mode needs the panel to find first entries".into(),
            ));
        }
        let batch = read_batch(&mut fs::File::open(batch_path)?, args.with_starts)?;
        let entries = accumulate(&index, policy, batch.records)?.entries;
        return write_entries(out, &entries, args.with_starts);
    }

    let (Some(panel_path), Some(queries_path)) = (&args.input, &args.queries) else {
        return Err(Error::State("query needs --input and --queries".into()));
    };
    let panel = load_panel(panel_path)?;
    let text = read_text(queries_path)?;
    let (batch, entries) =
        query_entries(&index, &panel, &text, policy, args.mode, args.with_starts)?;
    if let Some(path) = &args.output {
        let mut w = BufWriter::new(fs::File::create(path)?);
        write_batch(&mut w, &batch)?;
        w.flush()?;
    }
    write_entries(out, &entries, args.with_starts)
}

pub fn cmd_dump(args: &DumpArgs, out: &mut dyn Write) -> Result<()> {
    let index = load_index(&args.index)?;
    let line = match args.which {
        Which::Pa => join(prefix_array_at(&index, args.column)?),
        Which::Da => join(divergence_array_at(&index, args.column)?),
    };
    writeln!(out, "{}", line)?;
    Ok(())
}

fn join<T: ToString>(values: Vec<T>) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn summarize(out: &mut dyn Write, label: &str, panels: usize, total: &PanelCheck) -> Result<()> {
    writeln!(
        out,
        "{} panels={} r={} records={} K={} {} report_walk_steps={}",
        label,
        panels,
        total.runs,
        total.records,
        total.reported,
        total.sweep,
        total.report.walk_steps
    )?;
    Ok(())
}

fn add(total: &mut PanelCheck, c: &PanelCheck) {
    total.runs += c.runs;
    total.records += c.records;
    total.reported += c.reported;
    total.sweep += c.sweep;
    total.report += c.report;
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let mut total = PanelCheck::default();
    let mut panels = 0;

    if let Some(path) = &args.input {
        let panel = load_panel(path)?;
        if let Some(index_path) = &args.index {
            let index = load_index(index_path)?;
            let arrays = build_full_arrays(&panel);
            check_index(&panel, &index, &arrays)
                .and_then(|_| check_sweep(&index, &arrays).map(|_| ()))
                .map_err(|e| Error::Corruption(format!("index does not match panel: {}", e)))?;
            writeln!(out, "index ok")?;
        }
        let queries = match &args.queries {
            Some(q) => parse_queries(&read_text(q)?, panel.length())?,
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                random_queries(&mut rng, &panel, 8)
            }
        };
        let check = verify_panel(&panel, &queries)?;
        summarize(out, "panel", 1, &check)?;
        add(&mut total, &check);
        panels += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for trial in 0..args.trials {
        let h = rng.gen_range(1..=32);
        let l = rng.gen_range(0..=64);
        let sigma = rng.gen_range(2..=3);
        let panel = random_panel(&mut rng, h, l, sigma);
        let queries = random_queries(&mut rng, &panel, 5);
        let check = verify_panel(&panel, &queries).map_err(|e| {
            Error::Mismatch(format!(
                "trial {} (seed {}): {}\npanel:\n{}queries:\n{}",
                trial,
                args.seed,
                e,
                panel.to_text(),
                queries.to_text()
            ))
        })?;
        add(&mut total, &check);
        panels += 1;
    }
    summarize(out, "total", panels, &total)?;
    writeln!(out, "PASS")?;
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let panel = load_panel(&args.input)?;
    let queries = match &args.queries {
        Some(q) => parse_queries(&read_text(q)?, panel.length())?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            random_queries(&mut rng, &panel, args.trials)
        }
    };

    let t = Instant::now();
    let index = build_index(&panel);
    let build_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let sweep = crate::divergence::sweep_with_divergence(&index, |_, _, _, _| Ok(()))?;
    let sweep_ms = t.elapsed().as_secs_f64() * 1e3;

    let arrays = build_full_arrays(&panel);
    let batch = collect_records(&panel, &arrays, &queries, false)?;
    let policy = BatchPolicy {
        threshold_override: args.batch_threshold.map(|b| b.max(1)),
    };
    let t = Instant::now();
    let acc = accumulate(&index, policy, batch.records.iter().copied())?;
    let report_ms = t.elapsed().as_secs_f64() * 1e3;

    let r = index.runs();
    let k = acc.entries.len() as u64;
    let records = batch.records.len() as u64;
    let per_record = if records > 0 {
        k as f64 / records as f64
    } else {
        0.0
    };
    let profitable = if r >= 2 && index.height() >= 2 {
        (r as f64).log2() / (index.height() as f64).log2()
    } else {
        0.0
    };
    let report_counts: OpCounts = acc.counts;
    writeln!(
        out,
        "h={} l={} sigma={} r={} n={} B={}",
        index.height(),
        index.length(),
        index.sigma(),
        r,
        panel.size(),
        policy.threshold(&index)
    )?;
    writeln!(out, "sweep {}", sweep)?;
    writeln!(
        out,
        "report queries={} records={} flushes={} K={} K/r={:.4} K/records={:.3} lg(r)/lg(h)={:.3} {}",
        queries.len(),
        records,
        acc.flushes,
        k,
        if r > 0 { k as f64 / r as f64 } else { 0.0 },
        per_record,
        profitable,
        report_counts
    )?;
    writeln!(
        out,
        "time_ms build={:.3} sweep={:.3} report={:.3}",
        build_ms, sweep_ms, report_ms
    )?;
    Ok(())
}
