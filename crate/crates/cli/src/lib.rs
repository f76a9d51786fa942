//! `twoclub` command line: solve, check, gen, ilp and bench.
//!
//! Exit codes: 0 success (optimal, or a valid set for `check`), 1 input or
//! usage error, 2 time limit reached, 3 no solution (or an invalid set for
//! `check`).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twoclub_core::generator::{generate, GenParams};
use twoclub_core::io::{emit, parse, Format, Parsed};
use twoclub_core::oracle::check_solution;
use twoclub_core::{ilp, solve, Limits, Model, ModelSpec, SolveReport, VertexSet};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_TIMEOUT: u8 = 2;
pub const EXIT_NONE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "twoclub", version, about = "Maximum t-robust, t-hereditary and t-connected 2-clubs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a maximum solution
    Solve(SolveArgs),
    /// Verify a vertex set
    Check(CheckArgs),
    /// Write a random instance
    Gen(GenArgs),
    /// Write the hereditary integer program in LP format
    Ilp(IlpArgs),
    /// Solve every line of a suite file and write CSV
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Graph file
    #[arg(long)]
    input: PathBuf,
    /// metis, dimacs, edges or auto
    #[arg(long, default_value = "auto")]
    format: Format,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// robust, hereditary or connected
    #[arg(long)]
    model: Model,
    #[arg(long, allow_negative_numbers = true)]
    t: i64,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec, String> {
        spec_from(self.model, self.t)
    }
}

fn spec_from(model: Model, t: i64) -> Result<ModelSpec, String> {
    let t = u32::try_from(t).map_err(|_| format!("t must be a nonnegative integer, got {t}"))?;
    ModelSpec::new(model, t).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Seconds before giving up with the best set found so far
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    output: OutputKind,
    /// Write the solution here, one original vertex label per line
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Vertex labels, one per line
    #[arg(long)]
    solution: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Lower end of the per-vertex edge probability range
    #[arg(long)]
    a: f64,
    /// Upper end of the per-vertex edge probability range
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "metis")]
    format: Format,
    /// Output file; standard output if absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IlpArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, allow_negative_numbers = true)]
    t: i64,
    /// Output file; standard output if absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Lines of `instance model t`; an instance is a graph file (relative
    /// to the suite) or `gen:n:a:b:seed`
    #[arg(long)]
    suite: PathBuf,
    /// Seconds per run
    #[arg(long)]
    time_limit: Option<f64>,
    /// CSV output; standard output if absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Timeout,
    None,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Timeout => "timeout",
            Status::None => "none",
        }
    }
}

/// Counters of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct CounterRecord {
    pub kernels_built: u64,
    pub kernels_skipped: u64,
    pub branch_nodes: u64,
    pub flow_calls: u64,
    pub initial_bound: usize,
    pub clique_fallback: bool,
    pub rule_firings: BTreeMap<&'static str, u64>,
}

/// One solver run as printed by `solve --output json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub model: Model,
    pub t: u32,
    /// All vertices, isolated ones included.
    pub n: usize,
    /// Vertices with at least one edge.
    pub n_star: usize,
    pub m: usize,
    pub status: Status,
    pub size: Option<usize>,
    /// Wall time including reading the input.
    pub time_s: f64,
    pub timed_out: bool,
    pub verified: bool,
    /// Solution as original labels.
    pub solution: Option<Vec<usize>>,
    pub counters: CounterRecord,
}

impl RunRecord {
    fn new(instance: String, parsed: &Parsed, spec: ModelSpec, report: &SolveReport, time: Duration) -> Self {
        let c = &report.counters;
        let status = match (&report.best, report.timed_out) {
            (_, true) => Status::Timeout,
            (Some(_), false) => Status::Optimal,
            (None, false) => Status::None,
        };
        RunRecord {
            instance,
            model: spec.model(),
            t: spec.t(),
            n: parsed.graph.n(),
            n_star: parsed.graph.non_isolated_count(),
            m: parsed.graph.m(),
            status,
            size: report.best.as_ref().map(|s| s.size),
            time_s: time.as_secs_f64(),
            timed_out: report.timed_out,
            verified: report.best.as_ref().is_some_and(|s| s.verified),
            solution: report
                .best
                .as_ref()
                .map(|s| s.vertices.iter().map(|v| parsed.label(v)).collect()),
            counters: CounterRecord {
                kernels_built: c.kernels_built,
                kernels_skipped: c.kernels_skipped,
                branch_nodes: c.branch_nodes,
                flow_calls: c.flow_calls,
                initial_bound: c.initial_bound,
                clique_fallback: c.clique_fallback,
                rule_firings: c.rule_firings.iter().map(|(r, k)| (r.name(), k)).collect(),
            },
        }
    }

    fn exit_code(&self) -> u8 {
        match self.status {
            Status::Optimal => EXIT_OK,
            Status::Timeout => EXIT_TIMEOUT,
            Status::None => EXIT_NONE,
        }
    }

    fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let size = self.size.map_or("none".to_owned(), |s| s.to_string());
        writeln!(out, "instance  {}", self.instance)?;
        writeln!(out, "model     {}-{}", self.t, self.model)?;
        writeln!(out, "graph     n={} n*={} m={}", self.n, self.n_star, self.m)?;
        writeln!(out, "status    {}", self.status.name())?;
        writeln!(out, "size      {size}")?;
        writeln!(out, "time_s    {:.6}", self.time_s)?;
        writeln!(
            out,
            "search    kernels={} skipped={} nodes={} flows={}",
            self.counters.kernels_built, self.counters.kernels_skipped, self.counters.branch_nodes, self.counters.flow_calls
        )?;
        if let Some(sol) = &self.solution {
            let labels: Vec<String> = sol.iter().map(usize::to_string).collect();
            writeln!(out, "vertices  {}", labels.join(" "))?;
        }
        Ok(())
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Ilp(a) => cmd_ilp(&a, out),
        Command::Bench(a) => cmd_bench(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn read_graph(path: &Path, format: Format) -> Result<Parsed, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text, format).map_err(|e| format!("{}: {e}", path.display()))
}

fn limits(seconds: Option<f64>) -> Result<Limits, String> {
    match seconds {
        None => Ok(Limits::none()),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Limits::time(Duration::from_secs_f64(s))),
        Some(s) => Err(format!("time limit must be a nonnegative number of seconds, got {s}")),
    }
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<u8, String> {
    let spec = a.model.spec()?;
    let limits = limits(a.time_limit)?;
    let start = Instant::now();
    let parsed = read_graph(&a.input.input, a.input.format)?;
    let report = solve(&parsed.graph, spec, &limits);
    let record = RunRecord::new(a.input.input.display().to_string(), &parsed, spec, &report, start.elapsed());

    if let Some(path) = &a.solution_out {
        let body: String = record
            .solution
            .iter()
            .flatten()
            .map(|l| format!("{l}\n"))
            .collect();
        fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    match a.output {
        OutputKind::Json => {
            let json = serde_json::to_string_pretty(&record).expect("serializable record");
            writeln!(out, "{json}").map_err(|e| e.to_string())?;
        }
        OutputKind::Text => record.write_text(out).map_err(|e| e.to_string())?,
    }
    Ok(record.exit_code())
}

fn read_labels(path: &Path, parsed: &Parsed) -> Result<VertexSet, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut vertices = Vec::new();
    for (i, tok) in text.split_whitespace().enumerate() {
        let label: usize = tok
            .parse()
            .map_err(|_| format!("{}: entry {}: `{tok}` is not a vertex label", path.display(), i + 1))?;
        let v = parsed
            .vertex(label)
            .ok_or_else(|| format!("{}: vertex {label} is not in the graph", path.display()))?;
        vertices.push(v);
    }
    Ok(VertexSet::from_unsorted(vertices))
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<u8, String> {
    let spec = a.model.spec()?;
    let parsed = read_graph(&a.input.input, a.input.format)?;
    let set = read_labels(&a.solution, &parsed)?;
    let ok = check_solution(&parsed.graph, &set, spec).map_err(|e| e.to_string())?;
    let verdict = if ok { "valid" } else { "invalid" };
    writeln!(out, "{verdict} {spec} 2-club of size {}", set.len()).map_err(|e| e.to_string())?;
    Ok(if ok { EXIT_OK } else { EXIT_NONE })
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<u8, String> {
    let g = generate(&GenParams {
        n: a.n,
        a: a.a,
        b: a.b,
        seed: a.seed,
    })
    .map_err(|e| e.to_string())?;
    write_output(a.out.as_deref(), &emit(&g, a.format), out)?;
    Ok(EXIT_OK)
}

fn cmd_ilp(a: &IlpArgs, out: &mut dyn Write) -> Result<u8, String> {
    let t = u32::try_from(a.t).map_err(|_| format!("t must be a nonnegative integer, got {}", a.t))?;
    let parsed = read_graph(&a.input.input, a.input.format)?;
    write_output(a.out.as_deref(), &ilp::emit_hereditary_lp(&parsed.graph, t), out)?;
    Ok(EXIT_OK)
}

const BENCH_COLUMNS: [&str; 7] = ["instance", "model", "t", "size", "time_s", "timed_out", "nodes"];

/// One CSV row, in [`BENCH_COLUMNS`] order.
#[derive(Debug, Serialize)]
struct BenchRow {
    instance: String,
    model: String,
    t: String,
    size: String,
    time_s: String,
    timed_out: bool,
    nodes: u64,
}

struct SuiteEntry {
    line: usize,
    instance: String,
    model: String,
    t: String,
}

fn parse_suite(text: &str) -> Vec<Result<SuiteEntry, (usize, String)>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                return None;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            Some(match fields[..] {
                [instance, model, t] => Ok(SuiteEntry {
                    line: i + 1,
                    instance: instance.to_owned(),
                    model: model.to_owned(),
                    t: t.to_owned(),
                }),
                _ => Err((i + 1, line.to_owned())),
            })
        })
        .collect()
}

fn load_instance(name: &str, base: &Path) -> Result<Parsed, String> {
    if let Some(rest) = name.strip_prefix("gen:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [n, a, b, seed] = parts[..] else {
            return Err(format!("`{name}`: expected gen:n:a:b:seed"));
        };
        let bad = |what: &str| format!("`{name}`: bad {what}");
        let params = GenParams {
            n: n.parse().map_err(|_| bad("n"))?,
            a: a.parse().map_err(|_| bad("a"))?,
            b: b.parse().map_err(|_| bad("b"))?,
            seed: seed.parse().map_err(|_| bad("seed"))?,
        };
        let g = generate(&params).map_err(|e| format!("`{name}`: {e}"))?;
        return parse(&emit(&g, Format::Metis), Format::Metis).map_err(|e| e.to_string());
    }
    let path = Path::new(name);
    let path = if path.is_relative() { base.join(path) } else { path.to_path_buf() };
    read_graph(&path, Format::Auto)
}

fn bench_row(entry: &SuiteEntry, base: &Path, limits: &Limits) -> Result<BenchRow, String> {
    let model = entry.model.parse::<Model>().map_err(|e| e.to_string())?;
    let t: i64 = entry.t.parse().map_err(|_| format!("bad t `{}`", entry.t))?;
    let spec = spec_from(model, t)?;
    let start = Instant::now();
    let parsed = load_instance(&entry.instance, base)?;
    let report = solve(&parsed.graph, spec, limits);
    let elapsed = start.elapsed();
    let time = match (report.timed_out, limits.time_limit) {
        (true, Some(limit)) => limit,
        _ => elapsed,
    };
    Ok(BenchRow {
        instance: entry.instance.clone(),
        model: model.to_string(),
        t: spec.t().to_string(),
        size: report.best.map_or("none".to_owned(), |s| s.size.to_string()),
        time_s: format!("{:.6}", time.as_secs_f64()),
        timed_out: report.timed_out,
        nodes: report.counters.branch_nodes,
    })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, String> {
    let limits = limits(a.time_limit)?;
    let text = fs::read_to_string(&a.suite).map_err(|e| format!("{}: {e}", a.suite.display()))?;
    let base = a.suite.parent().unwrap_or(Path::new(".")).to_path_buf();

    let mut buf = Vec::new();
    let mut failures = 0;
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        w.write_record(BENCH_COLUMNS).map_err(|e| e.to_string())?;
        for entry in parse_suite(&text) {
            let row = match entry {
                Ok(e) => bench_row(&e, &base, &limits).unwrap_or_else(|msg| {
                    failures += 1;
                    let _ = writeln!(err, "error: suite line {}: {msg}", e.line);
                    BenchRow {
                        instance: e.instance,
                        model: e.model,
                        t: e.t,
                        size: "error".into(),
                        time_s: String::new(),
                        timed_out: false,
                        nodes: 0,
                    }
                }),
                Err((line, content)) => {
                    failures += 1;
                    let _ = writeln!(err, "error: suite line {line}: expected `instance model t`");
                    BenchRow {
                        instance: content,
                        model: String::new(),
                        t: String::new(),
                        size: "error".into(),
                        time_s: String::new(),
                        timed_out: false,
                        nodes: 0,
                    }
                }
            };
            w.serialize(row).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
        }
    }
    write_output(a.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"), out)?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_ERROR })
}
