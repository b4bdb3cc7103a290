//! `polylab`: compute entanglement measures, run verification campaigns and
//! grid scans, writing CSV and JSON artifacts.
//!
//! Exit codes: 0 success, 1 violation found, 2 usage or domain error, 3 I/O error.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use polylab::format::scan_csv;
use polylab::lemmafn::{Axis, DomainMode};
use polylab::measures::{measure_registry, MeasureInput};
use polylab::qstate::State;
use polylab::roof::RoofConfig;
use polylab::scans::{scan_registry, ScanRequest};
use polylab::verify::{run_campaign, CampaignConfig, Mode, StateKind};

use manifest::RunManifest;

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<polylab::Error> for Failure {
    fn from(e: polylab::Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

#[derive(Parser, Debug)]
#[command(
    name = "polylab",
    version,
    about = "Few-qubit entanglement numerics and polygamy checks"
)]
struct Cli {
    /// Worker threads for campaigns and scans (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one measure and print its value.
    Compute(ComputeArgs),
    /// Run a seeded campaign for one inequality.
    Verify(VerifyArgs),
    /// Evaluate a scan over a (q, s) grid.
    Scan(ScanArgs),
    /// List registered measures, inequalities and scans.
    List,
}

#[derive(Args, Debug, Default)]
struct RoofFlags {
    /// Restarts of the roof optimizer.
    #[arg(long)]
    restarts: Option<usize>,
    /// Decomposition size (default min(r^2, 16), at least the rank r).
    #[arg(long)]
    cardinality: Option<usize>,
    /// Sweep limit per restart.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Seed of the roof optimizer restarts.
    #[arg(long)]
    roof_seed: Option<u64>,
}

impl RoofFlags {
    fn apply(&self, roof: &mut RoofConfig) {
        if let Some(r) = self.restarts {
            roof.restarts = r;
        }
        if self.cardinality.is_some() {
            roof.cardinality = self.cardinality;
        }
        if let Some(m) = self.max_iters {
            roof.max_iters = m;
        }
        if let Some(s) = self.roof_seed {
            roof.seed = s;
        }
    }
}

#[derive(Args, Debug)]
struct ComputeArgs {
    /// Measure name (see `polylab list`).
    measure: String,
    /// State file: {"n_qubits", "amplitudes"} or {"labels", "matrix"}.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Argument of f_qs and calE.
    #[arg(long)]
    x: Option<f64>,
    /// Qubit labels kept before taking unified_entropy, e.g. `0,2`.
    #[arg(long, value_delimiter = ',')]
    subsystem: Option<Vec<usize>>,
    /// JSON roof configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    roof: RoofFlags,
    /// Also write the result with its manifest as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Inequality name (see `polylab list`).
    inequality: String,
    /// JSON campaign configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    qubits: Option<usize>,
    /// Single (q, s) point; `--s` defaults to 1 when only `--q` is given.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, requires = "q")]
    s: Option<f64>,
    /// Additional or replacement points as `q,s`; repeatable.
    #[arg(long = "point", value_parser = parse_point)]
    points: Vec<[f64; 2]>,
    /// analytic, variational or hybrid.
    #[arg(long)]
    mode: Option<Mode>,
    /// Campaign seed; falls back to POLYLAB_SEED, then the config file.
    #[arg(long, env = "POLYLAB_SEED")]
    seed: Option<u64>,
    /// Sample induced mixed states of this rank instead of Haar pure states.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    focus: Option<usize>,
    /// Evaluate every qubit as the focus party.
    #[arg(long)]
    sweep_focus: bool,
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    roof: RoofFlags,
    /// Report CSV path; a JSON mirror and a manifest are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// m_surface, h_region or domain_region.
    scan: String,
    /// JSON scan request {"grid": {...}, "samples", "n_qubits", "seed"}; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q_lo: Option<f64>,
    #[arg(long)]
    q_hi: Option<f64>,
    #[arg(long)]
    q_steps: Option<usize>,
    #[arg(long)]
    s_lo: Option<f64>,
    #[arg(long)]
    s_hi: Option<f64>,
    #[arg(long)]
    s_steps: Option<usize>,
    /// Nodes per axis of the point grid on the quarter disk.
    #[arg(long)]
    x_steps: Option<usize>,
    /// lemma2-region or full-box.
    #[arg(long, value_parser = parse_domain_mode)]
    domain_mode: Option<DomainMode>,
    /// Haar states per cell (domain_region).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, env = "POLYLAB_SEED")]
    seed: Option<u64>,
    /// CSV path; a JSON mirror and a manifest are written next to it. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(text: &str) -> std::result::Result<[f64; 2], String> {
    let (q, s) = text.split_once(',').ok_or("expected q,s")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"));
    Ok([parse(q)?, parse(s)?])
}

fn parse_domain_mode(text: &str) -> std::result::Result<DomainMode, String> {
    match text {
        "lemma2-region" | "lemma2_region" => Ok(DomainMode::Lemma2Region),
        "full-box" | "full_box" => Ok(DomainMode::FullBox),
        other => Err(format!(
            "unknown domain mode '{other}' (lemma2-region, full-box)"
        )),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

/// `<out>.manifest.json`.
fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes a CSV artifact with its JSON mirror (`<stem>.json`) and manifest.
fn write_artifacts<T: Serialize>(
    out: &Path,
    csv: &str,
    mirror: &T,
    manifest: &RunManifest,
) -> CliResult<()> {
    write_file(out, csv)?;
    write_file(&manifest_path(out), &to_json_pretty(manifest))?;
    #[derive(Serialize)]
    struct Mirror<'a, T> {
        manifest: &'a RunManifest,
        #[serde(flatten)]
        body: &'a T,
    }
    let json_path = if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("mirror.json")
    } else {
        out.with_extension("json")
    };
    write_file(
        &json_path,
        &to_json_pretty(&Mirror {
            manifest,
            body: mirror,
        }),
    )
}

fn cmd_compute(args: &ComputeArgs) -> CliResult<u8> {
    let measure = measure_registry().get(&args.measure)?;
    let mut roof: RoofConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => RoofConfig::default(),
    };
    args.roof.apply(&mut roof);
    roof.validate()?;
    let state = match &args.state {
        Some(p) => Some(State::load(p).map_err(|e| match e {
            polylab::Error::Io(io) => io_failure(p, io),
            other => Failure::Usage(format!("{}: {other}", p.display())),
        })?),
        None => None,
    };
    let input = MeasureInput {
        state,
        q: args.q,
        s: args.s,
        x: args.x,
        subsystem: args.subsystem.clone(),
        roof: roof.clone(),
    };
    let output = measure.evaluate(&input)?;
    println!("{:.12}", output.value);
    if let Some(path) = &args.json {
        #[derive(Serialize)]
        struct ComputeJson<'a> {
            manifest: RunManifest,
            #[serde(flatten)]
            output: &'a polylab::measures::MeasureOutput,
        }
        let manifest = RunManifest::new(&roof, roof.seed);
        write_file(
            path,
            &to_json_pretty(&ComputeJson {
                manifest,
                output: &output,
            }),
        )?;
    }
    Ok(0)
}

fn campaign_config(args: &VerifyArgs) -> CliResult<CampaignConfig> {
    let mut cfg: CampaignConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => CampaignConfig::default(),
    };
    cfg.inequality = args.inequality.clone();
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(n) = args.qubits {
        cfg.n_qubits = n;
    }
    let mut points = Vec::new();
    if let Some(q) = args.q {
        points.push([q, args.s.unwrap_or(1.0)]);
    }
    points.extend(args.points.iter().copied());
    if !points.is_empty() {
        cfg.qs_points = points;
    }
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(rank) = args.rank {
        cfg.state_kind = StateKind::InducedMixed { rank };
    }
    if let Some(f) = args.focus {
        cfg.focus = f;
    }
    if args.sweep_focus {
        cfg.sweep_focus = true;
    }
    if args.tolerance.is_some() {
        cfg.tolerance = args.tolerance;
    }
    args.roof.apply(&mut cfg.roof);
    Ok(cfg)
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<u8> {
    let cfg = campaign_config(args)?;
    let report = run_campaign(&cfg)?;
    let manifest = RunManifest::new(&cfg, cfg.seed);
    #[derive(Serialize)]
    struct SummaryJson<'a> {
        manifest: &'a RunManifest,
        summary: &'a polylab::verify::CampaignSummary,
    }
    print!(
        "{}",
        to_json_pretty(&SummaryJson {
            manifest: &manifest,
            summary: &report.summary
        })
    );
    if let Some(out) = &args.out {
        write_artifacts(out, &report.to_csv(), &report, &manifest)?;
    }
    let s = &report.summary;
    if s.violations > 0 {
        let w = s.witness.as_ref().expect("violations imply records");
        eprintln!(
            "{}: {} violation(s) at tolerance {:e}; min slack {:e} at seed {} (q = {}, s = {}, focus {})",
            s.inequality, s.violations, s.tolerance, w.slack, w.state_seed, w.q, w.s, w.focus
        );
        return Ok(EXIT_VIOLATION);
    }
    eprintln!(
        "{}: {} record(s), no violations at tolerance {:e}",
        s.inequality, s.records, s.tolerance
    );
    Ok(0)
}

fn scan_request(args: &ScanArgs, default: ScanRequest) -> CliResult<ScanRequest> {
    let mut req = match &args.config {
        Some(p) => read_json(p)?,
        None => default,
    };
    let g = &mut req.grid;
    let axis = |a: &mut Axis, lo: Option<f64>, hi: Option<f64>, steps: Option<usize>| {
        if let Some(v) = lo {
            a.lo = v;
        }
        if let Some(v) = hi {
            a.hi = v;
        }
        if let Some(v) = steps {
            a.steps = v;
        }
    };
    axis(&mut g.q_range, args.q_lo, args.q_hi, args.q_steps);
    axis(&mut g.s_range, args.s_lo, args.s_hi, args.s_steps);
    if let Some(x) = args.x_steps {
        g.x_steps = x;
    }
    if let Some(m) = args.domain_mode {
        g.domain_mode = m;
    }
    if let Some(n) = args.samples {
        req.samples = n;
    }
    if let Some(n) = args.qubits {
        req.n_qubits = n;
    }
    if let Some(s) = args.seed {
        req.seed = s;
    }
    req.grid.validate()?;
    Ok(req)
}

fn cmd_scan(args: &ScanArgs) -> CliResult<u8> {
    let scan = scan_registry().get(&args.scan)?;
    let req = scan_request(args, scan.default_request())?;
    let cells = scan.run(&req)?;
    let csv = scan_csv(&cells);
    match &args.out {
        Some(out) => {
            let manifest = RunManifest::new(&req, req.seed);
            #[derive(Serialize)]
            struct ScanJson<'a> {
                scan: &'a str,
                request: &'a ScanRequest,
                cells: &'a [polylab::lemmafn::ScanCell],
            }
            let body = ScanJson {
                scan: scan.name(),
                request: &req,
                cells: &cells,
            };
            write_artifacts(out, &csv, &body, &manifest)?;
            eprintln!(
                "{}: {} cell(s) written to {}",
                scan.name(),
                cells.len(),
                out.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_list() -> CliResult<u8> {
    println!("measures:");
    for m in measure_registry().iter() {
        println!("  {:<22} {}", m.name(), m.description());
    }
    println!("inequalities:");
    for i in polylab::verify::inequality_registry().iter() {
        println!("  {:<22} {}", i.name(), i.description());
    }
    println!("scans:");
    for s in scan_registry().iter() {
        println!("  {:<22} {}", s.name(), s.description());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
        Command::List => cmd_list(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
