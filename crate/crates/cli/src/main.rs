use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trihull::bench::{format_summary, run_bench, summarize, write_bench_csv, BenchSpec};
use trihull::chaos::{random_start_cloud, sierpinski_cloud, DEFAULT_BURN_IN};
use trihull::instances::{
    gen_interior, gen_near_boundary, gen_nonmember_with, gen_simplex_centroid, Instance,
};
use trihull::io::{
    certificate_json, instance_to_json, parse_instance, parse_vertices, write_cloud_csv,
};
use trihull::rng::{RngStream, STREAM_CHAOS};
use trihull::{solve, PivotStrategy, SolverConfig, Status, Variant};

const EXIT_USAGE: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "trihull",
    version,
    about = "Convex hull membership by the triangle algorithm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether p lies in conv(S) and write a certificate.
    ///
    /// Exit status: 0 approximate, 1 witness, 2 iteration limit, 3+ error.
    Solve(SolveCmd),
    /// Write a generated instance as JSON.
    Gen(GenCmd),
    /// Play the chaos game and write the dots as CSV.
    Chaos(ChaosCmd),
    /// Run a variant/epsilon/seed grid and write one CSV row per cell.
    Bench(BenchCmd),
}

#[derive(Args)]
struct SolveCmd {
    /// Instance JSON file.
    instance: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value = "det", value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, default_value = "first", value_parser = parse_pivot)]
    pivot: PivotStrategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    midpoint_prob: f64,
    /// Record every step in the certificate.
    #[arg(long)]
    trace: bool,
    /// Certificate path [default: <instance>.cert.json].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Interior,
    Nonmember,
    Simplex,
    NearBoundary,
}

#[derive(Args, Clone)]
struct GenParams {
    /// Number of points (ignored for simplex).
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Dimension.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Separation for nonmember instances.
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    /// Blend toward the centroid for near-boundary instances.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Keep nonmember instances axis-aligned instead of rotating them.
    #[arg(long)]
    axis_aligned: bool,
}

#[derive(Args)]
struct GenCmd {
    kind: Kind,
    #[command(flatten)]
    params: GenParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChaosCmd {
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON vertex list; the unit equilateral triangle when omitted.
    #[arg(long)]
    vertices: Option<PathBuf>,
    /// Also write the burn-in dots.
    #[arg(long)]
    all: bool,
    /// Output path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    /// Instance JSON file, or a generator kind (interior, nonmember, simplex, near-boundary).
    source: String,
    #[command(flatten)]
    params: GenParams,
    /// Seed for a generated instance.
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    /// Strictly decreasing epsilon ladder.
    #[arg(
        long = "epsilon",
        alias = "epsilons",
        value_delimiter = ',',
        default_value = "0.1,0.05,0.025,0.0125"
    )]
    epsilons: Vec<f64>,
    #[arg(long = "variant", alias = "variants", value_delimiter = ',', default_value = "det", value_parser = parse_variant)]
    variants: Vec<Variant>,
    #[arg(long = "pivot", value_delimiter = ',', default_value = "first", value_parser = parse_pivot)]
    pivots: Vec<PivotStrategy>,
    /// Comma-separated seeds for the randomized variants.
    #[arg(long = "seed", alias = "seeds", default_value = "0,1,2,3,4")]
    seeds: String,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    midpoint_prob: f64,
    /// Worker threads [default: all cores].
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Fill elapsed_micros (makes the CSV run-dependent).
    #[arg(long)]
    timing: bool,
    /// CSV path [default: stdout, summary to stderr].
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: trihull::Error| e.to_string())
}

fn parse_pivot(s: &str) -> Result<PivotStrategy, String> {
    s.parse().map_err(|e: trihull::Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Input(_) => EXIT_INPUT,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }
}

impl From<trihull::Error> for Failure {
    fn from(e: trihull::Error) -> Self {
        use trihull::Error::*;
        match e {
            InvalidEpsilon(_) | InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(cmd) => cmd_solve(cmd),
        Command::Gen(cmd) => cmd_gen(cmd).map(|()| 0),
        Command::Chaos(cmd) => cmd_chaos(cmd).map(|()| 0),
        Command::Bench(cmd) => cmd_bench(cmd).map(|()| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Input(msg) | Failure::Io(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn cmd_solve(cmd: SolveCmd) -> Result<u8, Failure> {
    let inst = parse_instance(&read_text(&cmd.instance)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", cmd.instance.display())))?;
    let mut cfg = SolverConfig::new(cmd.variant, cmd.epsilon)
        .with_pivot(cmd.pivot)
        .with_seed(cmd.seed)
        .with_midpoint_prob(cmd.midpoint_prob)
        .with_trace(cmd.trace);
    cfg.max_iters = cmd.max_iters;
    cfg.validate()?;
    let out = solve(&inst.p, &inst.points, &cfg)?;

    let cert_path = cmd
        .out
        .unwrap_or_else(|| cmd.instance.with_extension("cert.json"));
    let mut text = serde_json::to_string_pretty(&certificate_json(&out, &cfg))
        .expect("certificate serializes");
    text.push('\n');
    std::fs::write(&cert_path, text).map_err(|e| Failure::io(&cert_path, e))?;

    println!("status: {}", out.status);
    println!("variant: {} (pivot {})", cfg.variant, cfg.pivot_strategy);
    println!("n: {}  m: {}", inst.n(), inst.m());
    println!("R: {:?}", out.radius);
    println!("threshold (epsilon R): {:?}", out.threshold(cfg.epsilon));
    println!("final_distance: {:?}", out.final_distance);
    println!("iterations: {}", out.iterations);
    println!("pivot_scans: {}", out.pivot_scans);
    if out.strict_fallbacks > 0 {
        println!("strict_fallbacks: {}", out.strict_fallbacks);
    }
    if let Some((lo, hi)) = out.gap_bounds {
        println!("distance to hull: lower {lo:?}  upper {hi:?}");
    }
    println!("certificate: {}", cert_path.display());
    Ok(match out.status {
        Status::Approximate => 0,
        Status::Witness => 1,
        Status::IterLimit => 2,
    })
}

fn generate(kind: Kind, params: &GenParams, seed: u64) -> Result<Instance, Failure> {
    let GenParams {
        n,
        m,
        margin,
        delta,
        axis_aligned,
    } = *params;
    Ok(match kind {
        Kind::Interior => gen_interior(n, m, seed)?,
        Kind::Nonmember => gen_nonmember_with(n, m, seed, margin, !axis_aligned)?,
        Kind::Simplex => gen_simplex_centroid(m)?,
        Kind::NearBoundary => gen_near_boundary(n, m, seed, delta)?,
    })
}

fn cmd_gen(cmd: GenCmd) -> Result<(), Failure> {
    let inst = generate(cmd.kind, &cmd.params, cmd.seed)?;
    let mut w = output(cmd.out.as_deref())?;
    w.write_all(instance_to_json(&inst).as_bytes())
        .and_then(|()| w.flush())
        .map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_chaos(cmd: ChaosCmd) -> Result<(), Failure> {
    let mut rng = RngStream::new(cmd.seed, STREAM_CHAOS);
    let cloud = match &cmd.vertices {
        None => sierpinski_cloud(cmd.steps, cmd.burn_in, &mut rng)?,
        Some(path) => {
            let s = parse_vertices(&read_text(path)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            random_start_cloud(&s, cmd.steps, cmd.burn_in, &mut rng)?
        }
    };
    let w = output(cmd.out.as_deref())?;
    write_cloud_csv(&cloud, cmd.all, w).map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_bench(cmd: BenchCmd) -> Result<(), Failure> {
    let path = Path::new(&cmd.source);
    let inst = if path.exists() {
        parse_instance(&read_text(path)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    } else {
        let kind = Kind::from_str(&cmd.source, false).map_err(|_| {
            Failure::Usage(format!(
                "`{}` is neither a file nor a kind (interior, nonmember, simplex, near-boundary)",
                cmd.source
            ))
        })?;
        generate(kind, &cmd.params, cmd.instance_seed)?
    };

    let mut seeds = cmd
        .seeds
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|e| Failure::Usage(format!("seed `{s}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if seeds.is_empty() {
        if cmd.variants.iter().any(|v| v.is_randomized()) {
            return Err(Failure::Usage(
                "randomized variants need at least one seed".into(),
            ));
        }
        seeds.push(0);
    }

    let mut spec = BenchSpec::new(cmd.variants, cmd.epsilons, seeds);
    spec.pivots = cmd.pivots;
    spec.midpoint_prob = cmd.midpoint_prob;
    spec.max_iters = cmd.max_iters;
    spec.jobs = cmd.jobs;
    spec.timing = cmd.timing;
    let records = run_bench(&inst, &spec)?;

    let w = output(cmd.out.as_deref())?;
    write_bench_csv(&records, w).map_err(|e| Failure::Io(e.to_string()))?;
    let summary = format_summary(&summarize(&records, &spec));
    if cmd.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}
