use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use unimap::cycles::{enumerate_short_cycles, EnumerationOptions};
use unimap::experiment::{run_experiment, sample_instance, ExperimentConfig, OutputFormat, Prepared};
use unimap::maps::{build_underlying_graph, Kernel};
use unimap::oracle;
use unimap::stats::{intensity, intensity_k, lambda_k_m, pk, systole_cdf, WindowSpec, TOL};
use unimap::validate::{run_suite, Suite};
use unimap::Error;

#[derive(Parser)]
#[command(name = "unimap", version, about = "Short cycles of random high-genus unicellular maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one map and print its tree, permutation, graph, kernel and cycles.
    Sample(SampleArgs),
    /// Run a Monte Carlo experiment.
    Run(RunArgs),
    /// Print limit intensities and laws.
    Theory(TheoryArgs),
    /// Run a self-check suite; exits with 1 if any check fails.
    Validate(ValidateArgs),
    /// Exhaustive enumerations for small sizes.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    g: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample index within the seed's run.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value_t = 2.0)]
    x_max: f64,
    /// Omit the full tree and graph (useful for large n).
    #[arg(long)]
    brief: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    g: usize,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Cycles are enumerated up to length ceil(x_max L).
    #[arg(long)]
    x_max: Option<f64>,
    /// Comma-separated windows `x:y` on the rescaled axis.
    #[arg(long, default_value = "0:1,1:2")]
    windows: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "UNIMAP_WORKERS")]
    workers: Option<usize>,
    /// Count single-vertex loops as cycles.
    #[arg(long)]
    include_loops: bool,
    /// Do not search past the cap for the systole.
    #[arg(long)]
    capped_systole: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Print the full report instead of a summary.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct TheoryArgs {
    /// Intensity of the window `[x, y)`; repeatable.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    lambda: Vec<f64>,
    /// Intensity of cycles with `k` junctions in `[x, y)`; repeatable.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "K"])]
    lambda_k: Vec<f64>,
    /// Discrete intensity at length index `m` with `k` junctions and `M` bins; repeatable.
    #[arg(long, num_args = 3, value_names = ["m", "K", "M"])]
    lambda_k_m: Vec<usize>,
    /// Systole distribution function at the given points.
    #[arg(long, num_args = 1..)]
    systole: Vec<f64>,
    /// Systole distribution function on `0, step, .., max`.
    #[arg(long, num_args = 2, value_names = ["MAX", "STEP"])]
    systole_grid: Vec<f64>,
    /// Probability that the shortest cycle has `k` junctions.
    #[arg(long, num_args = 1..)]
    pk: Vec<u32>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(value_parser = ["counters", "samplers", "kernel", "lemmas", "all"])]
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    what: OracleCommand,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// All plane trees with `n` edges.
    Trees { n: usize },
    /// All odd-cycle permutations of `n` elements with genus `g`.
    Cperms { n: usize, g: usize },
    /// Exact law of the cycle profile.
    MapStats { n: usize, g: usize },
    /// Disjoint path pairs and path unions.
    PathPairs { n: usize, len1: usize, len2: usize },
}

enum Failure {
    Usage(String),
    Runtime(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Infeasible { .. } | Error::GuardExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn parse_windows(s: &str) -> Result<WindowSpec, Failure> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (x, y) = part
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("window {part:?} is not of the form x:y")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad number {t:?}")))
        };
        out.push((num(x)?, num(y)?));
    }
    Ok(WindowSpec::new(out)?)
}

fn cmd_sample(a: SampleArgs) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::new(a.n, a.g, 1);
    cfg.x_max = a.x_max;
    cfg.windows = WindowSpec::new(vec![(0.0, a.x_max)])?;
    cfg.master_seed = a.seed;
    let prep = Prepared::new(&cfg)?;
    let dt = sample_instance(&prep, a.seed, a.index)?;
    let kernel = Kernel::from_decorated_tree(&dt);
    let cycles = enumerate_short_cycles(&kernel, &EnumerationOptions::new(prep.cap));
    let mut out = json!({
        "n": a.n,
        "g": a.g,
        "seed": unimap::rng::derive_seed(a.seed, a.index),
        "scale": prep.scaling.map(|s| s.scale),
        "cap": prep.cap,
        "kernel": kernel.to_json(),
        "cycles": cycles.records,
        "truncated": cycles.truncated,
    });
    if !a.brief {
        out["tree"] = json!(dt.tree);
        out["sigma"] = json!(dt.sigma);
        out["graph"] = build_underlying_graph(&dt.tree, &dt.sigma)?.to_json();
    }
    print(&out);
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let windows = parse_windows(&a.windows)?;
    let mut cfg = ExperimentConfig::new(a.n, a.g, a.samples);
    cfg.x_max = a.x_max.unwrap_or_else(|| windows.x_max());
    cfg.windows = windows;
    cfg.master_seed = a.seed;
    cfg.workers = a.workers;
    cfg.include_loops = a.include_loops;
    cfg.full_systole = !a.capped_systole;
    cfg.output = a.output;
    cfg.format = match a.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let summary = run_experiment(&cfg)?;
    let report = summary.report()?;
    if a.verbose {
        print(&json!({ "scale": summary.scale, "cap": summary.cap, "report": report }));
    } else {
        let windows: Vec<Value> = report
            .windows
            .iter()
            .map(|w| {
                json!({
                    "window": w.window,
                    "mean": w.mean,
                    "lambda": w.lambda,
                    "dispersion": w.poisson.as_ref().map(|p| p.dispersion),
                    "p_value": w.poisson.as_ref().map(|p| p.chi_square.p_value),
                })
            })
            .collect();
        print(&json!({
            "samples": report.samples,
            "scale": summary.scale,
            "cap": summary.cap,
            "windows": windows,
            "systole_cdf": report.systole_cdf,
            "shortest_k": report.shortest_k,
        }));
    }
    Ok(())
}

fn cmd_theory(a: TheoryArgs) -> Result<(), Failure> {
    let nothing = a.lambda.is_empty()
        && a.lambda_k.is_empty()
        && a.lambda_k_m.is_empty()
        && a.systole.is_empty()
        && a.systole_grid.is_empty()
        && a.pk.is_empty();
    let (lambda, systole, pks) = if nothing {
        (vec![0.0, 1.0, 1.0, 2.0], vec![1.0, 2.0], vec![1, 2, 3])
    } else {
        (a.lambda, a.systole, a.pk)
    };
    let mut out = serde_json::Map::new();
    if !lambda.is_empty() {
        let v = lambda
            .chunks(2)
            .map(|p| Ok(json!({ "x": p[0], "y": p[1], "value": intensity(p[0], p[1], TOL)? })))
            .collect::<Result<Vec<_>, Error>>()?;
        out.insert("lambda".into(), v.into());
    }
    if !a.lambda_k.is_empty() {
        let v = a
            .lambda_k
            .chunks(3)
            .map(|p| {
                if p[2] < 1.0 || p[2].fract() != 0.0 {
                    return Err(Failure::Usage(format!("k must be a positive integer, got {}", p[2])));
                }
                let k = p[2] as u32;
                Ok(json!({ "x": p[0], "y": p[1], "k": k, "value": intensity_k(p[0], p[1], k)? }))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        out.insert("lambda_k".into(), v.into());
    }
    if !a.lambda_k_m.is_empty() {
        let v = a
            .lambda_k_m
            .chunks(3)
            .map(|p| Ok(json!({ "m": p[0], "k": p[1], "M": p[2], "value": lambda_k_m(p[0], p[1], p[2])? })))
            .collect::<Result<Vec<_>, Error>>()?;
        out.insert("lambda_k_m".into(), v.into());
    }
    let mut zs = systole;
    if let [max, step] = a.systole_grid[..] {
        if !(step > 0.0 && max >= 0.0) {
            return Err(Failure::Usage("systole grid needs MAX >= 0 and STEP > 0".into()));
        }
        let count = (max / step + 1e-9).floor() as usize;
        zs.extend((0..=count).map(|i| i as f64 * step));
    }
    if !zs.is_empty() {
        let v = zs
            .into_iter()
            .map(|z| Ok(json!({ "z": z, "value": systole_cdf(z)? })))
            .collect::<Result<Vec<_>, Error>>()?;
        out.insert("systole_cdf".into(), v.into());
    }
    if !pks.is_empty() {
        let v = pks
            .into_iter()
            .map(|k| Ok(json!({ "k": k, "value": pk(k, 1e-10)? })))
            .collect::<Result<Vec<_>, Error>>()?;
        out.insert("pk".into(), v.into());
    }
    print(&Value::Object(out));
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Failure> {
    let suite: Suite = a.suite.parse()?;
    let report = run_suite(suite, a.seed)?;
    print(&serde_json::to_value(&report).expect("serializable"));
    for c in &report.checks {
        eprintln!("{c}");
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Failure> {
    let out = match a.what {
        OracleCommand::Trees { n } => {
            let trees = oracle::enumerate_plane_trees(n)?;
            json!({ "n": n, "count": trees.len(), "trees": trees })
        }
        OracleCommand::Cperms { n, g } => {
            let perms = oracle::enumerate_cperms(n, g)?;
            json!({ "n": n, "g": g, "count": perms.len(), "permutations": perms })
        }
        OracleCommand::MapStats { n, g } => {
            let d = oracle::exact_map_statistics(n, g)?;
            let law: Vec<Value> = d
                .probs
                .iter()
                .zip(d.float_probs())
                .map(|((profile, p), value)| {
                    json!({
                        "profile": profile,
                        "probability": p.to_string(),
                        "value": value,
                    })
                })
                .collect();
            json!({ "n": n, "g": g, "law": law })
        }
        OracleCommand::PathPairs { n, len1, len2 } => {
            let r = oracle::enumerate_path_pairs_and_unions(n, len1, len2)?;
            json!({
                "n": n,
                "len1": len1,
                "len2": len2,
                "disjoint_pairs": r.disjoint_pairs.to_string(),
                "disjoint_bound": r.disjoint_bound.to_string(),
                "union_shapes": r.union_shapes,
                "union_bound": r.union_bound,
                "bounds_hold": r.bounds_hold(),
            })
        }
    };
    print(&out);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Run(a) => cmd_run(a),
        Command::Theory(a) => cmd_theory(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
