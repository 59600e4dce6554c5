use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use relunet::approx::{
    build_approximator_with, rescale_to_box, ApproxConfig, DeltaPolicy, ShiftPolicy,
};
use relunet::harness::{
    catalog, evaluate_approximator, lookup, run_verification_suite, write_csv, SuiteConfig,
    DEFAULT_SEED,
};
use relunet::network::{deserialize, serialize};
use relunet::{Error, Result};

#[derive(Parser)]
#[command(
    name = "relunet",
    version,
    about = "Build and check explicit ReLU approximators"
)]
struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, env = "RELUNET_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an approximator for a catalog target and write the network file
    Build {
        #[command(flatten)]
        target: TargetArgs,
        /// Approximate on [-R, R]^d instead of [0, 1]^d
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum, default_value_t = Shift::Empirical)]
        shift: Shift,
        /// Output file; stdout when omitted
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a network file on comma-separated points, one per line
    Eval {
        net: PathBuf,
        /// Input file; stdin when omitted
        #[arg(short, long)]
        input: Option<PathBuf>,
    },
    /// Build, measure and check a single configuration
    Verify {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        lp_samples: usize,
        /// Print the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run a grid of configurations and write a CSV report
    Sweep {
        /// Comma-separated target names
        #[arg(long, value_delimiter = ',', default_values_t = ["abs_pi".to_string(), "bump".to_string()])]
        targets: Vec<String>,
        #[arg(short, long, default_value_t = 1)]
        d: u32,
        #[arg(short = 'N', long = "n", value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        n: Vec<u64>,
        #[arg(short = 'L', long = "l", value_delimiter = ',', default_values_t = [1u64, 2])]
        l: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        lp_samples: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the statistics and metadata of a network file as JSON
    Inspect { net: PathBuf },
    /// List the available targets
    Catalog {
        #[arg(short, long, default_value_t = 1)]
        d: u32,
    },
}

#[derive(Args)]
struct TargetArgs {
    /// Catalog target name
    #[arg(short, long)]
    target: String,
    #[arg(short, long, default_value_t = 1)]
    d: u32,
    #[arg(short = 'N', long = "n")]
    n: u64,
    #[arg(short = 'L', long = "l")]
    l: u64,
    /// Width of the excluded slabs; 1/(3K) when omitted
    #[arg(long)]
    delta: Option<f64>,
}

impl TargetArgs {
    fn delta(&self) -> DeltaPolicy {
        self.delta.map_or(DeltaPolicy::Max, DeltaPolicy::Fixed)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Shift {
    Empirical,
    Analytic,
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => Ok(fs::read_to_string(p)?),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(fs::write(p, text)?),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let seed = cli.seed;
    match cli.cmd {
        Command::Build {
            target,
            radius,
            shift,
            out,
        } => {
            let entry = lookup(&target.target, target.d, seed)?;
            let cfg = ApproxConfig {
                delta: target.delta(),
                shift: match shift {
                    Shift::Empirical => ShiftPolicy::EmpiricalMin,
                    Shift::Analytic => ShiftPolicy::Analytic,
                },
                ..ApproxConfig::default()
            };
            let a = match radius {
                Some(r) => rescale_to_box(&entry.target, r, target.n, target.l, target.d, &cfg)?,
                None => build_approximator_with(&entry.target, target.n, target.l, target.d, &cfg)?,
            };
            let mut meta = a.metadata();
            meta.insert("target".into(), json!(entry.name));
            meta.insert("seed".into(), json!(seed));
            write_output(&out, &serialize(&a.net, &meta))?;
            Ok(true)
        }
        Command::Eval { net, input } => {
            let file = deserialize(&fs::read_to_string(&net)?)?;
            let text = read_input(&input)?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            for (i, line) in text.as_bytes().lines().enumerate() {
                let line = line?;
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let x = line
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<f64>, _>>()
                    .map_err(|e| Error::Parse {
                        location: format!("input line {}", i + 1),
                        reason: e.to_string(),
                    })?;
                let y = file.network.evaluate(&x)?;
                let row: Vec<String> = y.iter().map(|v| format!("{v:e}")).collect();
                writeln!(out, "{}", row.join(","))?;
            }
            Ok(true)
        }
        Command::Verify {
            target,
            samples,
            lp_samples,
            json,
        } => {
            let entry = lookup(&target.target, target.d, seed)?;
            let cfg = ApproxConfig {
                delta: target.delta(),
                ..ApproxConfig::default()
            };
            let a = build_approximator_with(&entry.target, target.n, target.l, target.d, &cfg)?;
            let suite = SuiteConfig {
                rows: Vec::new(),
                seed,
                sup_samples: samples,
                lp_samples,
                tolerance: 1.0,
            };
            let r = evaluate_approximator(&entry, &a, &suite, seed)?;
            if json {
                let text =
                    serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))?;
                println!("{text}");
            } else {
                println!(
                    "{} d={} N={} L={} K={} width={} depth={} params={}",
                    r.target,
                    r.d,
                    r.n_width,
                    r.l_depth,
                    r.k,
                    r.stats.width,
                    r.stats.depth,
                    r.stats.param_count
                );
                println!(
                    "sup_err_outside={:.6e} plateau_err={:.6e} bound_maingap={:.6e} ratio={:.3e}",
                    r.sup_err_outside, r.plateau_err, r.bound_maingap, r.ratio
                );
                println!(
                    "l1={:.6e}±{:.1e} l2={:.6e}±{:.1e}",
                    r.l1_err, r.l1_se, r.l2_err, r.l2_se
                );
                println!("{}", if r.passed { "PASS" } else { "FAIL" });
                for f in &r.failures {
                    println!("  {f}");
                }
            }
            Ok(r.passed)
        }
        Command::Sweep {
            targets,
            d,
            n,
            l,
            samples,
            lp_samples,
            out,
        } => {
            let names: Vec<&str> = targets.iter().map(String::as_str).collect();
            let mut cfg = SuiteConfig::grid(&names, d, &n, &l, seed);
            cfg.sup_samples = samples;
            cfg.lp_samples = lp_samples;
            let outcome = run_verification_suite(&cfg);
            let mut buf = Vec::new();
            write_csv(&outcome.reports, &mut buf)?;
            write_output(&out, &String::from_utf8_lossy(&buf))?;
            for r in outcome.reports.iter().filter(|r| !r.passed) {
                eprintln!(
                    "FAIL {} N={} L={}: {}",
                    r.target,
                    r.n_width,
                    r.l_depth,
                    r.failures.join("; ")
                );
            }
            Ok(outcome.passed)
        }
        Command::Inspect { net } => {
            let file = deserialize(&fs::read_to_string(&net)?)?;
            let report = json!({
                "input_dim": file.network.input_dim(),
                "output_dim": file.network.output_dim(),
                "stats": file.network.stats(),
                "metadata": file.metadata,
            });
            let text =
                serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            write_output(&None, &format!("{text}\n"))?;
            Ok(true)
        }
        Command::Catalog { d } => {
            for e in catalog(d, seed) {
                let modulus = match e.holder() {
                    Some((lambda, alpha)) => format!("lambda={lambda:.4} alpha={alpha}"),
                    None => "empirical".into(),
                };
                println!("{:<11} d={} {}  {}", e.name, e.d, modulus, e.description);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
