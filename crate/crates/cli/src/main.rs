use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use graphonflow::experiments::Params;

mod commands;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Moran population paths
    Moran,
    /// Wright-Fisher diffusion paths
    Wf,
    /// One snapshot graph of a Moran population
    Snapshot,
    /// Motif densities of a graph or step graphon
    Density,
    /// Truncated subgraph distance between two graphs/graphons
    Dsub,
    /// Graph-to-graphon convergence in n
    Exp13,
    /// Cauchy convergence of the type-space graphons in m
    Exp17,
    /// Concentration, moment, urn and density-gap checks
    Checks,
    /// Print the resolved configuration of a named scenario
    Scenario,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Moran => "moran",
            Command::Wf => "wf",
            Command::Snapshot => "snapshot",
            Command::Density => "density",
            Command::Dsub => "dsub",
            Command::Exp13 => "exp13",
            Command::Exp17 => "exp17",
            Command::Checks => "checks",
            Command::Scenario => "scenario",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "graphonflow",
    version,
    about = "Graphon-valued population dynamics: simulation, densities and convergence checks",
    after_help = "Any other `--key value` pair sets a configuration key and overrides the --config file \
                  (`--n-list 100,400` sets n_list). GRAPHONFLOW_SEED overrides the seed.\n\
                  Exit status: 0 success, 1 invalid input, 2 a pass/fail check failed."
)]
struct Cli {
    command: Command,
    /// Flat JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing); without it the main table goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    threads: Option<usize>,
}

const OWN_FLAGS: [&str; 3] = ["--config", "--out", "--threads"];

/// Separates the flags clap knows about from free-form `--key value` overrides.
fn split_args(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>)> {
    let mut known = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter().peekable();
    if let Some(program) = it.next() {
        known.push(program);
    }
    while let Some(arg) = it.next() {
        if !arg.starts_with("--") || arg == "--help" || arg == "--version" {
            known.push(arg);
            continue;
        }
        let (flag, inline) = match arg.split_once('=') {
            Some((f, v)) => (f.to_string(), Some(v.to_string())),
            None => (arg.clone(), None),
        };
        if OWN_FLAGS.contains(&flag.as_str()) {
            known.push(arg);
            if inline.is_none() {
                if let Some(v) = it.next() {
                    known.push(v);
                }
            }
            continue;
        }
        let key = flag.trim_start_matches('-');
        if key.is_empty() {
            bail!("empty option name '{arg}'");
        }
        let value = match inline {
            Some(v) => v,
            None => match it.peek() {
                // a negative number is a value, not a flag
                Some(next) if !next.starts_with("--") => it.next().expect("peeked"),
                _ => "true".to_string(),
            },
        };
        overrides.push((key.to_string(), value));
    }
    Ok((known, overrides))
}

/// File values, then command-line overrides, then the environment seed.
fn resolve_params(command: Command, config: Option<&Path>, overrides: &[(String, String)]) -> Result<Params> {
    let mut params = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            let json: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
            Params::from_json(&json)?
        }
        None => Params::new(),
    };
    for (key, value) in overrides {
        params.set_text(key, value);
    }
    if let Ok(seed) = std::env::var("GRAPHONFLOW_SEED") {
        let seed: u64 = seed
            .trim()
            .parse()
            .map_err(|e| anyhow::anyhow!("environment variable 'GRAPHONFLOW_SEED': {e}"))?;
        log::info!("seed {seed} taken from GRAPHONFLOW_SEED");
        params.set("seed", seed);
    }
    if let Some(recorded) = params.str("command")? {
        if recorded != command.name() {
            bail!(
                "parameter 'command': configuration was written for '{recorded}', not '{}'",
                command.name()
            );
        }
    }
    params.set("command", command.name());
    params.set_default("seed", 1u64);
    Ok(params)
}

fn run(args: Vec<String>) -> Result<bool> {
    let (known, overrides) = split_args(args)?;
    // clap's own exit status for usage errors would collide with "check failed"
    let cli = match Cli::try_parse_from(known.into_iter().map(OsString::from)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("parameter 'threads': must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let mut params = resolve_params(cli.command, cli.config.as_deref(), &overrides)?;
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let outcome = commands::dispatch(cli.command, &mut params, cli.out.as_deref())?;
    if let Some(dir) = &cli.out {
        let echo = serde_json::to_string_pretty(&params.to_json())? + "\n";
        std::fs::write(dir.join("config.echo.json"), echo)?;
    }
    println!("{}", outcome.summary);
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(std::env::args().collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
