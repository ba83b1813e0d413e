//! `rtrecon`: runs return-time reconstruction and G-set experiments from
//! flat config files and writes reproducible artifacts.
//!
//! [`run_args`] is the whole CLI as a function, so tests can drive it
//! in-process.

pub mod artifacts;
pub mod cache;
pub mod config;
pub mod error;
pub mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use artifacts::{ArtifactRecord, OutputDir};
pub use cache::{Cache, Lookup};
pub use config::{ExperimentConfig, Kind, RawConfig};
pub use error::{CliError, Result, EXIT_CAP, EXIT_CONFIG, EXIT_VERIFY};
pub use run::Format;

#[derive(Parser, Debug)]
#[command(name = "rtrecon", version, about = "Return-time reconstruction experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Plot data format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, global = true, default_value = ".rtrecon-cache")]
    cache_dir: PathBuf,
    /// Always regenerate return sets.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a return set and describe its open set.
    Simulate,
    /// Detect the spectrum of a return set.
    Spectrum,
    /// Reconstruct the group rotation from a return set.
    Reconstruct,
    /// Compare two return sets.
    Compare,
    /// Finite G-set experiments.
    #[command(subcommand)]
    Gset(GsetCommand),
    /// Return-set cache maintenance.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Subcommand, Debug)]
enum GsetCommand {
    /// Search for non-simple subsets with trivial setwise stabilizer.
    Search,
    /// Reconstruct G-sets from return subsets.
    Reconstruct,
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    /// Remove corrupt entries (or all entries).
    Gc {
        #[arg(long)]
        all: bool,
    },
}

/// Result of one CLI invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub exit_code: i32,
    pub out_dir: Option<PathBuf>,
    pub artifacts: Vec<ArtifactRecord>,
    pub warnings: Vec<String>,
    /// Text for stdout (help, summaries).
    pub stdout: String,
    /// Error message for stderr, if the run failed.
    pub error: Option<String>,
}

impl Outcome {
    fn failed(e: &CliError) -> Self {
        Self {
            exit_code: e.exit_code(),
            error: Some(e.to_string()),
            ..Self::default()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let text = e.render().to_string();
            return Outcome {
                exit_code: code,
                stdout: if code == 0 { text.clone() } else { String::new() },
                error: (code != 0).then_some(text),
                ..Outcome::default()
            };
        }
    };
    let kind = match &cli.command {
        Command::Simulate => Kind::Simulate,
        Command::Spectrum => Kind::Spectrum,
        Command::Reconstruct => Kind::Reconstruct,
        Command::Compare => Kind::Compare,
        Command::Gset(GsetCommand::Search) => Kind::GsetSearch,
        Command::Gset(GsetCommand::Reconstruct) => Kind::GsetReconstruct,
        Command::Cache(CacheCommand::Gc { all }) => return cache_gc(&cli.global.cache_dir, *all),
    };
    match run_experiment(kind, &cli.global) {
        Ok(o) => o,
        Err(e) => Outcome::failed(&e),
    }
}

fn cache_gc(dir: &Path, all: bool) -> Outcome {
    match Cache::new(dir).gc(all) {
        Ok(removed) => Outcome {
            stdout: format!("removed {} cache entries from {}\n", removed.len(), dir.display()),
            ..Outcome::default()
        },
        Err(e) => Outcome::failed(&e),
    }
}

fn run_experiment(kind: Kind, opts: &GlobalOpts) -> Result<Outcome> {
    let path = opts.config.as_ref().ok_or_else(|| CliError::ConfigFile {
        path: "<none>".into(),
        message: format!("`{kind}` needs --config PATH"),
    })?;
    let raw = RawConfig::load(path)?;
    let mut cfg = ExperimentConfig::from_raw(&raw, kind)?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(t) = opts.threads.or(cfg.threads) {
        // The global pool can only be built once per process; later calls
        // keep the existing one.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let mut ctx = run::Context {
        out: OutputDir::create(&out_dir)?,
        cache: (!opts.no_cache).then(|| Cache::new(&opts.cache_dir)),
        format: match opts.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        },
        warnings: Vec::new(),
        failures: Vec::new(),
    };
    run::run_experiment(&cfg, &mut ctx)?;
    ctx.out
        .finish(kind.name(), &cfg.config_hash, &cfg.entries, cfg.seed, &ctx.warnings)?;

    let mut stdout = String::new();
    for r in ctx.out.records() {
        stdout.push_str(&format!("wrote {}\n", out_dir.join(&r.file).display()));
    }
    let error = (!ctx.failures.is_empty()).then(|| CliError::Verification(ctx.failures.join("; ")).to_string());
    Ok(Outcome {
        exit_code: if error.is_some() { EXIT_VERIFY } else { 0 },
        out_dir: Some(out_dir),
        artifacts: ctx.out.records().to_vec(),
        warnings: ctx.warnings,
        stdout,
        error,
    })
}
