//! Command-line front end: a project config file drives the staged
//! pipeline, and every stage persists its output under the output directory.

pub mod config;
pub mod http;
pub mod stages;
pub mod synth;

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use daokpi_core::report::Format;

use config::{ConfigError, Project};
use stages::{Layout, Overrides, StageError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_STAGE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "daokpi", version, about = "On-chain DAO governance KPIs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Project config file.
    #[arg(long, global = true, default_value = "daokpi.toml")]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config. For `synth`,
    /// the directory the project is written to.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Significance level for the statistical tests.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Snapshot block for every chain, overriding the config.
    #[arg(long, global = true)]
    pub snapshot_block: Option<u64>,
    /// Comma-separated report formats: csv, json, svg.
    #[arg(long, global = true, value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,
    /// Comma-separated DAO ids for the radar chart.
    #[arg(long, global = true, value_delimiter = ',')]
    pub radar: Option<Vec<String>>,
    /// Seed for `synth`.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Number of DAOs generated by `synth`.
    #[arg(long, global = true, default_value_t = 12)]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Download logs, block times and token metadata.
    Fetch,
    /// Decode raw logs into governance events and transfers.
    Decode,
    /// Build the harmonised dataset and manifest.
    Build,
    /// Classify every DAO on the four KPIs.
    Kpi,
    /// Compare KPI levels statistically.
    Stats,
    /// Write summary tables, charts and the report bundle.
    Report,
    /// Generate a synthetic project with recorded fixtures and ground truth.
    Synth,
    /// Run fetch through report.
    All,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Stage(#[from] StageError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Stage(_) => EXIT_STAGE,
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.command == Command::Synth {
        let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("synth"));
        synth::write_project(&dir, cli.seed, cli.count)?;
        log::info!("wrote synthetic project with {} DAOs to {}", cli.count, dir.display());
        return Ok(());
    }

    let project = Project::load(&cli.config)?;
    if let Some(a) = cli.alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(ConfigError(format!("--alpha must lie in (0, 1), got {a}")).into());
        }
    }
    let ov = Overrides {
        snapshot_block: cli.snapshot_block,
        alpha: cli.alpha,
        formats: cli.formats.as_ref().map(|f| f.iter().copied().collect()),
        radar_daos: cli.radar.clone().or_else(|| project.config.radar_daos.clone()),
    };
    let layout = Layout::new(cli.output.clone().unwrap_or_else(|| project.output_dir.clone()));
    let alpha = ov.alpha.unwrap_or(project.config.alpha);
    let formats: BTreeSet<Format> = match &ov.formats {
        Some(f) => f.clone(),
        None => project.formats()?,
    };

    let steps: &[Command] = match cli.command {
        Command::All => {
            &[Command::Fetch, Command::Decode, Command::Build, Command::Kpi, Command::Stats, Command::Report]
        }
        ref c => std::slice::from_ref(c),
    };
    for step in steps {
        log::info!("stage {step:?}");
        match step {
            Command::Fetch => stages::fetch(&project, &layout, &ov)?,
            Command::Decode => stages::decode(&project, &layout)?,
            Command::Build => stages::build(&project, &layout)?,
            Command::Kpi => stages::kpi(&layout)?,
            Command::Stats => stages::stats(&layout, alpha)?,
            Command::Report => {
                let written = stages::report(&layout, &formats, ov.radar_daos.as_deref())?;
                log::info!("wrote {} report files to {}", written.len(), layout.report_dir().display());
            }
            Command::Synth | Command::All => unreachable!(),
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
