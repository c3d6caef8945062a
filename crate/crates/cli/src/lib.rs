//! Command-line runner for full counting statistics experiments.

pub mod error;
pub mod observable;
pub mod run;
pub mod table;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use fcs_core::config::presets;
use fcs_core::{ExperimentConfig, StatisticsKind};

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "fcs", version, about = "Exact full counting statistics of wave packets in a multi-channel scatterer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Built-in configuration instead of a file: fig3, fig4 or hom.
    #[arg(long, global = true, value_name = "NAME", conflicts_with = "config")]
    pub builtin: Option<String>,

    /// Directory for output files (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Comma-separated statistics kinds, e.g. boson,fermion,dp.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_kind)]
    pub kinds: Option<Vec<StatisticsKind>>,

    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Multiplier on the quadrature node count.
    #[arg(long = "quad-scale", global = true, value_name = "FACTOR")]
    pub quad_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full outcome distribution at zero sweep delay.
    Single,
    /// Observables along the configured delay sweep.
    Sweep,
    /// Every consistency check and the bunching inequalities, as a table.
    Audit,
    /// per(I), det(I) and the distance of I from the identity along the sweep.
    Overlaps,
    /// Run a built-in sweep: fig3, fig4 or hom.
    Preset { name: String },
}

fn parse_kind(s: &str) -> std::result::Result<StatisticsKind, String> {
    StatisticsKind::parse(s).ok_or_else(|| format!("unknown statistics kind {s:?} (boson, fermion, dp)"))
}

/// Experiment resolved from the flags.
pub struct Resolved {
    pub name: String,
    pub config: ExperimentConfig,
    pub kinds: Vec<StatisticsKind>,
}

fn builtin(name: &str) -> Result<ExperimentConfig> {
    let file = presets::by_name(name).ok_or_else(|| CliError::Usage(format!("no built-in configuration {name:?}")))?;
    Ok(ExperimentConfig::from_file(&file)?)
}

impl Cli {
    pub fn resolve(&self) -> Result<Resolved> {
        let (name, mut config) = match (&self.command, &self.config, &self.builtin) {
            (Command::Preset { name }, None, None) => (name.clone(), builtin(name)?),
            (Command::Preset { .. }, _, _) => {
                return Err(CliError::Usage("preset takes no --config or --builtin".into()));
            }
            (_, Some(path), _) => {
                let stem = path.file_stem().map_or("config".into(), |s| s.to_string_lossy().into_owned());
                (stem, ExperimentConfig::load(path)?)
            }
            (_, None, Some(name)) => (name.clone(), builtin(name)?),
            (_, None, None) => return Err(CliError::Usage("give --config <path> or --builtin <name>".into())),
        };
        if let Some(scale) = self.quad_scale {
            config.quadrature.scale *= scale;
            config.quadrature.validate()?;
        }
        let kinds = match &self.kinds {
            Some(k) if k.is_empty() => return Err(CliError::Usage("--kinds is empty".into())),
            Some(k) => {
                let mut k = k.clone();
                k.sort();
                k.dedup();
                k
            }
            None => config.kinds.clone(),
        };
        Ok(Resolved { name, config, kinds })
    }
}

fn output_path(dir: &Path, file: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(dir.join(file))
}

/// Executes the command, writing files under `--out` and a short report
/// to stdout.
pub fn execute(cli: &Cli) -> Result<()> {
    let r = cli.resolve()?;
    match &cli.command {
        Command::Single => {
            let (table, ov) = run::run_single(&r.config, &r.kinds)?;
            let path = output_path(&cli.out, &format!("{}_distribution.csv", r.name))?;
            table.write(&path)?;
            let ov_path = output_path(&cli.out, &format!("{}_overlaps.toml", r.name))?;
            std::fs::write(&ov_path, ov.to_text()).map_err(|source| CliError::Io {
                path: ov_path.clone(),
                source,
            })?;
            println!("wrote {} ({} outcomes) and {}", path.display(), table.rows.len(), ov_path.display());
        }
        Command::Sweep | Command::Preset { .. } => {
            let result = run::run_sweep(&r.config, &r.kinds, cli.threads)?;
            let table = result.table();
            let suffix = if matches!(cli.command, Command::Sweep) { "_sweep" } else { "" };
            let path = output_path(&cli.out, &format!("{}{suffix}.csv", r.name))?;
            table.write(&path)?;
            println!("wrote {} ({} delays)", path.display(), table.rows.len());
        }
        Command::Overlaps => {
            let table = run::run_overlap_diagnostics(&r.config, cli.threads)?;
            let path = output_path(&cli.out, &format!("{}_overlap_diagnostics.csv", r.name))?;
            table.write(&path)?;
            println!("wrote {} ({} delays)", path.display(), table.rows.len());
        }
        Command::Audit => {
            let report = run::run_audit(&r.config, cli.threads)?;
            print!("{}", report.render());
            report.outcome()?;
        }
    }
    Ok(())
}
