//! Command-line front end: `spectrum`, `decay`, `fit`, `fig3`, `modes`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use config::{Origin, PanelChoice, RunConfig, Settings};
use error::{CliError, CliResult};
use table::Table;

#[derive(Debug, Parser)]
#[command(
    name = "emdecay",
    version,
    about = "Transient eddy-current decay of permeable conducting targets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sphere decay roots, decay times and crossover times per order.
    Spectrum(Common),
    /// Exact and early-time decay curves and the voltage proxy.
    Decay(Common),
    /// Log-log power-law fits of a measured or synthetic decay.
    Fit(Common),
    /// Normalized decay-curve panels for contrasts 1, 5 and 100, with shape checks.
    Fig3(Common),
    /// Surface decay modes of an icosphere or OFF mesh.
    Modes(Common),
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// `key = value` run configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (or directory for `fig3 --panel all`); stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Start of the time grid (seconds; units of tau_c for fig3).
    #[arg(long, allow_negative_numbers = true)]
    pub tmin: Option<String>,
    /// End of the time grid.
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
    /// Permeability contrast mu_c / mu_b.
    #[arg(long, allow_negative_numbers = true)]
    pub mu_ratio: Option<String>,
    /// Highest order l (orders 1..=l_max).
    #[arg(long)]
    pub l_max: Option<String>,
    #[arg(long)]
    pub mesh_level: Option<String>,
    /// OFF mesh for `modes`.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Number of surface modes.
    #[arg(long)]
    pub modes: Option<String>,
    /// Panel contrast for fig3: 1, 5, 100 or all.
    #[arg(long)]
    pub panel: Option<String>,
    /// Input CSV for `fit`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Value column read by `fit`.
    #[arg(long)]
    pub column: Option<String>,
    /// Fit window `lo:hi`; repeatable.
    #[arg(long = "window")]
    pub windows: Vec<String>,
    /// Any config key as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Common {
    /// Defaults, then the config file, then flags.
    pub fn settings(&self) -> CliResult<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            s.parse_file(&path.display().to_string(), &text)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set `{kv}` is not key=value")))?;
            s.set(k.trim(), v.trim(), Origin::Flag)?;
        }
        let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("out", path_str(&self.out)),
            ("tmin", self.tmin.clone()),
            ("tmax", self.tmax.clone()),
            ("points", self.points.clone()),
            ("mu_ratio", self.mu_ratio.clone()),
            ("l_max", self.l_max.clone()),
            ("mesh_level", self.mesh_level.clone()),
            ("mesh", path_str(&self.mesh)),
            ("modes", self.modes.clone()),
            ("panel", self.panel.clone()),
            ("input", path_str(&self.input)),
            ("column", self.column.clone()),
            ("windows", (!self.windows.is_empty()).then(|| self.windows.join(","))),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.set(k, v, Origin::Flag)?;
            }
        }
        Ok(s)
    }
}

/// Outcome of one verb: tables to write plus lines for stderr.
#[derive(Debug, Default)]
pub struct Output {
    /// `(file name, table)`; a single unnamed table goes to `--out` or stdout.
    pub tables: Vec<(Option<String>, Table)>,
    pub notes: Vec<String>,
}

pub fn execute(cmd: &Command) -> CliResult<(Output, RunConfig)> {
    let common = match cmd {
        Command::Spectrum(c) | Command::Decay(c) | Command::Fit(c) | Command::Fig3(c) | Command::Modes(c) => c,
    };
    let cfg = RunConfig::from_settings(&common.settings()?)?;
    let mut out = Output::default();
    match cmd {
        Command::Spectrum(_) => out.tables.push((None, commands::spectrum(&cfg)?)),
        Command::Decay(_) => out.tables.push((None, commands::decay(&cfg)?)),
        Command::Fit(_) => out.tables.push((None, commands::fit(&cfg)?)),
        Command::Modes(_) => out.tables.push((None, commands::modes(&cfg)?)),
        Command::Fig3(_) => {
            let panels = match cfg.panel.unwrap_or(PanelChoice::All) {
                PanelChoice::One(p) => vec![p],
                PanelChoice::All => config::Panel::ALL.to_vec(),
            };
            let many = panels.len() > 1;
            for p in panels {
                let (data, checks) = commands::fig3(p, &cfg)?;
                for c in checks {
                    let status = if c.pass { "pass" } else { "FAIL" };
                    out.notes.push(
                        format!("panel {}: {status} {} {}", p.label(), c.name, c.detail)
                            .trim_end()
                            .to_string(),
                    );
                }
                let name = many.then(|| format!("fig3_mu{}.csv", p.label()));
                out.tables.push((name, data.to_table()));
            }
        }
    }
    Ok((out, cfg))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display(), e))
}

pub fn write_output(out: &Output, target: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    for (name, table) in &out.tables {
        let text = table.to_csv();
        match (name, target) {
            (Some(name), Some(dir)) => {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
                write_file(&dir.join(name), &text)?;
            }
            (Some(name), None) => {
                write!(stdout, "# {name}\n{text}").map_err(|e| CliError::io("stdout", e))?;
            }
            (None, Some(path)) => write_file(path, &text)?,
            (None, None) => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("stdout", e))?,
        }
    }
    Ok(())
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli.command).and_then(|(out, cfg)| {
        for n in &out.notes {
            eprintln!("{n}");
        }
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        write_output(&out, cfg.out.as_deref(), &mut lock)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("emdecay: {e}");
            e.exit_code()
        }
    }
}
