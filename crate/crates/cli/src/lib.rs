//! `halcyon` command line: ingest polygon files into feature crates, inspect
//! and query them, render tiles offline and run the tile service.

pub mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use halcyon_core::Error;
use halcyon_service::ServiceError;
use thiserror::Error as ThisError;

pub use commands::{cmd_ingest, cmd_query, cmd_render, cmd_serve, cmd_stats, cmd_synth, IngestSummary, DEFAULT_CLASS};

#[derive(Debug, Parser)]
#[command(name = "halcyon", version, about = "Hilbert-curve feature crates for whole-slide images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode WKT / GeoJSON / line-delimited polygon files into a crate.
    Ingest(IngestArgs),
    /// Vertex points versus Hilbert ranges per polygon.
    Stats(StatsArgs),
    /// Polygons intersecting a region.
    Query(QueryArgs),
    /// Render one tile request to a file, as the service would.
    Render(RenderArgs),
    /// Run the tile service.
    Serve(ServeArgs),
    /// Write synthetic nuclei as line-delimited WKT.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Input files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Source image width in pixels.
    #[arg(long)]
    pub width: u64,
    /// Source image height in pixels.
    #[arg(long)]
    pub height: u64,
    #[arg(long, default_value = "features")]
    pub layer: String,
    /// Class code for records that carry none.
    #[arg(long = "class", default_value = DEFAULT_CLASS)]
    pub class_code: String,
    /// Coarsest pyramid curve order [default: min(8, base order)].
    #[arg(long)]
    pub min_order: Option<u8>,
    /// Polygons covering fewer cells than this at a level are left out of it.
    #[arg(long, default_value_t = 1)]
    pub drop_threshold: u64,
    /// Skip unreadable records instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Dataset name [default: the output file stem].
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value = "")]
    pub description: String,
    #[arg(long, default_value = "")]
    pub creator: String,
    #[arg(long, default_value = "")]
    pub license: String,
    /// ISO-8601 publication date, stored verbatim.
    #[arg(long, default_value = "")]
    pub date_published: String,
    #[arg(long = "keyword")]
    pub keywords: Vec<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    pub crate_path: PathBuf,
    /// Only this layer [default: every layer].
    #[arg(long)]
    pub layer: Option<String>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryFormat {
    Ids,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    pub crate_path: PathBuf,
    #[arg(long)]
    pub layer: String,
    /// `x,y,w,h` in base-image pixels [default: the whole image].
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long, value_enum, default_value_t = QueryFormat::Ids)]
    pub format: QueryFormat,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    pub crate_path: PathBuf,
    #[arg(long)]
    pub layer: String,
    /// `{id}/{region}/{size}/{rotation}/{quality}.{format}`, optionally with a
    /// leading `/iiif/`.
    #[arg(long)]
    pub request: String,
    /// Layer style JSON [default: classes numbered 1, 2, 3, ... in sorted order].
    #[arg(long)]
    pub style: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    pub config: PathBuf,
    /// Overrides the config's `bind` address.
    #[arg(long)]
    pub bind: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub width: u64,
    #[arg(long)]
    pub height: u64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4.0)]
    pub min_radius: f64,
    #[arg(long, default_value_t = 12.0)]
    pub max_radius: f64,
    /// Relative radial noise per vertex.
    #[arg(long, default_value_t = 0.15)]
    pub jitter: f64,
    #[arg(long, default_value_t = 24)]
    pub vertices: usize,
    /// Output file [default: stdout].
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 2,
    Parse = 3,
    Io = 4,
    Validation = 5,
}

#[derive(Debug, ThisError)]
#[error("{message}")]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ExitKind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

pub fn kind_of(err: &Error) -> ExitKind {
    match err {
        Error::Parse { .. } | Error::UnsupportedGeometry(_) | Error::Json(_) => ExitKind::Parse,
        Error::Io(_) | Error::Zip(_) | Error::Image(_) => ExitKind::Io,
        Error::BadRequest(_) | Error::NotImplemented(_) => ExitKind::Usage,
        _ => ExitKind::Validation,
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError { kind: kind_of(&err), message: err.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::new(ExitKind::Io, err.to_string())
    }
}

impl From<ServiceError> for CliError {
    fn from(err: ServiceError) -> Self {
        let kind = match &err {
            ServiceError::Config(_) => ExitKind::Validation,
            ServiceError::Load { source, .. } => kind_of(source),
            ServiceError::Io(_) => ExitKind::Io,
        };
        CliError::new(kind, err.to_string())
    }
}

/// Runs one parsed command, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(args) => {
            let summary = cmd_ingest(&args)?;
            writeln!(out, "{summary}")?;
        }
        Command::Stats(args) => out.write_all(cmd_stats(&args)?.as_bytes())?,
        Command::Query(args) => out.write_all(cmd_query(&args)?.as_bytes())?,
        Command::Render(args) => {
            let bytes = cmd_render(&args)?;
            std::fs::write(&args.output, bytes)?;
        }
        Command::Serve(args) => cmd_serve(&args)?,
        Command::Synth(args) => {
            let text = cmd_synth(&args)?;
            match &args.output {
                Some(path) => std::fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}
