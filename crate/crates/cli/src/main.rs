use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qoseries_cli::commands::{self, CmdError, Format, Method, SeriesArgs, What};
use qoseries_cli::input::{parse_section_lattice, InputSpec};

/// Exact motivic Poincaré series of quasi-ordinary and toric germs.
#[derive(Parser)]
#[command(name = "qoseries", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON input document.
    #[arg(long)]
    input: PathBuf,
    /// Output format.
    #[arg(long, default_value = "text", value_parser = ["text", "json"])]
    format: String,
    /// Lattice used for coordinate sections.
    #[arg(long, value_parser = ["ambient", "branch"])]
    section_lattice: Option<String>,
    /// Point budget per enumeration box.
    #[arg(long)]
    box_limit: Option<u64>,
    /// Guard window for numerator reconstruction.
    #[arg(long)]
    guard: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the input and print the lattice chain.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print jacobian generators, fan rays, contributing cones and poles.
    Report {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute the interior or geometric series.
    Series {
        #[command(flatten)]
        common: CommonArgs,
        /// Which series to compute.
        #[arg(long, default_value = "interior", value_parser = ["interior", "geom"])]
        what: String,
        /// Expansion order for tables and comparisons.
        #[arg(long)]
        order: Option<usize>,
        /// Closed form, oracle enumeration, or a checked comparison.
        #[arg(long, default_value = "closed", value_parser = ["closed", "oracle", "both"])]
        method: String,
    },
    /// Compute the motivic volume of the arc space.
    Volume {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn load(common: &CommonArgs) -> Result<InputSpec, CmdError> {
    let text = std::fs::read_to_string(&common.input).map_err(|e| {
        CmdError::Input(format!("cannot read {}: {e}", common.input.display()))
    })?;
    let mut spec = InputSpec::from_json(&text).map_err(|e| CmdError::Input(e.to_string()))?;
    if let Some(s) = &common.section_lattice {
        parse_section_lattice(s).map_err(|e| CmdError::Input(e.to_string()))?;
        spec.options.section_lattice = Some(s.clone());
    }
    if let Some(b) = common.box_limit {
        spec.options.box_limit = Some(b);
    }
    if let Some(g) = common.guard {
        spec.options.guard = Some(g);
    }
    Ok(spec)
}

fn format_of(common: &CommonArgs) -> Format {
    if common.format == "json" {
        Format::Json
    } else {
        Format::Text
    }
}

fn run() -> Result<String, CmdError> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Validate { common } => {
            let spec = load(common)?;
            commands::cmd_validate(&spec, format_of(common))
        }
        Cmd::Report { common } => {
            let spec = load(common)?;
            commands::cmd_report(&spec, format_of(common))
        }
        Cmd::Series {
            common,
            what,
            order,
            method,
        } => {
            let spec = load(common)?;
            let args = SeriesArgs {
                what: if what == "geom" { What::Geom } else { What::Interior },
                method: match method.as_str() {
                    "oracle" => Method::Oracle,
                    "both" => Method::Both,
                    _ => Method::Closed,
                },
                order: *order,
                format: format_of(common),
            };
            commands::cmd_series(&spec, &args)
        }
        Cmd::Volume { common } => {
            let spec = load(common)?;
            commands::cmd_volume(&spec, format_of(common))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
