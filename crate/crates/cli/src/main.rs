//! `coprime-floors`: batch experiments on coprimality with polynomial floors.
//!
//! ```text
//! coprime-floors count --alpha 'surd:(0+1*sqrt(2))/1' --x 100000 --workers 4
//! coprime-floors density --config density.toml --format csv --out density.csv
//! coprime-floors bounds --set bound=monotone --set u=2 --set v=4 --set M=20 --set variant=inverse_geometric
//! ```
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 when a floor
//! cannot be certified within the precision ceiling, 4 when a resource
//! limit is hit, 1 otherwise.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Command, Format};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "coprime-floors", version, about = "Coprimality of n with polynomial floors")]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Precision ceiling for certified floors, in bits.
    #[arg(long)]
    max_bits: Option<u32>,
    /// Coefficient text form; repeat for each coordinate.
    #[arg(long)]
    alpha: Vec<String>,
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Vec<u32>,
    #[arg(long)]
    x: Option<u64>,
    /// Any config key, as KEY=VALUE with a TOML value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn assemble(cli: &Cli) -> Result<config::ExperimentConfig, CliError> {
    use toml::Value as V;
    let mut table = config::load_table(cli.config.as_deref())?;
    for s in &cli.set {
        let (k, v) = config::parse_assignment(s)?;
        table.insert(k, v);
    }
    if !cli.alpha.is_empty() {
        table.insert("alpha".into(), V::Array(cli.alpha.iter().cloned().map(V::String).collect()));
    }
    if !cli.m.is_empty() {
        table.insert("m".into(), V::Array(cli.m.iter().map(|&m| V::Integer(m.into())).collect()));
    }
    let ints = [
        ("x", cli.x.map(|v| v as i64)),
        ("workers", cli.workers.map(|v| v as i64)),
        ("max_bits", cli.max_bits.map(i64::from)),
    ];
    for (k, v) in ints {
        if let Some(v) = v {
            table.insert(k.into(), V::Integer(v));
        }
    }
    if let Some(out) = &cli.out {
        table.insert("out".into(), V::String(out.display().to_string()));
    }
    if let Some(f) = cli.format {
        let name = if f == Format::Csv { "csv" } else { "json" };
        table.insert("format".into(), V::String(name.into()));
    }
    config::from_table(table)
}

fn main_inner(cli: &Cli) -> Result<(), CliError> {
    let cfg = assemble(cli)?;
    let (report, table) = run::run(cli.command, &cfg)?;
    let value = serde_json::to_value(&report)?;
    let bytes = output::render(cfg.format.unwrap_or_default(), &value, &table)?;
    output::emit(&bytes, cfg.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coprime-floors: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
