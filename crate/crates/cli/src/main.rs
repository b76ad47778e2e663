use std::process::ExitCode;

use chainscope::config::{Command, Format, Grid, RunConfig, Source, DEFAULT_CAP};
use chainscope::{CliError, Result};
use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "chainscope", version, about = "Chain recurrence, shadowing and entropy analysis of finite systems")]
struct Args {
    command: Command,
    /// System file in the JSON format written by `export`.
    #[arg(long, conflicts_with = "builder")]
    system: Option<String>,
    /// Named builder: odometer, full_shift, example31, example41.
    #[arg(long)]
    builder: Option<String>,
    /// Builder parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    /// Parameter grid as JSON, or `@path` to read it from a file.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 4096)]
    exact_cap: usize,
    #[arg(long, env = "CHAINSCOPE_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn json_arg(text: &str) -> Result<serde_json::Value> {
    let text = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => text.to_string(),
    };
    Ok(serde_json::from_str(&text)?)
}

fn config(args: Args) -> Result<RunConfig> {
    let params = match &args.params {
        Some(p) => json_arg(p)?,
        None => serde_json::json!({}),
    };
    let source = match (args.system, args.builder) {
        (Some(path), _) => Source::File(path),
        (None, Some(name)) => Source::Builder { name, params },
        (None, None) => Source::Default { params },
    };
    let grid: Grid = match &args.grid {
        Some(g) => serde_json::from_value(json_arg(g)?)
            .map_err(|e| CliError::Config(format!("bad grid: {e}")))?,
        None => Grid::default(),
    };
    Ok(RunConfig {
        command: args.command,
        source,
        grid,
        exact_cap: args.exact_cap,
        cap: args.cap,
        seed: args.seed,
        format: args.format,
        out: args.out,
    })
}

fn main_inner(args: Args) -> Result<()> {
    let cfg = config(args)?;
    let out = chainscope::run(&cfg)?;
    let text = chainscope::render(&cfg, &out)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chainscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
