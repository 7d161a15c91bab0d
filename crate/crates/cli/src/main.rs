use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use otto_cli::check::{failures, run_checks, CheckOptions, Fault};
use otto_cli::config::{Format, ModeSel, RunConfig, Target};
use otto_cli::error::CliError;
use otto_cli::{cmd_optimize, cmd_report, cmd_sweep, figure_config, optimize_json, pretty, render_sweep, write_output};

#[derive(Parser)]
#[command(name = "otto", version, about = "Work and heat statistics of quantum Otto cycles")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// dephased, undephased or both
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// csv, json or svg
    #[arg(long, global = true)]
    format: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulants, transition probabilities and bounds at one point
    Report,
    /// Evaluate a 1D or 2D parameter grid
    Sweep,
    /// Search the measurement direction maximizing a target
    Optimize {
        /// work, efficiency or reliability_w (overrides the config)
        #[arg(long)]
        target: Option<String>,
    },
    /// Run every invariant suite
    Check {
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Regenerate the data of a shipped figure
    Figure {
        #[arg(value_parser = ["fig3", "fig4", "fig5", "fig6"])]
        name: String,
    },
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match (&cli.command, &cli.config) {
        (Command::Figure { name }, _) => figure_config(name)?,
        (_, Some(path)) => RunConfig::from_path(path)?,
        (_, None) => RunConfig::default(),
    };
    if let Some(m) = &cli.mode {
        cfg.mode = m.parse::<ModeSel>()?;
    }
    if let Some(o) = &cli.out {
        cfg.output.path = Some(o.clone());
    }
    if let Some(f) = &cli.format {
        cfg.output.format = f.parse::<Format>()?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = load(cli)?;
    let out = cfg.output.path.clone();
    match &cli.command {
        Command::Report => {
            let doc = cmd_report(&cfg)?;
            write_output(out.as_deref(), &pretty(&doc))
        }
        Command::Sweep | Command::Figure { .. } => {
            let table = cmd_sweep(&cfg)?;
            write_output(out.as_deref(), &render_sweep(&table, cfg.output.format, &cfg.output.columns))
        }
        Command::Optimize { target } => {
            if let Some(t) = target {
                cfg.target = Some(t.parse::<Target>()?);
            }
            let results = cmd_optimize(&cfg)?;
            write_output(out.as_deref(), &pretty(&optimize_json(&cfg, &results)))
        }
        Command::Check { inject_fault } => {
            let opts = CheckOptions {
                seed: cfg.seed,
                beta: cfg.beta_override,
                inject: *inject_fault,
            };
            let outcomes = run_checks(&opts);
            let text = match cfg.output.format {
                Format::Json => pretty(&serde_json::to_value(&outcomes).expect("outcomes serialize")),
                _ => outcomes.iter().map(|o| format!("{o}\n")).collect(),
            };
            write_output(out.as_deref(), &text)?;
            match failures(&outcomes) {
                0 => Ok(()),
                n => Err(CliError::CheckFailed(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("otto: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
