//! Command implementations for the `otto` binary.

pub mod check;
pub mod config;
pub mod error;
pub mod eval;
pub mod optimize;
pub mod svg;
pub mod sweep;

use std::path::Path;

use serde_json::json;

use crate::config::{Format, RunConfig, Source};
use crate::error::CliError;
use crate::eval::{evaluate, Cell};
use crate::optimize::OptimizeResult;
use crate::sweep::{run_sweep, SweepTable};

/// Runs `f` on a pool capped by `OTTO_THREADS`, if set.
pub fn parallel<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var("OTTO_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Shipped figure configs, by name.
pub const FIGURES: [(&str, &str); 4] = [
    ("fig3", include_str!("../configs/fig3.json")),
    ("fig4", include_str!("../configs/fig4.json")),
    ("fig5", include_str!("../configs/fig5.json")),
    ("fig6", include_str!("../configs/fig6.json")),
];

pub fn figure_config(name: &str) -> Result<RunConfig, CliError> {
    let (_, text) = FIGURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Config(format!("unknown figure {name:?}")))?;
    RunConfig::from_json_str(text, None)
}

pub fn cmd_report(cfg: &RunConfig) -> Result<serde_json::Value, CliError> {
    if cfg.sweep.is_some() {
        return Err(CliError::Config("report takes no sweep; use the sweep command".into()));
    }
    let modes = cfg.mode.modes();
    let (mut doc, spec) = match &cfg.source {
        Source::Qubit { params, v } => {
            let spec = otto_core::qubit::build_qubit_spec_with(params, *v)?;
            (json!({ "params": params, "v": v }), spec)
        }
        Source::SpecFile { path, spec } => (json!({ "spec_file": path }), (**spec).clone()),
    };
    let point = evaluate(&spec, modes);
    doc["dim"] = json!(spec.dim());
    doc["beta"] = json!(spec.beta());
    doc["transition_probs"] = json!(point.transition_probs);
    for (mode, r) in modes.iter().zip(&point.modes) {
        doc[mode.name()] = json!(r);
    }
    Ok(doc)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepTable, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep command needs sweep.axis1".into()))?;
    let (params, v) = cfg
        .qubit()
        .ok_or_else(|| CliError::Config("sweeps need the qubit model".into()))?;
    run_sweep(&params, v, sweep, cfg.mode.modes())
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<Vec<OptimizeResult>, CliError> {
    let target = cfg
        .target
        .ok_or_else(|| CliError::Config("optimize needs a target".into()))?;
    let (params, v) = cfg
        .qubit()
        .ok_or_else(|| CliError::Config("optimize needs the qubit model".into()))?;
    cfg.mode
        .modes()
        .iter()
        .map(|&m| optimize::optimize(&params, v, m, target))
        .collect()
}

/// Renders a sweep in the requested format.
pub fn render_sweep(table: &SweepTable, format: Format, columns: &[String]) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => pretty(&table.to_json()),
        Format::Svg => sweep_svg(table, columns),
    }
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn sweep_svg(table: &SweepTable, columns: &[String]) -> String {
    let default = vec![table.header[table.axes.len()].clone()];
    let columns = if columns.is_empty() { &default } else { columns };
    let nums = |name: &str| -> Vec<f64> {
        table
            .column(name)
            .unwrap_or_default()
            .iter()
            .map(|c| c.as_f64().unwrap_or(f64::NAN))
            .collect()
    };
    let a1 = table.axes[0];
    match table.axes.get(1) {
        None => {
            let xs = nums(a1.name.name());
            let series: Vec<svg::Series> = columns
                .iter()
                .map(|c| svg::Series {
                    name: c.clone(),
                    points: xs.iter().copied().zip(nums(c)).collect(),
                })
                .collect();
            svg::line_chart(&columns.join(", "), a1.name.name(), "value", &series)
        }
        Some(a2) => {
            let col = &columns[0];
            let zs = nums(col);
            let xs = a1.values();
            let ys = a2.values();
            if a1.steps <= 8 {
                let series: Vec<svg::Series> = xs
                    .iter()
                    .enumerate()
                    .map(|(i, x)| svg::Series {
                        name: format!("{} = {}", a1.name, Cell::Num(*x).to_csv()),
                        points: ys.iter().copied().zip(zs[i * ys.len()..(i + 1) * ys.len()].iter().copied()).collect(),
                    })
                    .collect();
                svg::line_chart(col, a2.name.name(), col, &series)
            } else {
                let z: Vec<Vec<Option<f64>>> = zs
                    .chunks(ys.len())
                    .map(|row| row.iter().map(|v| v.is_finite().then_some(*v)).collect())
                    .collect();
                svg::heatmap(col, a1.name.name(), a2.name.name(), &xs, &ys, &z)
            }
        }
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Output {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Optimization results as a JSON document.
pub fn optimize_json(cfg: &RunConfig, results: &[OptimizeResult]) -> serde_json::Value {
    let params = cfg.qubit().map(|(p, _)| p);
    let mut doc = json!({ "params": params, "results": {} });
    for r in results {
        doc["results"][r.mode.name()] = json!({
            "target": r.target,
            "value": r.value,
            "alpha": r.alpha,
            "chi": r.chi,
            "named": r.named,
            "evaluations": r.evaluations,
        });
    }
    doc
}

