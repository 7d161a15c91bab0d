use otto_core::engine::Mode;
use otto_core::qubit::{build_qubit_spec_with, QubitParams, VChoice};
use rayon::prelude::*;

use crate::config::{Axis, Sweep};
use crate::error::CliError;
use crate::eval::{evaluate, result_cells, result_header, Cell};

/// Sweep output: header plus one row per grid point in lexicographic order
/// (`axis1` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub axes: Vec<Axis>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self.header.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Grid coordinates in lexicographic order.
pub fn grid(sweep: &Sweep) -> Vec<Vec<f64>> {
    let first = sweep.axis1.values();
    match sweep.axis2 {
        None => first.into_iter().map(|x| vec![x]).collect(),
        Some(a2) => {
            let second = a2.values();
            first
                .iter()
                .flat_map(|&x| second.iter().map(move |&y| vec![x, y]))
                .collect()
        }
    }
}

pub fn point_params(base: &QubitParams, axes: &[Axis], coords: &[f64]) -> Result<QubitParams, CliError> {
    let mut p = *base;
    for (a, &x) in axes.iter().zip(coords) {
        a.name.apply(&mut p, x)?;
    }
    p.validate()?;
    Ok(p)
}

pub fn run_sweep(base: &QubitParams, v: VChoice, sweep: &Sweep, modes: &[Mode]) -> Result<SweepTable, CliError> {
    let axes = sweep.axes();
    let points = grid(sweep);
    // validate the whole grid before spending time on it
    let params = points
        .iter()
        .map(|c| point_params(base, &axes, c))
        .collect::<Result<Vec<_>, _>>()?;
    let results = crate::parallel(|| {
        params
            .par_iter()
            .map(|p| build_qubit_spec_with(p, v).map(|spec| evaluate(&spec, modes)))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut header: Vec<String> = axes.iter().map(|a| a.name.name().to_string()).collect();
    header.extend(result_header(modes));
    let rows = points
        .iter()
        .zip(&results)
        .map(|(coords, r)| {
            let mut row: Vec<Cell> = coords.iter().map(|&x| Cell::Num(x)).collect();
            row.extend(result_cells(r));
            row
        })
        .collect();
    Ok(SweepTable { header, rows, axes })
}

/// Compares two CSV documents cell by cell; numeric cells within `tol`,
/// other cells exactly. Returns the largest numeric difference.
pub fn csv_max_diff(a: &str, b: &str, tol: f64) -> Result<f64, String> {
    let la: Vec<&str> = a.lines().collect();
    let lb: Vec<&str> = b.lines().collect();
    if la.len() != lb.len() {
        return Err(format!("row count {} vs {}", la.len(), lb.len()));
    }
    if la.first() != lb.first() {
        return Err("headers differ".into());
    }
    let mut worst = 0.0f64;
    for (i, (ra, rb)) in la.iter().zip(&lb).enumerate().skip(1) {
        let ca: Vec<&str> = ra.split(',').collect();
        let cb: Vec<&str> = rb.split(',').collect();
        if ca.len() != cb.len() {
            return Err(format!("line {}: column count differs", i + 1));
        }
        for (x, y) in ca.iter().zip(&cb) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) if u.is_finite() && v.is_finite() => {
                    let d = (u - v).abs();
                    worst = worst.max(d);
                    if d > tol {
                        return Err(format!("line {}: {x} vs {y}", i + 1));
                    }
                }
                _ if x == y => {}
                _ => return Err(format!("line {}: {x:?} vs {y:?}", i + 1)),
            }
        }
    }
    Ok(worst)
}
