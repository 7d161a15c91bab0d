use std::f64::consts::PI;

use otto_core::engine::{cumulant_report, Mode};
use otto_core::qubit::{build_qubit_spec_with, NamedAxis, QubitParams, VChoice};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Target;
use crate::error::CliError;

pub const COARSE: usize = 64;
pub const ROUNDS: usize = 3;
pub const SHRINK: f64 = 4.0;
/// Half-width of each local grid, in units of its own step.
const LOCAL_HALF: usize = 8;
pub const NAMED_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeResult {
    pub target: Target,
    pub mode: Mode,
    pub value: f64,
    pub alpha: f64,
    pub chi: f64,
    pub named: NamedAxis,
    pub evaluations: usize,
}

pub fn objective(p: &QubitParams, v: VChoice, mode: Mode, target: Target) -> Option<f64> {
    let spec = build_qubit_spec_with(p, v).ok()?;
    let r = cumulant_report(&spec, mode);
    match target {
        Target::Work => Some(r.avg_w),
        Target::Efficiency => r.efficiency,
        Target::ReliabilityW => r.reliability_w,
    }
    .filter(|x| x.is_finite())
}

/// Grid search over the measurement direction `(alpha, chi)`, other
/// parameters fixed: a coarse grid, then local grids around the incumbent
/// with the step cut by `SHRINK` each round.
pub fn optimize(base: &QubitParams, v: VChoice, mode: Mode, target: Target) -> Result<OptimizeResult, CliError> {
    let eval = |pts: Vec<(f64, f64)>| -> Vec<(f64, f64, Option<f64>)> {
        crate::parallel(|| {
            pts.into_par_iter()
                .map(|(a, c)| {
                    let p = QubitParams { alpha: a, chi: c, ..*base };
                    (a, c, objective(&p, v, mode, target))
                })
                .collect()
        })
    };
    let better = |best: Option<(f64, f64, f64)>, cand: (f64, f64, Option<f64>)| match (best, cand.2) {
        (_, None) => best,
        (None, Some(x)) => Some((cand.0, cand.1, x)),
        (Some(b), Some(x)) => Some(if x > b.2 { (cand.0, cand.1, x) } else { b }),
    };

    let mut step_a = PI / (COARSE - 1) as f64;
    let mut step_c = 2.0 * PI / COARSE as f64;
    let coarse: Vec<(f64, f64)> = (0..COARSE)
        .flat_map(|i| (0..COARSE).map(move |j| (i as f64 * step_a, j as f64 * step_c)))
        .collect();
    let mut evaluations = coarse.len();
    let mut best = eval(coarse).into_iter().fold(None, better);
    let Some(_) = best else {
        return Err(CliError::TargetUndefined(target.name()));
    };

    for _ in 0..ROUNDS {
        let (a0, c0, _) = best.expect("incumbent exists");
        // the new grid spans two old steps either side of the incumbent
        step_a /= SHRINK;
        step_c /= SHRINK;
        let n = LOCAL_HALF as i64;
        let local: Vec<(f64, f64)> = (-n..=n)
            .flat_map(|i| (-n..=n).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let a = a0 + i as f64 * step_a;
                let c = (c0 + j as f64 * step_c).rem_euclid(2.0 * PI);
                (0.0..=PI).contains(&a).then_some((a, c))
            })
            .collect();
        evaluations += local.len();
        best = eval(local).into_iter().fold(best, better);
    }

    let (alpha, chi, value) = best.expect("incumbent exists");
    Ok(OptimizeResult {
        target,
        mode,
        value,
        alpha,
        chi,
        named: NamedAxis::classify(alpha, chi, NAMED_TOL),
        evaluations,
    })
}
