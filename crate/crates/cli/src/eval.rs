use otto_core::engine::{cumulant_report, CumulantReport, EngineSpec, Mode};
use otto_core::qubit::{bounds_report, transition_probs, BoundsReport, TransitionProbs};
use serde::Serialize;

/// One picture of the cycle at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct ModeResult {
    pub cumulants: CumulantReport,
    /// Qubit-only; absent for other dimensions.
    pub bounds: Option<BoundsReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub transition_probs: Option<TransitionProbs>,
    pub modes: Vec<ModeResult>,
}

pub fn evaluate(spec: &EngineSpec, modes: &[Mode]) -> PointResult {
    let tp = (spec.dim() == 2).then(|| transition_probs(spec).ok()).flatten();
    let modes = modes
        .iter()
        .map(|&mode| ModeResult {
            cumulants: cumulant_report(spec, mode),
            bounds: tp.and_then(|_| bounds_report(spec, mode).ok()),
        })
        .collect();
    PointResult {
        transition_probs: tp,
        modes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(&'static str),
    Empty,
}

impl Cell {
    fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    /// Shortest round-trip decimal; `inf` and `-inf` for infinities.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Text(s) => s.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) if x.is_finite() => serde_json::json!(x),
            Cell::Num(x) => serde_json::json!(format!("{x:?}")),
            Cell::Text(s) => serde_json::json!(s),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

pub const CUMULANT_COLUMNS: [&str; 12] = [
    "avg_w", "avg_qm", "avg_qc", "var_w_re", "var_w_im", "var_qm_re", "var_qm_im", "var_qc", "eff", "rel_w", "sigma",
    "regime",
];

pub const BOUNDS_COLUMNS: [&str; 15] = [
    "rf_w",
    "rf_qm",
    "rf_qc",
    "tur_bound",
    "appc_bound",
    "r_qmd",
    "eta_sq",
    "var_ratio",
    "thm2_gap",
    "thm2_gap_closed",
    "rf_gap_w_qm",
    "rf_gap_w_qc",
    "rf_gap_w_qm_closed",
    "rf_gap_w_qc_closed",
    "kd_discriminant",
];

fn cumulant_cells(r: &CumulantReport) -> [Cell; 12] {
    [
        Cell::Num(r.avg_w),
        Cell::Num(r.avg_qm),
        Cell::Num(r.avg_qc),
        Cell::Num(r.var_w.re),
        Cell::Num(r.var_w.im),
        Cell::Num(r.var_qm.re),
        Cell::Num(r.var_qm.im),
        Cell::Num(r.var_qc),
        Cell::opt(r.efficiency),
        Cell::opt(r.reliability_w),
        Cell::Num(r.avg_sigma),
        Cell::Text(r.regime.name()),
    ]
}

fn bounds_cells(b: Option<&BoundsReport>) -> [Cell; 15] {
    let Some(b) = b else {
        return std::array::from_fn(|_| Cell::Empty);
    };
    [
        Cell::opt(b.rf_w),
        Cell::opt(b.rf_qm),
        Cell::opt(b.rf_qc),
        Cell::opt(b.tur_bound),
        Cell::opt(b.appc_bound),
        Cell::opt(b.r_qmd),
        Cell::opt(b.eff_sq_vs_var_ratio.map(|x| x.0)),
        Cell::opt(b.eff_sq_vs_var_ratio.map(|x| x.1)),
        Cell::Num(b.thm2_gap),
        Cell::opt(b.thm2_gap_closed),
        Cell::opt(b.rf_gap_w_qm),
        Cell::opt(b.rf_gap_w_qc),
        Cell::opt(b.rf_gap_w_qm_closed),
        Cell::opt(b.rf_gap_w_qc_closed),
        Cell::Num(b.kd_discriminant),
    ]
}

/// Header after the grid axes: cumulant block per mode, then bounds per mode.
pub fn result_header(modes: &[Mode]) -> Vec<String> {
    let mut h = Vec::new();
    for m in modes {
        h.extend(CUMULANT_COLUMNS.iter().map(|c| format!("{}_{c}", m.name())));
    }
    for m in modes {
        h.extend(BOUNDS_COLUMNS.iter().map(|c| format!("{}_{c}", m.name())));
    }
    h
}

pub fn result_cells(p: &PointResult) -> Vec<Cell> {
    let mut cells = Vec::new();
    for m in &p.modes {
        cells.extend(cumulant_cells(&m.cumulants));
    }
    for m in &p.modes {
        cells.extend(bounds_cells(m.bounds.as_ref()));
    }
    cells
}
