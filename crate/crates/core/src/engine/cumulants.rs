use num_complex::Complex64;
use serde::Serialize;

use super::{cycle_table, czero, ext_f64, Beta, CycleTable, EngineSpec, Mode};

/// Absolute threshold separating a nonzero average from zero.
pub const REGIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Engine,
    Accelerator,
    Heater,
    Idle,
}

impl Regime {
    pub fn classify(avg_w: f64, avg_qm: f64) -> Self {
        let t = REGIME_TOL;
        if avg_qm < -t {
            Regime::Heater
        } else if avg_qm > t && avg_w > t {
            Regime::Engine
        } else if avg_qm > t {
            Regime::Accelerator
        } else {
            Regime::Idle
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::Accelerator => "accelerator",
            Regime::Heater => "heater",
            Regime::Idle => "idle",
        }
    }
}

/// First and second cumulants of one cycle in one picture.
#[derive(Debug, Clone, Serialize)]
pub struct CumulantReport {
    pub mode: Mode,
    /// `<E1> .. <E4>`
    pub avg_e: [f64; 4],
    pub avg_w: f64,
    pub avg_qm: f64,
    pub avg_qc: f64,
    pub var_w: Complex64,
    pub var_qm: Complex64,
    pub var_qc: f64,
    /// Discarded imaginary part of `var_qc`; kept for the reality check.
    pub var_qc_im: f64,
    /// `cov[i][j] = <E_i E_j> - <E_i><E_j>`
    pub cov: [[Complex64; 4]; 4],
    /// `-beta <Q_C>`; `+inf` at zero temperature unless `<Q_C>` vanishes.
    #[serde(serialize_with = "ext_f64::serialize")]
    pub avg_sigma: f64,
    /// `<exp(-Sigma)>`; not defined at `beta = inf`.
    pub jarzynski: Option<Complex64>,
    pub efficiency: Option<f64>,
    pub reliability_w: Option<f64>,
    pub regime: Regime,
}

impl CumulantReport {
    /// `var / avg^2` using real parts; absent when the mean vanishes.
    pub fn relative_fluctuation(var: f64, avg: f64) -> Option<f64> {
        (avg.abs() > REGIME_TOL).then(|| var / (avg * avg))
    }

    pub fn rf_w(&self) -> Option<f64> {
        Self::relative_fluctuation(self.var_w.re, self.avg_w)
    }

    pub fn rf_qm(&self) -> Option<f64> {
        Self::relative_fluctuation(self.var_qm.re, self.avg_qm)
    }

    pub fn rf_qc(&self) -> Option<f64> {
        Self::relative_fluctuation(self.var_qc, self.avg_qc)
    }

    /// `<Q_M> / sqrt(Re var_qm)`
    pub fn reliability_qm(&self) -> Option<f64> {
        (self.var_qm.re > 1e-14).then(|| self.avg_qm / self.var_qm.re.sqrt())
    }
}

pub fn cumulant_report(spec: &EngineSpec, mode: Mode) -> CumulantReport {
    report_from_table(&cycle_table(spec, mode), spec.beta())
}

pub fn report_from_table(table: &CycleTable, beta: Beta) -> CumulantReport {
    let mut avg_e = [czero(); 4];
    let mut second = [[czero(); 4]; 4];
    for e in &table.entries {
        let en = e.energies();
        for i in 0..4 {
            avg_e[i] += e.weight * en[i];
            for j in i..4 {
                second[i][j] += e.weight * (en[i] * en[j]);
            }
        }
    }
    let mut cov = [[czero(); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            cov[i][j] = second[i][j] - avg_e[i] * avg_e[j];
            cov[j][i] = cov[i][j];
        }
    }

    let mean = |f: &dyn Fn(&super::CycleEntry) -> f64| table.expect(f);
    let m_w = mean(&|e| e.work());
    let m_qm = mean(&|e| e.heat_hot());
    let m_qc = mean(&|e| e.heat_cold());
    let var_w = mean(&|e| e.work().powi(2)) - m_w * m_w;
    let var_qm = mean(&|e| e.heat_hot().powi(2)) - m_qm * m_qm;
    let var_qc = mean(&|e| e.heat_cold().powi(2)) - m_qc * m_qc;

    let avg_w = m_w.re;
    let avg_qm = m_qm.re;
    let avg_qc = m_qc.re;

    let (avg_sigma, jarzynski) = if beta.is_infinite() {
        let s = if avg_qc < -REGIME_TOL {
            f64::INFINITY
        } else {
            0.0
        };
        (s, None)
    } else {
        // p_n e^{beta e1} e^{-beta e4} = p_l, so the sum runs over
        // conditional weights without exponentials that could overflow.
        let jz: Complex64 = table
            .entries
            .iter()
            .map(|e| e.conditional * table.populations[e.l])
            .sum();
        (-beta.value() * avg_qc, Some(jz))
    };

    let efficiency = (avg_qm.abs() > REGIME_TOL).then(|| avg_w / avg_qm);
    let reliability_w = (var_w.re > 1e-14).then(|| avg_w / var_w.re.sqrt());

    CumulantReport {
        mode: table.mode,
        avg_e: avg_e.map(|z| z.re),
        avg_w,
        avg_qm,
        avg_qc,
        var_w,
        var_qm,
        var_qc: var_qc.re,
        var_qc_im: var_qc.im,
        cov,
        avg_sigma,
        jarzynski,
        efficiency,
        reliability_w,
        regime: Regime::classify(avg_w, avg_qm),
    }
}
