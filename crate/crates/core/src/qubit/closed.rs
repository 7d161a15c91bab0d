use num_complex::Complex64;
use serde::Serialize;

use super::{QubitParams, TransitionProbs};
use crate::engine::{Beta, CumulantReport, Mode, Regime};

/// Closed-form first and second cumulants of `W`, `Q_M`, `Q_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub mode: Mode,
    pub avg_w: f64,
    pub avg_qm: f64,
    pub avg_qc: f64,
    pub var_w: f64,
    pub var_qm: f64,
    pub var_qc: f64,
}

impl ClosedFormReport {
    pub fn efficiency(&self) -> Option<f64> {
        (self.avg_qm.abs() > crate::engine::REGIME_TOL).then(|| self.avg_w / self.avg_qm)
    }

    pub fn reliability_w(&self) -> Option<f64> {
        (self.var_w > 1e-14).then(|| self.avg_w / self.var_w.sqrt())
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.avg_w, self.avg_qm)
    }

    /// Largest gap to an enumerated report, comparing real parts.
    pub fn max_deviation(&self, r: &CumulantReport) -> f64 {
        [
            self.avg_w - r.avg_w,
            self.avg_qm - r.avg_qm,
            self.avg_qc - r.avg_qc,
            self.var_w - r.var_w.re,
            self.var_qm - r.var_qm.re,
            self.var_qc - r.var_qc,
        ]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
    }
}

pub fn dephased_closed(tp: &TransitionProbs, nu1: f64, nu2: f64, beta: Beta) -> ClosedFormReport {
    let t = beta.tanh_of(nu1);
    let TransitionProbs {
        delta_p: dp,
        theta: th,
        zeta: ze,
        ..
    } = *tp;
    let avg_qm = 2.0 * (1.0 - 2.0 * dp) * th * nu2 * t;
    let x = th + (1.0 - 2.0 * th) * (dp + ze - 2.0 * dp * ze);
    let avg_qc = -2.0 * x * nu1 * t;
    let avg_w = avg_qm + avg_qc;
    ClosedFormReport {
        mode: Mode::Dephased,
        avg_w,
        avg_qm,
        avg_qc,
        var_w: 4.0 * x * nu1 * nu1 + 8.0 * th * (dp + ze - 1.0) * nu1 * nu2 + 4.0 * th * nu2 * nu2
            - avg_w * avg_w,
        var_qm: 4.0 * th * nu2 * nu2 - avg_qm * avg_qm,
        var_qc: 4.0 * x * nu1 * nu1 - avg_qc * avg_qc,
    }
}

pub fn undephased_closed(tp: &TransitionProbs, nu1: f64, nu2: f64, beta: Beta) -> ClosedFormReport {
    let t = beta.tanh_of(nu1);
    let avg_qc = -2.0 * tp.zeta_sup_c * nu1 * t;
    let avg_qm = 2.0 * (tp.theta_c - tp.delta_p) * nu2 * t;
    let avg_w = avg_qm + avg_qc;
    let second_w = 4.0 * nu1 * nu2 * (tp.delta_p + tp.zeta - tp.theta_c - tp.zeta_sub_c)
        + 4.0 * (nu1 * nu1 * tp.zeta_sup_c + nu2 * nu2 * tp.theta);
    ClosedFormReport {
        mode: Mode::Undephased,
        avg_w,
        avg_qm,
        avg_qc,
        var_w: second_w - avg_w * avg_w,
        var_qm: 4.0 * tp.theta * nu2 * nu2 - avg_qm * avg_qm,
        var_qc: 4.0 * tp.zeta_sup_c * nu1 * nu1 - avg_qc * avg_qc,
    }
}

/// `sum_s p_s exp(i s a)` over a thermal two-level population with
/// `b = beta nu1`, written so that `b = inf` is exact.
fn thermal_phase(a: f64, beta: Beta, nu1: f64) -> Complex64 {
    let excited = if beta.is_infinite() {
        0.0
    } else {
        (-2.0 * beta.value() * nu1).exp()
    };
    (Complex64::from_polar(excited, a) + Complex64::from_polar(1.0, -a)) / (1.0 + excited)
}

/// Eight-term characteristic function of the monitored qubit cycle.
pub fn dephased_cf_closed(tp: &TransitionProbs, nu1: f64, nu2: f64, beta: Beta, g: [f64; 4]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    // Each term fixes whether the second, third and fourth outcomes flip
    // relative to the one before; the overall sign is summed thermally.
    for flips in 0..8u8 {
        let f2 = flips & 1 != 0;
        let f3 = flips & 2 != 0;
        let f4 = flips & 4 != 0;
        let w = pick(f2, tp.delta_p) * pick(f3, tp.theta) * pick(f4, tp.zeta);
        if w == 0.0 {
            continue;
        }
        let s2 = sign(f2);
        let s3 = s2 * sign(f3);
        let s4 = s3 * sign(f4);
        let a = g[0] * nu1 + s2 * g[1] * nu2 + s3 * g[2] * nu2 + s4 * g[3] * nu1;
        acc += thermal_phase(a, beta, nu1) * w;
    }
    acc
}

fn pick(flip: bool, p: f64) -> f64 {
    if flip {
        p
    } else {
        1.0 - p
    }
}

fn sign(flip: bool) -> f64 {
    if flip {
        -1.0
    } else {
        1.0
    }
}

/// The two terms of `<Q_M>` in the unmonitored cycle written in the raw
/// angles: the monitored value and the coherence correction.
pub fn qm_explicit_terms(p: &QubitParams) -> [f64; 2] {
    let t = p.tanh();
    let (d, a, chi, phi) = (p.delta, p.alpha, p.chi, p.phi);
    let first = (1.0 - 2.0 * d) * (1.0 - chi.cos().powi(2) * a.sin().powi(2)) * p.nu2 * t;
    let second = p.nu2
        * (d * (1.0 - d)).sqrt()
        * a.sin()
        * (a.sin() * phi.sin() * (2.0 * chi).sin() - 2.0 * a.cos() * phi.cos() * chi.cos())
        * t;
    [first, second]
}

pub fn qm_explicit_angles(p: &QubitParams) -> f64 {
    let [a, b] = qm_explicit_terms(p);
    a + b
}
