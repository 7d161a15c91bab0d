use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::{
    build_qubit_spec, transition_probs, undephased_closed, QubitError, QubitParams, TransitionProbs,
};
use crate::engine::{cumulant_report, dephase_in_basis, off_diagonal_part, CumulantReport, EngineSpec, Mode};

/// Denominators below this make a ratio absent.
const DENOM_TOL: f64 = 1e-12;

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den.abs() > DENOM_TOL).then(|| num / den)
}

fn half_gaps(spec: &EngineSpec) -> (f64, f64) {
    let l1 = spec.h1().eigenvalues();
    let l2 = spec.h2().eigenvalues();
    ((l1[1] - l1[0]) / 2.0, (l2[1] - l2[0]) / 2.0)
}

/// `x coth x`, continuous at zero.
fn x_coth_x(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0
    } else {
        x / x.tanh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub mode: Mode,
    pub rf_w: Option<f64>,
    pub rf_qm: Option<f64>,
    pub rf_qc: Option<f64>,
    /// `2 / <Sigma> - 1`
    pub tur_bound: Option<f64>,
    /// `2 beta nu1 coth(beta nu1) / <Sigma> - 1`
    pub appc_bound: Option<f64>,
    /// Work reliability `<W> / sqrt(var W)` of the chosen mode.
    pub r_wd_or_wud: Option<f64>,
    pub r_qmd: Option<f64>,
    pub eff: Option<f64>,
    /// `(eta^2, var W / var Q_M)`
    pub eff_sq_vs_var_ratio: Option<(f64, f64)>,
    /// Enumerated `var Q_M - var W` (real parts).
    pub thm2_gap: f64,
    /// Closed form of the same gap; only for the unmonitored cycle with `V = U†`.
    pub thm2_gap_closed: Option<f64>,
    pub rf_gap_w_qm: Option<f64>,
    pub rf_gap_w_qc: Option<f64>,
    pub rf_gap_w_qm_closed: Option<f64>,
    pub rf_gap_w_qc_closed: Option<f64>,
    pub kd_discriminant: f64,
}

/// True when `V` equals `U†` entry-wise within `1e-12`.
pub fn v_is_u_adjoint(spec: &EngineSpec) -> bool {
    spec.v().matrix().max_abs_diff(&spec.u().matrix().adjoint()) <= 1e-12
}

pub fn bounds_report(spec: &EngineSpec, mode: Mode) -> Result<BoundsReport, QubitError> {
    let tp = transition_probs(spec)?;
    let r = cumulant_report(spec, mode);
    Ok(bounds_from_parts(spec, &tp, &r))
}

pub(crate) fn bounds_from_parts(spec: &EngineSpec, tp: &TransitionProbs, r: &CumulantReport) -> BoundsReport {
    let (nu1, nu2) = half_gaps(spec);
    let beta = spec.beta();
    let t = beta.tanh_of(nu1);

    let rf_w = ratio(r.var_w.re, r.avg_w * r.avg_w);
    let rf_qm = ratio(r.var_qm.re, r.avg_qm * r.avg_qm);
    let rf_qc = ratio(r.var_qc, r.avg_qc * r.avg_qc);

    let sigma = (!beta.is_infinite()).then_some(r.avg_sigma);
    let tur_bound = sigma.and_then(|s| ratio(2.0, s)).map(|x| x - 1.0);
    let appc_bound = sigma
        .and_then(|s| ratio(2.0 * x_coth_x(beta.value() * nu1), s))
        .map(|x| x - 1.0);

    let r_w = (r.var_w.re > DENOM_TOL).then(|| r.avg_w / r.var_w.re.sqrt());
    let r_qm = (r.var_qm.re > DENOM_TOL).then(|| r.avg_qm / r.var_qm.re.sqrt());
    let eff = ratio(r.avg_w, r.avg_qm);
    let eff_sq_vs_var_ratio = eff.zip(ratio(r.var_w.re, r.var_qm.re)).map(|(e, v)| (e * e, v));

    let rf_gap_w_qm = rf_w.zip(rf_qm).map(|(a, b)| a - b);
    let rf_gap_w_qc = rf_w.zip(rf_qc).map(|(a, b)| a - b);

    let kd = tp.kd_discriminant();
    let closed_ok = r.mode == Mode::Undephased && v_is_u_adjoint(spec);
    let (thm2_gap_closed, rf_gap_w_qm_closed, rf_gap_w_qc_closed) = if closed_ok {
        let zc = tp.zeta_sup_c;
        let gap = 4.0 * nu1 * (2.0 * (tp.theta_c - tp.delta_p) * nu2 - zc * nu1) * (1.0 - zc * t * t);
        let c = undephased_closed(tp, nu1, nu2, beta);
        let w2 = c.avg_w * c.avg_w;
        let osam = ratio(
            8.0 * nu1 * nu2 * nu2 * t * (c.avg_qm + c.avg_w) * kd,
            w2 * c.avg_qm * c.avg_qm,
        );
        let osmr = ratio((4.0 * nu1 * nu2 * t).powi(2) * zc * kd, w2 * c.avg_qc * c.avg_qc);
        (Some(gap), osam, osmr)
    } else {
        (None, None, None)
    };

    BoundsReport {
        mode: r.mode,
        rf_w,
        rf_qm,
        rf_qc,
        tur_bound,
        appc_bound,
        r_wd_or_wud: r_w,
        r_qmd: r_qm,
        eff,
        eff_sq_vs_var_ratio,
        thm2_gap: r.var_qm.re - r.var_w.re,
        thm2_gap_closed,
        rf_gap_w_qm,
        rf_gap_w_qc,
        rf_gap_w_qm_closed,
        rf_gap_w_qc_closed,
        kd_discriminant: kd,
    }
}

/// How much of each unmonitored average comes from coherence in the `H2` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceParts {
    pub qm_coh: f64,
    pub qc_coh: f64,
    pub w_coh: f64,
}

/// Splits `<X> - <<X>>` into trace expressions over the off-diagonal part
/// of `rho_2` and of the channel output. Works in any dimension.
pub fn coherence_decomposition(spec: &EngineSpec) -> CoherenceParts {
    let h1 = spec.h1();
    let h2 = spec.h2();
    let ch = spec.channel();
    let apply = |x| ch.apply(x).expect("same dim");
    let rho2 = spec.rho2();
    let diag = dephase_in_basis(&rho2, h2).expect("same dim");
    let off = &rho2 - &diag;

    let qm_coh = apply(&off).trace_product(h2.matrix()).re;

    let phi_diag = apply(&diag);
    let phi_off = apply(&off);
    let sum = &(&off_diagonal_part(&phi_diag, h2).expect("same dim")
        + &dephase_in_basis(&phi_off, h2).expect("same dim"))
        + &off_diagonal_part(&phi_off, h2).expect("same dim");
    let qc_coh = -sum.conjugate_by(spec.v().matrix()).trace_product(h1.matrix()).re;

    CoherenceParts {
        qm_coh,
        qc_coh,
        w_coh: qm_coh + qc_coh,
    }
}

/// Closed-form basis identities next to their enumerated counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisComparison {
    /// Measurement along x: unmonitored, monitored and closed-form work.
    pub x_w_ud: f64,
    pub x_w_d: f64,
    pub x_w_closed: f64,
    /// `<W> - <<W>>` along y, enumerated and closed.
    pub y_gap: f64,
    pub y_gap_closed: f64,
    /// `<W> - <<W>>` along z.
    pub z_gap: f64,
    pub z_gap_closed: f64,
    /// Unmonitored work along z, at the configured yz-plane angle, along y.
    pub w_z: f64,
    pub w_yz: f64,
    pub w_y: f64,
    pub yz_minus_y_closed: f64,
    pub z_minus_yz_closed: f64,
    /// Unmonitored `<Q_M>` in the yz-plane.
    pub qm_yz: f64,
    pub qm_yz_closed: f64,
}

impl BasisComparison {
    pub fn max_deviation(&self) -> f64 {
        [
            self.x_w_ud - self.x_w_closed,
            self.x_w_d - self.x_w_closed,
            self.y_gap - self.y_gap_closed,
            self.z_gap - self.z_gap_closed,
            (self.w_yz - self.w_y) - self.yz_minus_y_closed,
            (self.w_z - self.w_yz) - self.z_minus_yz_closed,
            self.qm_yz - self.qm_yz_closed,
        ]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
    }

    pub fn ordering_holds(&self, slack: f64) -> bool {
        self.w_z + slack >= self.w_yz && self.w_yz + slack >= self.w_y
    }
}

/// Evaluates the x, y, z bases and the yz-plane direction at `p.alpha`,
/// keeping the drive and temperature of `p`.
pub fn basis_comparisons(p: &QubitParams) -> Result<BasisComparison, QubitError> {
    let at = |alpha: f64, chi: f64, mode: Mode| -> Result<CumulantReport, QubitError> {
        let q = QubitParams { alpha, chi, ..*p };
        Ok(cumulant_report(&build_qubit_spec(&q)?, mode))
    };
    let t = p.tanh();
    let dd = 4.0 * p.delta * (1.0 - p.delta) * p.nu1 * t;

    let x_ud = at(FRAC_PI_2, 0.0, Mode::Undephased)?;
    let x_d = at(FRAC_PI_2, 0.0, Mode::Dephased)?;
    let y_ud = at(FRAC_PI_2, FRAC_PI_2, Mode::Undephased)?;
    let y_d = at(FRAC_PI_2, FRAC_PI_2, Mode::Dephased)?;
    let z_ud = at(0.0, FRAC_PI_2, Mode::Undephased)?;
    let z_d = at(0.0, FRAC_PI_2, Mode::Dephased)?;
    let yz_ud = at(p.alpha, FRAC_PI_2, Mode::Undephased)?;

    Ok(BasisComparison {
        x_w_ud: x_ud.avg_w,
        x_w_d: x_d.avg_w,
        x_w_closed: -dd,
        y_gap: y_ud.avg_w - y_d.avg_w,
        y_gap_closed: -dd * p.phi.sin().powi(2),
        z_gap: z_ud.avg_w - z_d.avg_w,
        z_gap_closed: dd * p.phi.cos().powi(2),
        w_z: z_ud.avg_w,
        w_yz: yz_ud.avg_w,
        w_y: y_ud.avg_w,
        yz_minus_y_closed: dd * p.alpha.cos().powi(2),
        z_minus_yz_closed: dd * p.alpha.sin().powi(2),
        qm_yz: yz_ud.avg_qm,
        qm_yz_closed: (1.0 - 2.0 * p.delta) * p.nu2 * t,
    })
}

/// Excited-state probabilities before (`B`) and after (`C`) the hot stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupations {
    pub p_eb: f64,
    pub p_ec: f64,
}

pub fn occupation_probs(p: &QubitParams, mode: Mode) -> Result<Occupations, QubitError> {
    let spec = build_qubit_spec(p)?;
    let tp = transition_probs(&spec)?;
    let t = p.tanh();
    let p_eb = (1.0 - (1.0 - 2.0 * tp.delta_p) * t) / 2.0;
    let p_ec = match mode {
        Mode::Dephased => (1.0 - (1.0 - 2.0 * tp.delta_p) * (1.0 - 2.0 * tp.theta) * t) / 2.0,
        Mode::Undephased => {
            let e3 = cumulant_report(&spec, mode).avg_e[2];
            (1.0 + e3 / p.nu2) / 2.0
        }
    };
    Ok(Occupations { p_eb, p_ec })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyBounds {
    pub eff: f64,
    pub w_lower: f64,
    pub eff_lower: f64,
}

/// Unmonitored efficiency and its `nu`-free lower bounds.
pub fn efficiency_bounds(
    tp: &TransitionProbs,
    nu1: f64,
    nu2: f64,
    beta: crate::engine::Beta,
) -> Result<EfficiencyBounds, QubitError> {
    let den = tp.theta_c - tp.delta_p;
    if den.abs() <= DENOM_TOL {
        return Err(QubitError::DivisionDegenerate(den));
    }
    let q = tp.zeta_sup_c / den;
    Ok(EfficiencyBounds {
        eff: 1.0 - nu1 / nu2 * q,
        w_lower: 2.0 * ((tp.theta_c - tp.zeta_sup_c) - tp.delta_p) * nu1 * beta.tanh_of(nu1),
        eff_lower: 1.0 - q,
    })
}

/// Named measurement bases and planes, as Bloch angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedAxis {
    X,
    Y,
    Z,
    Xy,
    Xz,
    Yz,
    Generic,
}

impl NamedAxis {
    /// Most specific label for the direction `(alpha, chi)`: a basis if the
    /// direction lies on an axis, else a plane, within `tol` radians.
    pub fn classify(alpha: f64, chi: f64, tol: f64) -> Self {
        let near = |x: f64, target: f64, period: f64| {
            let r = (x - target).rem_euclid(period);
            r.min(period - r) <= tol
        };
        let on_z = near(alpha, 0.0, PI);
        let in_xy = near(alpha, FRAC_PI_2, PI);
        let in_xz = near(chi, 0.0, PI);
        let in_yz = near(chi, FRAC_PI_2, PI);
        match (on_z, in_xy, in_xz, in_yz) {
            (true, _, _, _) => NamedAxis::Z,
            (_, true, true, _) => NamedAxis::X,
            (_, true, _, true) => NamedAxis::Y,
            (_, true, _, _) => NamedAxis::Xy,
            (_, _, true, _) => NamedAxis::Xz,
            (_, _, _, true) => NamedAxis::Yz,
            _ => NamedAxis::Generic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedAxis::X => "x",
            NamedAxis::Y => "y",
            NamedAxis::Z => "z",
            NamedAxis::Xy => "xy",
            NamedAxis::Xz => "xz",
            NamedAxis::Yz => "yz",
            NamedAxis::Generic => "none",
        }
    }
}
