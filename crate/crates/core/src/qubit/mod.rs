//! Single-qubit engine: `H1 = nu1 sigma_z`, `H2 = nu2 sigma_x`, a two-parameter
//! family of driving unitaries, and a projective measurement as the hot
//! stroke. Matrices are written in the `{|e>, |g>}` basis of `sigma_z`.

mod bounds;
mod closed;

pub use bounds::{
    basis_comparisons, bounds_report, coherence_decomposition, efficiency_bounds, occupation_probs,
    v_is_u_adjoint, BasisComparison, BoundsReport, CoherenceParts, EfficiencyBounds, NamedAxis,
    Occupations,
};
pub use closed::{
    dephased_cf_closed, dephased_closed, qm_explicit_angles, qm_explicit_terms, undephased_closed,
    ClosedFormReport,
};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Beta, EngineError, EngineSpec};
use crate::qmath::{CMatrix, HermitianOperator, KrausChannel, UnitaryOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QubitError {
    #[error("parameter {name} = {value} outside {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("expected a two-level spec, got dimension {0}")]
    DimMismatch(usize),

    #[error("theta_c - delta' = {0:e} is too close to zero")]
    DivisionDegenerate(f64),

    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Which second stroke to pair with `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VChoice {
    /// `V = U^T`, the time-reversed stroke of the model.
    Transpose,
    /// `V = U†`
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitParams {
    pub nu1: f64,
    pub nu2: f64,
    pub beta: Beta,
    pub delta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub chi: f64,
}

impl QubitParams {
    pub fn validate(&self) -> Result<(), QubitError> {
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            ("nu1", self.nu1, self.nu1 > 0.0 && self.nu1.is_finite(), "(0, inf)"),
            ("nu2", self.nu2, self.nu2 > 0.0 && self.nu2.is_finite(), "(0, inf)"),
            ("delta", self.delta, (0.0..=1.0).contains(&self.delta), "[0, 1]"),
            ("phi", self.phi, (0.0..=2.0 * PI).contains(&self.phi), "[0, 2pi]"),
            ("alpha", self.alpha, (0.0..=PI).contains(&self.alpha), "[0, pi]"),
            ("chi", self.chi, (0.0..=2.0 * PI).contains(&self.chi), "[0, 2pi]"),
        ];
        for (name, value, ok, range) in checks {
            if !ok {
                return Err(QubitError::ParamOutOfRange { name, value, range });
            }
        }
        Ok(())
    }

    /// Measurement in the xz-plane (`chi = 0`) tuned so that `theta` takes
    /// the requested value in `[0, 1/2]`.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.alpha = (2.0 * theta).clamp(0.0, 1.0).sqrt().acos();
        self.chi = 0.0;
        self
    }

    pub fn tanh(&self) -> f64 {
        self.beta.tanh_of(self.nu1)
    }
}

/// `U` of the model: `delta` mixes the adiabatic branches, `phi` is their phase.
pub fn drive_unitary(delta: f64, phi: f64) -> CMatrix {
    let a = (1.0 - delta).sqrt();
    let b = delta.sqrt();
    let em = Complex64::from_polar(a, -phi);
    let ep = Complex64::from_polar(a, phi);
    let bb = Complex64::new(b, 0.0);
    CMatrix::from_rows(&[vec![em + bb, ep - bb], vec![em - bb, -ep - bb]])
        .expect("finite entries")
        .scale_real(FRAC_1_SQRT_2)
}

/// Rank-one projector on the Bloch direction `(alpha, chi)` and its complement.
pub fn measurement_projectors(alpha: f64, chi: f64) -> (CMatrix, CMatrix) {
    let c = (alpha / 2.0).cos();
    let s = (alpha / 2.0).sin();
    let off = Complex64::from_polar(s * c, -chi);
    let p1 = CMatrix::from_rows(&[
        vec![Complex64::new(c * c, 0.0), off],
        vec![off.conj(), Complex64::new(s * s, 0.0)],
    ])
    .expect("finite entries");
    let p2 = &CMatrix::identity(2) - &p1;
    (p1, p2)
}

pub fn build_qubit_spec(p: &QubitParams) -> Result<EngineSpec, QubitError> {
    build_qubit_spec_with(p, VChoice::Transpose)
}

pub fn build_qubit_spec_with(p: &QubitParams, v_choice: VChoice) -> Result<EngineSpec, QubitError> {
    p.validate()?;
    let h1 = HermitianOperator::diagonal(&[p.nu1, -p.nu1]);
    let h2 = HermitianOperator::new(CMatrix::from_real(2, &[0.0, p.nu2, p.nu2, 0.0]))
        .map_err(EngineError::from)?;
    let u = UnitaryOperator::new(drive_unitary(p.delta, p.phi)).map_err(EngineError::from)?;
    let v = match v_choice {
        VChoice::Transpose => u.transpose(),
        VChoice::Adjoint => u.adjoint(),
    };
    let (p1, p2) = measurement_projectors(p.alpha, p.chi);
    let channel = KrausChannel::projective(vec![p1, p2]).map_err(EngineError::from)?;
    Ok(EngineSpec::new(h1, h2, u, v, channel, p.beta)?)
}

/// Model Hamiltonians and measurement channel of `p`, but with a caller
/// supplied first stroke `u` and `V = u†`. `delta` and `phi` are ignored.
pub fn build_qubit_spec_with_unitary(p: &QubitParams, u: UnitaryOperator) -> Result<EngineSpec, QubitError> {
    p.validate()?;
    if u.dim() != 2 {
        return Err(QubitError::DimMismatch(u.dim()));
    }
    let h1 = HermitianOperator::diagonal(&[p.nu1, -p.nu1]);
    let h2 = HermitianOperator::new(CMatrix::from_real(2, &[0.0, p.nu2, p.nu2, 0.0]))
        .map_err(EngineError::from)?;
    let v = u.adjoint();
    let (p1, p2) = measurement_projectors(p.alpha, p.chi);
    let channel = KrausChannel::projective(vec![p1, p2]).map_err(EngineError::from)?;
    Ok(EngineSpec::new(h1, h2, u, v, channel, p.beta)?)
}

/// The six transition probabilities that fix every closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionProbs {
    pub delta_p: f64,
    pub theta: f64,
    pub zeta: f64,
    pub theta_c: f64,
    pub zeta_sup_c: f64,
    pub zeta_sub_c: f64,
}

impl TransitionProbs {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.delta_p,
            self.theta,
            self.zeta,
            self.theta_c,
            self.zeta_sup_c,
            self.zeta_sub_c,
        ]
    }

    /// `theta zeta^c - (theta_c - delta')^2`
    pub fn kd_discriminant(&self) -> f64 {
        self.theta * self.zeta_sup_c - (self.theta_c - self.delta_p).powi(2)
    }
}

/// Reads the probabilities off a two-level spec. The lower eigenvector of
/// each Hamiltonian plays `|->`, the upper one `|+>`.
pub fn transition_probs(spec: &EngineSpec) -> Result<TransitionProbs, QubitError> {
    if spec.dim() != 2 {
        return Err(QubitError::DimMismatch(spec.dim()));
    }
    let h1 = spec.h1();
    let h2 = spec.h2();
    let (m1, p1) = (h1.eigenvector(0), h1.eigenvector(1));
    let (m2, p2) = (h2.eigenvector(0), h2.eigenvector(1));
    let u = spec.u().matrix();
    let v = spec.v().matrix();
    let ch = spec.channel();
    let apply = |x: &CMatrix| ch.apply(x).expect("dim 2");

    let plus2 = h2.projector(1);
    let rho_u = h1.projector(1).conjugate_by(u);
    let phi_plus2 = apply(plus2);
    let phi_rho_u = apply(&rho_u);

    Ok(TransitionProbs {
        delta_p: u.expectation(&p2, &m1).norm_sqr(),
        theta: phi_plus2.expectation(&m2, &m2).re,
        zeta: v.expectation(&p1, &m2).norm_sqr(),
        theta_c: phi_rho_u.expectation(&m2, &m2).re,
        zeta_sup_c: phi_rho_u.conjugate_by(v).expectation(&m1, &m1).re,
        zeta_sub_c: phi_plus2.conjugate_by(v).expectation(&m1, &m1).re,
    })
}

/// `theta` of the projective channel at Bloch angles `(alpha, chi)`.
pub fn theta_closed(alpha: f64, chi: f64) -> f64 {
    (1.0 - chi.cos().powi(2) * alpha.sin().powi(2)) / 2.0
}
