//! Finite-dimensional Otto cycle: spec, thermal state, trajectory tables,
//! characteristic functions and cumulants.

mod cf;
mod cumulants;
mod table;

pub use cf::{
    cf_cumulant_crosscheck, characteristic_function, characteristic_function_minus_one, CF_STEP,
};
pub use cumulants::{
    cumulant_report, report_from_table, CumulantReport, Regime, REGIME_TOL,
};
pub use table::{cycle_table, moment, CycleEntry, CycleTable};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::qmath::{CMatrix, HermitianOperator, KrausChannel, QMathError, Tolerances, UnitaryOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("dimension mismatch: {what} has dim {found}, expected {expected}")]
    DimMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("inverse temperature must be >= 0 or inf, got {0}")]
    InvalidBeta(f64),

    #[error(transparent)]
    Math(#[from] QMathError),
}

/// Inverse temperature, `0 <= beta <= inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub const INFINITE: Beta = Beta(f64::INFINITY);
    pub const ZERO: Beta = Beta(0.0);

    pub fn new(value: f64) -> Result<Self, EngineError> {
        if value.is_nan() || value < 0.0 {
            return Err(EngineError::InvalidBeta(value));
        }
        Ok(Beta(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `tanh(beta * x)` with the `beta = inf` limit taken as `sign(x)`.
    pub fn tanh_of(self, x: f64) -> f64 {
        if self.is_infinite() {
            if x == 0.0 {
                0.0
            } else {
                x.signum()
            }
        } else {
            (self.0 * x).tanh()
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl FromStr for Beta {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "inf" | "+inf" | "infinity" | "Infinity") {
            return Ok(Beta::INFINITE);
        }
        let v: f64 = t.parse().map_err(|_| EngineError::InvalidBeta(f64::NAN))?;
        Beta::new(v)
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ext_f64::serialize(&self.0, s)
    }
}

/// JSON has no infinities; write them as strings.
pub mod ext_f64 {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_none()
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dephased,
    Undephased,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Dephased, Mode::Undephased];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Dephased => "dephased",
            Mode::Undephased => "undephased",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Gibbs state of `H1`, diagonal in its eigenbasis.
#[derive(Debug, Clone, Serialize)]
pub struct ThermalState {
    /// Indexed like the eigenvalues of `H1` (ascending).
    pub populations: Vec<f64>,
    /// `ln Z`; absent at `beta = inf`.
    pub log_z: Option<f64>,
    pub matrix: CMatrix,
}

pub fn thermal_state(h1: &HermitianOperator, beta: Beta) -> ThermalState {
    let lam = h1.eigenvalues();
    let n = lam.len();
    let lmin = lam[0];
    let (populations, log_z) = if beta.is_infinite() {
        let tol = Tolerances::default().degeneracy * lmin.abs().max(1.0);
        let ground = lam.iter().filter(|&&l| l - lmin <= tol).count();
        let p: Vec<f64> = (0..n)
            .map(|i| if i < ground { 1.0 / ground as f64 } else { 0.0 })
            .collect();
        (p, None)
    } else {
        let b = beta.value();
        let w: Vec<f64> = lam.iter().map(|&l| (-b * (l - lmin)).exp()).collect();
        let s: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / s).collect();
        (p, Some(-b * lmin + s.ln()))
    };
    let mut matrix = CMatrix::zeros(n);
    for (p, proj) in populations.iter().zip(h1.projectors()) {
        matrix = &matrix + &proj.scale_real(*p);
    }
    ThermalState {
        populations,
        log_z,
        matrix,
    }
}

/// One complete cycle: `H1`, `H2`, strokes `U` and `V`, hot channel, bath.
#[derive(Debug, Clone, Serialize)]
pub struct EngineSpec {
    h1: HermitianOperator,
    h2: HermitianOperator,
    u: UnitaryOperator,
    v: UnitaryOperator,
    channel: KrausChannel,
    beta: Beta,
}

impl EngineSpec {
    /// Checks dimensions and that the channel is trace preserving and unital.
    pub fn new(
        h1: HermitianOperator,
        h2: HermitianOperator,
        u: UnitaryOperator,
        v: UnitaryOperator,
        channel: KrausChannel,
        beta: Beta,
    ) -> Result<Self, EngineError> {
        let d = h1.dim();
        for (what, found) in [
            ("H2", h2.dim()),
            ("U", u.dim()),
            ("V", v.dim()),
            ("channel", channel.dim()),
        ] {
            if found != d {
                return Err(EngineError::DimMismatch {
                    what,
                    expected: d,
                    found,
                });
            }
        }
        channel.check(&Tolerances::default())?;
        Ok(Self {
            h1,
            h2,
            u,
            v,
            channel,
            beta,
        })
    }

    pub fn dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn h1(&self) -> &HermitianOperator {
        &self.h1
    }

    pub fn h2(&self) -> &HermitianOperator {
        &self.h2
    }

    pub fn u(&self) -> &UnitaryOperator {
        &self.u
    }

    pub fn v(&self) -> &UnitaryOperator {
        &self.v
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn with_beta(&self, beta: Beta) -> Self {
        Self {
            beta,
            ..self.clone()
        }
    }

    pub fn with_v(&self, v: UnitaryOperator) -> Result<Self, EngineError> {
        Self::new(
            self.h1.clone(),
            self.h2.clone(),
            self.u.clone(),
            v,
            self.channel.clone(),
            self.beta,
        )
    }

    pub fn thermal_state(&self) -> ThermalState {
        thermal_state(&self.h1, self.beta)
    }

    /// `rho_2 = U rho_1 U†`
    pub fn rho2(&self) -> CMatrix {
        self.thermal_state().matrix.conjugate_by(self.u.matrix())
    }
}

/// `sum_i P_i rho P_i` over the eigenprojectors of `h`.
pub fn dephase_in_basis(rho: &CMatrix, h: &HermitianOperator) -> Result<CMatrix, QMathError> {
    if rho.dim() != h.dim() {
        return Err(QMathError::DimMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    let mut out = CMatrix::zeros(rho.dim());
    for p in h.projectors() {
        out = &out + &(&(p * rho) * p);
    }
    Ok(out)
}

/// `rho - dephase_in_basis(rho, h)`
pub fn off_diagonal_part(rho: &CMatrix, h: &HermitianOperator) -> Result<CMatrix, QMathError> {
    Ok(rho - &dephase_in_basis(rho, h)?)
}

pub(crate) fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit_h1() -> HermitianOperator {
        HermitianOperator::diagonal(&[1.0, -1.0])
    }

    #[test]
    fn thermal_infinite_temperature() {
        let t = thermal_state(&qubit_h1(), Beta::ZERO);
        assert_eq!(t.populations, vec![0.5, 0.5]);
        assert!((t.log_z.unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn thermal_zero_temperature() {
        let t = thermal_state(&qubit_h1(), Beta::INFINITE);
        assert_eq!(t.populations, vec![1.0, 0.0]);
        assert!(t.log_z.is_none());
        // ground state of diag(1, -1) is the second basis vector
        assert_eq!(t.matrix[(1, 1)].re, 1.0);
    }

    #[test]
    fn thermal_finite_beta() {
        let t = thermal_state(&qubit_h1(), Beta::new(0.6).unwrap());
        let z = 2.0 * 0.6f64.cosh();
        assert!((t.populations[0] - 0.6f64.exp() / z).abs() < 1e-15);
        assert!((t.populations[1] - (-0.6f64).exp() / z).abs() < 1e-15);
        assert!((t.log_z.unwrap() - z.ln()).abs() < 1e-14);
    }

    #[test]
    fn degenerate_ground_is_split() {
        let h = HermitianOperator::diagonal(&[0.0, 0.0, 1.0]);
        let t = thermal_state(&h, Beta::INFINITE);
        assert_eq!(t.populations, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn beta_parsing() {
        assert!("inf".parse::<Beta>().unwrap().is_infinite());
        assert_eq!("0.6".parse::<Beta>().unwrap().value(), 0.6);
        assert!("-1".parse::<Beta>().is_err());
        assert!(Beta::new(f64::NAN).is_err());
    }

    #[test]
    fn dephasing_plus_state_in_z() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CMatrix::projector(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        let out = dephase_in_basis(&plus, &qubit_h1()).unwrap();
        assert!(out.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
        let diag = CMatrix::from_real_diag(&[0.3, 0.7]);
        assert_eq!(dephase_in_basis(&diag, &qubit_h1()).unwrap(), diag);
    }

    #[test]
    fn spec_rejects_non_unital_channel() {
        let g: f64 = 0.3;
        let k0 = CMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]);
        let k1 = CMatrix::from_real(2, &[0.0, g.sqrt(), 0.0, 0.0]);
        let ch = KrausChannel::from_kraus_unchecked(vec![k0, k1]).unwrap();
        let r = EngineSpec::new(
            qubit_h1(),
            qubit_h1(),
            UnitaryOperator::identity(2),
            UnitaryOperator::identity(2),
            ch,
            Beta::ZERO,
        );
        assert!(matches!(r, Err(EngineError::Math(QMathError::NotUnital { .. }))));
    }
}
