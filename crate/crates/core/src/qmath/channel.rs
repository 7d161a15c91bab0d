use num_complex::Complex64;
use serde::Serialize;

use super::{CMatrix, QMathError, Tolerances};

/// Unitary operator, checked on construction.
#[derive(Debug, Clone, Serialize)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self, QMathError> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: CMatrix, tol: &Tolerances) -> Result<Self, QMathError> {
        if !matrix.is_finite() {
            return Err(QMathError::NonFinite);
        }
        let dev = unitarity_deviation(&matrix);
        if dev > tol.unitary {
            return Err(QMathError::NotUnitary { deviation: dev });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Transpose in the working basis; for a unitary this is `conj(U†)`.
    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }
}

/// Max-abs entry of `U†U - I`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    (&m.adjoint() * m).max_abs_diff(&CMatrix::identity(m.dim()))
}

/// Completely positive map given by its Kraus operators.
///
/// [`KrausChannel::new`] insists on a trace-preserving unital map. The
/// unchecked constructor exists so validation suites can feed in a broken
/// channel on purpose.
#[derive(Debug, Clone, Serialize)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self, QMathError> {
        Self::with_tolerances(kraus, &Tolerances::default())
    }

    pub fn with_tolerances(kraus: Vec<CMatrix>, tol: &Tolerances) -> Result<Self, QMathError> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        ch.check(tol)?;
        Ok(ch)
    }

    /// Only the shape is validated: non-empty, equal dimensions, finite.
    pub fn from_kraus_unchecked(kraus: Vec<CMatrix>) -> Result<Self, QMathError> {
        let first = kraus.first().ok_or(QMathError::Empty)?;
        let dim = first.dim();
        for k in &kraus {
            if k.dim() != dim {
                return Err(QMathError::DimMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            if !k.is_finite() {
                return Err(QMathError::NonFinite);
            }
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![CMatrix::identity(dim)],
        }
    }

    /// Measurement channel `rho -> sum_j P_j rho P_j`; the projectors must
    /// resolve the identity.
    pub fn projective(projectors: Vec<CMatrix>) -> Result<Self, QMathError> {
        Self::new(projectors)
    }

    /// Completely dephasing channel in the eigenbasis of `h`.
    pub fn dephasing(h: &super::HermitianOperator) -> Self {
        Self {
            kraus: h.projectors().to_vec(),
        }
    }

    /// Checks trace preservation and unitality.
    pub fn check(&self, tol: &Tolerances) -> Result<(), QMathError> {
        let tp = self.trace_preservation_deviation();
        if tp > tol.channel {
            return Err(QMathError::NotTracePreserving { deviation: tp });
        }
        let un = self.unitality_deviation();
        if un > tol.channel {
            return Err(QMathError::NotUnital { deviation: un });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Max-abs entry of `sum_j K_j† K_j - I`.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n);
        for k in &self.kraus {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&CMatrix::identity(n))
    }

    /// Max-abs entry of `sum_j K_j K_j† - I`.
    pub fn unitality_deviation(&self) -> f64 {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n);
        for k in &self.kraus {
            acc = &acc + &(k * &k.adjoint());
        }
        acc.max_abs_diff(&CMatrix::identity(n))
    }

    /// `sum_j K_j rho K_j†`; `rho` need not be Hermitian.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix, QMathError> {
        if rho.dim() != self.dim() {
            return Err(QMathError::DimMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let mut out = CMatrix::zeros(rho.dim());
        for k in &self.kraus {
            out = &out + &rho.conjugate_by(k);
        }
        Ok(out)
    }

    /// Sequential composition: `self` after `first`.
    pub fn compose(&self, first: &KrausChannel) -> Result<KrausChannel, QMathError> {
        if self.dim() != first.dim() {
            return Err(QMathError::DimMismatch {
                expected: self.dim(),
                found: first.dim(),
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                kraus.push(a * b);
            }
        }
        Ok(Self { kraus })
    }
}

pub fn apply_channel(phi: &KrausChannel, rho: &CMatrix) -> Result<CMatrix, QMathError> {
    phi.apply(rho)
}

/// True iff `p1 + p2 = I`, both idempotent and mutually orthogonal.
pub fn validate_projective_pair(p1: &CMatrix, p2: &CMatrix) -> bool {
    validate_projective_pair_with(p1, p2, Tolerances::default().projector)
}

pub fn validate_projective_pair_with(p1: &CMatrix, p2: &CMatrix, tol: f64) -> bool {
    if p1.dim() != p2.dim() {
        return false;
    }
    let n = p1.dim();
    let id = CMatrix::identity(n);
    let zero = CMatrix::zeros(n);
    (p1 + p2).max_abs_diff(&id) <= tol
        && (p1 * p1).max_abs_diff(p1) <= tol
        && (p2 * p2).max_abs_diff(p2) <= tol
        && (p1 * p2).max_abs_diff(&zero) <= tol
}

/// Hermitian, unit trace and positive semidefinite, within `tol`.
pub fn is_density_matrix(rho: &CMatrix, tol: f64) -> bool {
    if rho.hermiticity_deviation() > tol || (rho.trace() - Complex64::new(1.0, 0.0)).norm() > tol {
        return false;
    }
    match super::hermitian_eigensystem(rho) {
        Ok(op) => op.eigenvalues().iter().all(|&l| l >= -tol),
        Err(_) => false,
    }
}
