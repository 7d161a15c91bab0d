//! Hermitian eigendecomposition for small dense operators.
//!
//! Dimensions one and two use closed forms. Larger matrices go through cyclic
//! complex Jacobi rotations, which converge quadratically and are exact enough
//! at the `d <= 16` scale this crate targets. Eigenpairs are returned in
//! ascending eigenvalue order; vectors inside a degenerate cluster are
//! re-orthonormalized by Gram-Schmidt in index order, and every eigenvector
//! carries the phase convention "first non-negligible component real and
//! positive" so results are reproducible.

use num_complex::Complex64;
use serde::Serialize;

use super::{CMatrix, QMathError, Tolerances};

const MAX_SWEEPS: usize = 64;

/// Hermitian operator together with its cached spectral decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct HermitianOperator {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    #[serde(skip)]
    projectors: Vec<CMatrix>,
}

impl HermitianOperator {
    /// Decomposes `m` with the default tolerances.
    pub fn new(m: CMatrix) -> Result<Self, QMathError> {
        hermitian_eigensystem(&m)
    }

    /// Real diagonal operator; skips the decomposition entirely.
    pub fn diagonal(values: &[f64]) -> Self {
        let m = CMatrix::from_real_diag(values);
        hermitian_eigensystem(&m).expect("diagonal real matrix is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the orthonormal eigenvectors, in eigenvalue order.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    /// Rank-one projector `|i><i|` on the i-th eigenvector.
    pub fn projector(&self, i: usize) -> &CMatrix {
        &self.projectors[i]
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// `sum_i f(lambda_i) |i><i|`
    pub fn spectral_map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim());
        for (lam, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out = &out + &p.scale(f(*lam));
        }
        out
    }

    /// `exp(i * gamma * H)`
    pub fn exp_i(&self, gamma: f64) -> CMatrix {
        self.spectral_map(|lam| Complex64::from_polar(1.0, gamma * lam))
    }

    /// `exp(i * gamma * H) - I`, accurate when `gamma` is small.
    pub fn exp_i_minus_identity(&self, gamma: f64) -> CMatrix {
        self.spectral_map(|lam| {
            let half = 0.5 * gamma * lam;
            Complex64::new(0.0, 2.0 * half.sin()) * Complex64::from_polar(1.0, half)
        })
    }

    /// Max-abs deviation of `V diag(lambda) V†` from the stored matrix.
    pub fn reconstruction_error(&self) -> f64 {
        self.spectral_map(|lam| Complex64::new(lam, 0.0))
            .max_abs_diff(&self.matrix)
    }
}

pub fn hermitian_eigensystem(m: &CMatrix) -> Result<HermitianOperator, QMathError> {
    hermitian_eigensystem_with(m, &Tolerances::default())
}

pub fn hermitian_eigensystem_with(
    m: &CMatrix,
    tol: &Tolerances,
) -> Result<HermitianOperator, QMathError> {
    if !m.is_finite() {
        return Err(QMathError::NonFinite);
    }
    let dev = m.hermiticity_deviation();
    if dev > tol.hermitian {
        return Err(QMathError::NotHermitian { deviation: dev });
    }
    // Symmetrize so the stored matrix is exactly Hermitian.
    let herm = (&m.clone() + &m.adjoint()).scale_real(0.5);
    let n = herm.dim();

    let (values, vectors) = match n {
        1 => (vec![herm[(0, 0)].re], CMatrix::identity(1)),
        2 => eigen_2x2(&herm),
        _ => jacobi(&herm)?,
    };

    let (values, mut vectors) = sort_ascending(values, &vectors);
    orthonormalize_clusters(&values, &mut vectors, tol.degeneracy);
    fix_phases(&mut vectors);

    let projectors = (0..n)
        .map(|i| CMatrix::projector(&vectors.column(i)))
        .collect();
    let op = HermitianOperator {
        matrix: herm,
        eigenvalues: values,
        eigenvectors: vectors,
        projectors,
    };
    let scale = op.matrix.max_abs().max(1.0);
    let err = op.reconstruction_error();
    if err > tol.eigen * scale {
        return Err(QMathError::DecompositionFailure {
            reason: format!("reconstruction error {err:e}"),
        });
    }
    Ok(op)
}

fn eigen_2x2(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    if b.norm() == 0.0 {
        return (vec![a, d], CMatrix::identity(2));
    }
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b.norm());
    let low = mean - r;
    // Two algebraically equivalent null vectors of (m - low); keep the
    // better-conditioned one.
    let v1 = [b, Complex64::new(low - a, 0.0)];
    let v2 = [Complex64::new(low - d, 0.0), b.conj()];
    let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
    let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
    let (v, nv) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let lo = [v[0] / nv, v[1] / nv];
    let hi = [-lo[1].conj(), lo[0].conj()];
    let vectors = CMatrix::from_fn(2, |i, j| if j == 0 { lo[i] } else { hi[i] });
    (vec![low, mean + r], vectors)
}

fn jacobi(m: &CMatrix) -> Result<(Vec<f64>, CMatrix), QMathError> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let threshold = f64::EPSILON * scale * 1e-2;

    for _ in 0..MAX_SWEEPS {
        if a.max_off_diagonal() <= threshold {
            let values = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((values, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= threshold {
                    continue;
                }
                // Phase-reduce the 2x2 block to real symmetric, then rotate.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on (p, q)
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A <- G† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // V <- V G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }
    Err(QMathError::DecompositionFailure {
        reason: format!("Jacobi did not converge in {MAX_SWEEPS} sweeps"),
    })
}

fn sort_ascending(values: Vec<f64>, vectors: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

fn orthonormalize_clusters(values: &[f64], vectors: &mut CMatrix, rel_tol: f64) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && (values[end] - values[end - 1]).abs() <= rel_tol * values[end].abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(vectors, start, end);
        }
        start = end;
    }
}

fn gram_schmidt(vectors: &mut CMatrix, start: usize, end: usize) {
    let n = vectors.dim();
    for j in start..end {
        let mut col = vectors.column(j);
        for k in start..j {
            let prev = vectors.column(k);
            let overlap: Complex64 = prev.iter().zip(&col).map(|(p, c)| p.conj() * c).sum();
            for (c, p) in col.iter_mut().zip(&prev) {
                *c -= overlap * p;
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            vectors[(i, j)] = col[i] / norm;
        }
    }
}

fn fix_phases(vectors: &mut CMatrix) {
    let n = vectors.dim();
    for j in 0..n {
        let lead = (0..n)
            .map(|i| vectors[(i, j)])
            .find(|z| z.norm() > 1e-8);
        if let Some(z) = lead {
            let rot = z.conj() / z.norm();
            for i in 0..n {
                vectors[(i, j)] *= rot;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_sign_matrix_sorts_ascending() {
        let op = HermitianOperator::new(CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        assert_eq!(op.eigenvalues(), &[-1.0, 1.0]);
        let v = op.eigenvectors();
        assert_eq!(v[(0, 0)], c(0.0, 0.0));
        assert_eq!(v[(1, 0)], c(1.0, 0.0));
        assert_eq!(v[(0, 1)], c(1.0, 0.0));
        assert_eq!(v[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn scaled_sigma_x_has_plus_minus_eigenvectors() {
        let op = HermitianOperator::new(CMatrix::from_real(2, &[0.0, 2.0, 2.0, 0.0])).unwrap();
        assert!((op.eigenvalues()[0] + 2.0).abs() < 1e-15);
        assert!((op.eigenvalues()[1] - 2.0).abs() < 1e-15);
        let minus = op.eigenvector(0);
        let plus = op.eigenvector(1);
        assert!((minus[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((minus[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((plus[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((plus[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real(2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(QMathError::NotHermitian { .. })
        ));
    }

    #[test]
    fn complex_4x4_reconstructs() {
        let m = CMatrix::from_fn(4, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                c(i * 0.7 - 1.0, 0.0)
            } else if i < j {
                c(0.3 * (i + 1.0) - 0.2 * j, 0.1 * (j - i))
            } else {
                c(0.3 * (j + 1.0) - 0.2 * i, -0.1 * (i - j))
            }
        });
        let op = HermitianOperator::new(m.clone()).unwrap();
        assert!(op.reconstruction_error() < 1e-12);
        let v = op.eigenvectors();
        let vv = &v.adjoint() * v;
        assert!(vv.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
        for w in op.eigenvalues().windows(2) {
            assert!(w[0] <= w[1]);
        }
        let tr: f64 = op.eigenvalues().iter().sum();
        assert!((m.trace().re - tr).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cluster_is_orthonormal() {
        // I_3 + |u><u| with a complex u: eigenvalue 1 twice, 1 + |u|^2 once.
        let u = [c(0.5, 0.1), c(-0.2, 0.4), c(0.3, -0.3)];
        let m = &CMatrix::identity(3) + &CMatrix::projector(&u);
        let op = HermitianOperator::new(m).unwrap();
        assert!((op.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((op.eigenvalues()[1] - 1.0).abs() < 1e-12);
        let v = op.eigenvectors();
        let vv = &v.adjoint() * v;
        assert!(vv.max_abs_diff(&CMatrix::identity(3)) < 1e-12);
        assert!(op.reconstruction_error() < 1e-12);
    }

    #[test]
    fn exp_i_is_unitary() {
        let op = HermitianOperator::new(CMatrix::from_real(2, &[0.3, 1.0, 1.0, -0.4])).unwrap();
        let e = op.exp_i(0.77);
        assert!((&e.adjoint() * &e).max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }
}
