use num_complex::Complex64;

use super::{cumulant_report, dephase_in_basis, EngineSpec, Mode};
use crate::qmath::CMatrix;

/// Base step of the log-CF finite differences.
pub const CF_STEP: f64 = 1e-4;

/// Characteristic function of `(E1, E2, E3, E4)` at Fourier conjugates `g`,
/// evaluated straight from the operator expression.
pub fn characteristic_function(spec: &EngineSpec, mode: Mode, g: [f64; 4]) -> Complex64 {
    let h1 = spec.h1();
    let h2 = spec.h2();
    sandwich(
        spec,
        mode,
        [&h1.exp_i(g[0]), &h2.exp_i(g[1]), &h2.exp_i(g[2]), &h1.exp_i(g[3])],
    )
}

/// `chi(g) - 1`, computed without cancellation against the leading one.
///
/// Each phase operator is split as `I + D` with `D` small for small `g`;
/// the expression is multilinear in the four operators, so `chi - 1` is the
/// sum over the fifteen non-empty choices of `D` factors.
pub fn characteristic_function_minus_one(spec: &EngineSpec, mode: Mode, g: [f64; 4]) -> Complex64 {
    let h1 = spec.h1();
    let h2 = spec.h2();
    let id = CMatrix::identity(spec.dim());
    let d = [
        h1.exp_i_minus_identity(g[0]),
        h2.exp_i_minus_identity(g[1]),
        h2.exp_i_minus_identity(g[2]),
        h1.exp_i_minus_identity(g[3]),
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 1u8..16 {
        let pick = |j: usize| if mask & (1 << j) != 0 { &d[j] } else { &id };
        acc += sandwich(spec, mode, [pick(0), pick(1), pick(2), pick(3)]);
    }
    acc
}

/// `Tr[a4 V a3 D(Phi(D(a2 U a1 rho1 U†))) V†]`, with `D` the dephasing in
/// the `H2` basis for the monitored cycle and the identity otherwise.
fn sandwich(spec: &EngineSpec, mode: Mode, a: [&CMatrix; 4]) -> Complex64 {
    let h2 = spec.h2();
    let u = spec.u().matrix();
    let v = spec.v().matrix();
    let rho1 = spec.thermal_state().matrix;

    let x = &(&(a[1] * u) * &(a[0] * &rho1)) * &u.adjoint();
    let x = match mode {
        Mode::Dephased => dephase_in_basis(&x, h2).expect("same dim"),
        Mode::Undephased => x,
    };
    let y = spec.channel().apply(&x).expect("same dim");
    let y = match mode {
        Mode::Dephased => dephase_in_basis(&y, h2).expect("same dim"),
        Mode::Undephased => y,
    };
    let z = &(&(v * a[2]) * &y) * &v.adjoint();
    a[3].trace_product(&z)
}

/// `ln(1 + z)` without losing digits for small `z`.
fn ln_1p(z: Complex64) -> Complex64 {
    if z.norm() < 1e-2 {
        // alternating series; 12 terms leave an error below 1e-26
        let mut term = z;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=12 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc += term * (sign / k as f64);
            term *= z;
        }
        acc
    } else {
        (z + 1.0).ln()
    }
}

const DIRECTIONS: [[f64; 4]; 3] = [
    [1.0, -1.0, 1.0, -1.0], // W
    [0.0, -1.0, 1.0, 0.0],  // Q_M
    [1.0, 0.0, 0.0, -1.0],  // Q_C
];

/// First two cumulants along `dir` from central differences of `ln chi`,
/// with one Richardson step.
fn fd_cumulants(spec: &EngineSpec, mode: Mode, dir: [f64; 4]) -> (Complex64, Complex64) {
    let f = |t: f64| ln_1p(characteristic_function_minus_one(spec, mode, dir.map(|x| x * t)));
    let f0 = f(0.0);
    let d1 = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let d2 = |h: f64| (f(h) - f0 * 2.0 + f(-h)) / (h * h);
    let h = CF_STEP;
    let first = (d1(h / 2.0) * 4.0 - d1(h)) / 3.0;
    let second = (d2(h / 2.0) * 4.0 - d2(h)) / 3.0;
    let i = Complex64::new(0.0, 1.0);
    (-i * first, -second)
}

/// Max deviation between the moment-sum cumulants of `W`, `Q_M`, `Q_C`
/// and those recovered from the characteristic function.
pub fn cf_cumulant_crosscheck(spec: &EngineSpec, mode: Mode) -> f64 {
    let r = cumulant_report(spec, mode);
    let exact = [
        (Complex64::new(r.avg_w, 0.0), r.var_w),
        (Complex64::new(r.avg_qm, 0.0), r.var_qm),
        (Complex64::new(r.avg_qc, 0.0), Complex64::new(r.var_qc, r.var_qc_im)),
    ];
    DIRECTIONS
        .iter()
        .zip(exact)
        .map(|(dir, (k1, k2))| {
            let (a, b) = fd_cumulants(spec, mode, *dir);
            (a - k1).norm().max((b - k2).norm())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{cycle_table, Beta};
    use crate::qmath::{HermitianOperator, KrausChannel, UnitaryOperator};

    fn small_spec() -> EngineSpec {
        let h1 = HermitianOperator::diagonal(&[0.7, -0.7]);
        let h2 = HermitianOperator::new(CMatrix::from_real(2, &[0.2, 1.1, 1.1, -0.2])).unwrap();
        let c = 0.3f64.cos();
        let s = 0.3f64.sin();
        let u = UnitaryOperator::new(CMatrix::from_real(2, &[c, -s, s, c])).unwrap();
        let p = CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]);
        let q = &CMatrix::identity(2) - &p;
        let ch = KrausChannel::projective(vec![p, q]).unwrap();
        EngineSpec::new(h1, h2, u.clone(), u.adjoint(), ch, Beta::new(0.9).unwrap()).unwrap()
    }

    #[test]
    fn cf_at_origin_is_one() {
        for mode in Mode::ALL {
            let v = characteristic_function(&small_spec(), mode, [0.0; 4]);
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn cf_matches_table_fourier_sum() {
        let spec = small_spec();
        for mode in Mode::ALL {
            let t = cycle_table(&spec, mode);
            let g = [0.3, -1.2, 0.8, 2.1];
            let a = characteristic_function(&spec, mode, g);
            assert!((a - t.fourier(g)).norm() < 1e-12);
        }
    }

    #[test]
    fn minus_one_form_agrees() {
        let spec = small_spec();
        for mode in Mode::ALL {
            let g = [0.4, 0.1, -0.9, 1.7];
            let a = characteristic_function(&spec, mode, g) - 1.0;
            let b = characteristic_function_minus_one(&spec, mode, g);
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn crosscheck_is_small() {
        for mode in Mode::ALL {
            assert!(cf_cumulant_crosscheck(&small_spec(), mode) < 1e-6);
        }
    }
}
