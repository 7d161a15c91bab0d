use std::f64::consts::{FRAC_PI_2, PI};

use otto_core::engine::{characteristic_function, cumulant_report, Beta, Mode, Regime};
use otto_core::qubit::{
    basis_comparisons, bounds_report, build_qubit_spec, build_qubit_spec_with_unitary, coherence_decomposition,
    dephased_cf_closed, dephased_closed, efficiency_bounds, occupation_probs, qm_explicit_angles, qm_explicit_terms,
    theta_closed, transition_probs, undephased_closed, QubitParams,
};
use otto_core::sample::haar_unitary;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BETAS: [f64; 6] = [0.0, 0.3, 0.6, 1.0, 5.0, f64::INFINITY];

fn beta_of(x: f64) -> Beta {
    if x.is_infinite() {
        Beta::INFINITE
    } else {
        Beta::new(x).unwrap()
    }
}

fn params() -> impl Strategy<Value = QubitParams> {
    (
        0.2..2.0f64,
        0.2..3.0f64,
        0usize..BETAS.len(),
        0.0..=1.0f64,
        0.0..2.0 * PI,
        0.0..=PI,
        0.0..2.0 * PI,
    )
        .prop_map(|(nu1, nu2, b, delta, phi, alpha, chi)| QubitParams {
            nu1,
            nu2,
            beta: beta_of(BETAS[b]),
            delta,
            phi,
            alpha,
            chi,
        })
}

fn reference() -> QubitParams {
    QubitParams {
        nu1: 1.0,
        nu2: 2.0,
        beta: Beta::new(0.6).unwrap(),
        delta: 0.2,
        phi: 0.0,
        alpha: PI / 4.0,
        chi: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_forms_match_enumeration(p in params()) {
        let spec = build_qubit_spec(&p).unwrap();
        let tp = transition_probs(&spec).unwrap();
        for x in tp.as_array() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
        }
        prop_assert!(tp.theta <= 0.5 + 1e-12);
        prop_assert!((tp.theta - theta_closed(p.alpha, p.chi)).abs() <= 1e-12);
        let d = dephased_closed(&tp, p.nu1, p.nu2, p.beta);
        prop_assert!(d.max_deviation(&cumulant_report(&spec, Mode::Dephased)) <= 1e-10);
        let u = undephased_closed(&tp, p.nu1, p.nu2, p.beta);
        prop_assert!(u.max_deviation(&cumulant_report(&spec, Mode::Undephased)) <= 1e-10);
        prop_assert!((qm_explicit_angles(&p) - u.avg_qm).abs() <= 1e-12);
        prop_assert!((qm_explicit_terms(&p)[0] - d.avg_qm).abs() <= 1e-12);
    }

    #[test]
    fn closed_cf_matches_enumeration(p in params(), g in prop::array::uniform4(-3.0..3.0f64)) {
        let spec = build_qubit_spec(&p).unwrap();
        let tp = transition_probs(&spec).unwrap();
        let a = dephased_cf_closed(&tp, p.nu1, p.nu2, p.beta, g);
        let b = characteristic_function(&spec, Mode::Dephased, g);
        prop_assert!((a - b).norm() <= 1e-9);
    }

    #[test]
    fn coherence_parts_reconcile(p in params()) {
        let spec = build_qubit_spec(&p).unwrap();
        let c = coherence_decomposition(&spec);
        let d = cumulant_report(&spec, Mode::Dephased);
        let u = cumulant_report(&spec, Mode::Undephased);
        prop_assert!((c.qm_coh - (u.avg_qm - d.avg_qm)).abs() <= 1e-10);
        prop_assert!((c.qc_coh - (u.avg_qc - d.avg_qc)).abs() <= 1e-10);
        prop_assert!((c.w_coh - (u.avg_w - d.avg_w)).abs() <= 1e-10);
        prop_assert!((qm_explicit_terms(&p)[1] - c.qm_coh).abs() <= 1e-12);
    }

    #[test]
    fn measurement_symmetry(p in params()) {
        let mirrored = QubitParams {
            alpha: PI - p.alpha,
            chi: (p.chi + PI) % (2.0 * PI),
            ..p
        };
        for mode in Mode::ALL {
            let a = cumulant_report(&build_qubit_spec(&p).unwrap(), mode);
            let b = cumulant_report(&build_qubit_spec(&mirrored).unwrap(), mode);
            prop_assert!((a.avg_w - b.avg_w).abs() <= 1e-10);
            prop_assert!((a.avg_qm - b.avg_qm).abs() <= 1e-10);
            prop_assert!((a.avg_qc - b.avg_qc).abs() <= 1e-10);
            prop_assert!((a.var_w - b.var_w).norm() <= 1e-10);
            prop_assert!((a.var_qm - b.var_qm).norm() <= 1e-10);
            prop_assert!((a.var_qc - b.var_qc).abs() <= 1e-10);
        }
    }

    #[test]
    fn basis_identities(p in params()) {
        let b = basis_comparisons(&p).unwrap();
        prop_assert!(b.max_deviation() <= 1e-10);
        prop_assert!(b.ordering_holds(1e-10));
    }

    #[test]
    fn dephased_ignores_phase(p in params()) {
        let base = cumulant_report(&build_qubit_spec(&QubitParams { phi: 0.0, ..p }).unwrap(), Mode::Dephased);
        for phi in [PI / 5.0, FRAC_PI_2, 1.1 * PI] {
            let r = cumulant_report(&build_qubit_spec(&QubitParams { phi, ..p }).unwrap(), Mode::Dephased);
            prop_assert!((r.avg_w - base.avg_w).abs() <= 1e-12);
            prop_assert!((r.avg_qm - base.avg_qm).abs() <= 1e-12);
            prop_assert!((r.avg_qc - base.avg_qc).abs() <= 1e-12);
            prop_assert!((r.var_w - base.var_w).norm() <= 1e-12);
            prop_assert!((r.var_qm - base.var_qm).norm() <= 1e-12);
            prop_assert!((r.var_qc - base.var_qc).abs() <= 1e-12);
        }
    }

    #[test]
    fn occupations_are_probabilities(p in params()) {
        for mode in Mode::ALL {
            let o = occupation_probs(&p, mode).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&o.p_eb));
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&o.p_ec));
        }
    }
}

#[test]
fn model_probabilities_equal_delta() {
    for i in 0..20 {
        let delta = i as f64 / 19.0;
        let p = QubitParams { delta, phi: 0.9, ..reference() };
        let tp = transition_probs(&build_qubit_spec(&p).unwrap()).unwrap();
        assert!((tp.delta_p - delta).abs() <= 1e-12);
        assert!((tp.zeta - delta).abs() <= 1e-12);
    }
}

#[test]
fn adjoint_stroke_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let p = QubitParams {
            alpha: rng.gen_range(0.0..PI),
            chi: rng.gen_range(0.0..2.0 * PI),
            ..reference()
        };
        let spec = build_qubit_spec_with_unitary(&p, haar_unitary(&mut rng, 2)).unwrap();
        let tp = transition_probs(&spec).unwrap();
        assert!((tp.zeta_sub_c - tp.theta_c).abs() <= 1e-12);
        assert!((tp.delta_p - tp.zeta).abs() <= 1e-12);
        assert!(tp.zeta_sup_c >= -1e-12 && tp.zeta_sup_c <= 0.5 + 1e-12);
    }
    for phi in [0.0, 2.0 * PI] {
        let p = QubitParams { phi, delta: 0.37, ..reference() };
        let tp = transition_probs(&build_qubit_spec(&p).unwrap()).unwrap();
        assert!((tp.zeta_sub_c - tp.theta_c).abs() <= 1e-12);
    }
}

#[test]
fn adjoint_stroke_gaps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut engines = 0;
    // absolute agreement where all three RFs are at most 1e2; near
    // a vanishing mean they grow without bound and only relative agreement is meaningful
    let mut worst_f = 0.0f64;
    let mut worst_rel = 0.0f64;
    for _ in 0..2000 {
        let nu1 = rng.gen_range(0.2..2.0);
        let p = QubitParams {
            nu1,
            nu2: rng.gen_range(nu1..3.0),
            beta: beta_of([0.3, 0.6, 1.0, 5.0, f64::INFINITY][rng.gen_range(0..5)]),
            delta: 0.0,
            phi: 0.0,
            alpha: rng.gen_range(0.0..PI),
            chi: rng.gen_range(0.0..2.0 * PI),
        };
        let spec = build_qubit_spec_with_unitary(&p, haar_unitary(&mut rng, 2)).unwrap();
        let r = cumulant_report(&spec, Mode::Undephased);
        let b = bounds_report(&spec, Mode::Undephased).unwrap();
        assert!((b.thm2_gap_closed.unwrap() - b.thm2_gap).abs() <= 1e-10);
        if r.regime != Regime::Engine {
            continue;
        }
        engines += 1;
        assert!(b.thm2_gap >= -1e-10, "gap {}", b.thm2_gap);
        let moderate = [b.rf_w, b.rf_qm, b.rf_qc].iter().all(|r| r.is_some_and(|x| x <= 1e2));
        if let (Some(a), Some(c)) = (b.rf_gap_w_qm, b.rf_gap_w_qm_closed) {
            worst_rel = worst_rel.max((a - c).abs() / a.abs().max(1.0));
            if moderate {
                worst_f = worst_f.max((a - c).abs());
            }
            if r.avg_qm + r.avg_w >= 0.0 && b.kd_discriminant.abs() > 1e-9 {
                assert_eq!(a.signum(), b.kd_discriminant.signum());
            }
        }
        if let (Some(a), Some(c)) = (b.rf_gap_w_qc, b.rf_gap_w_qc_closed) {
            worst_rel = worst_rel.max((a - c).abs() / a.abs().max(1.0));
            if moderate {
                worst_f = worst_f.max((a - c).abs());
            }
            if b.kd_discriminant.abs() > 1e-9 {
                assert_eq!(a.signum(), b.kd_discriminant.signum());
            }
        }
    }
    assert!(engines > 100);
    assert!(worst_f <= 1e-9, "rf gap deviation {worst_f:e}");
    assert!(worst_rel <= 1e-10, "rf gap relative deviation {worst_rel:e}");
}

#[test]
fn dephased_bound_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut engines = 0;
    for _ in 0..3000 {
        let nu1 = rng.gen_range(0.2..2.0);
        let p = QubitParams {
            nu1,
            nu2: rng.gen_range(nu1..4.0),
            beta: beta_of([0.3, 0.6, 1.0, 5.0, 20.0][rng.gen_range(0..5)]),
            delta: rng.gen_range(0.0..0.5),
            phi: rng.gen_range(0.0..2.0 * PI),
            alpha: rng.gen_range(0.0..PI),
            chi: rng.gen_range(0.0..2.0 * PI),
        };
        let spec = build_qubit_spec(&p).unwrap();
        let r = cumulant_report(&spec, Mode::Dephased);
        if r.regime != Regime::Engine {
            continue;
        }
        engines += 1;
        let b = bounds_report(&spec, Mode::Dephased).unwrap();
        let (rw, rqm, rqc) = (b.rf_w.unwrap(), b.rf_qm.unwrap(), b.rf_qc.unwrap());
        let tur = b.tur_bound.unwrap();
        assert!(rw >= rqm - 1e-10 && rqm >= rqc - 1e-10 && rqc >= tur - 1e-10);
        assert!(rqc >= b.appc_bound.unwrap() - 1e-10);
        let (eta2, ratio) = b.eff_sq_vs_var_ratio.unwrap();
        assert!(eta2 <= ratio + 1e-10 && ratio < 1.0);
        assert!(b.r_wd_or_wud.unwrap() <= b.r_qmd.unwrap() + 1e-10);
        assert!(b.r_qmd.unwrap() <= 1.0 + 1e-10);
        assert!(r.efficiency.unwrap() <= 1.0 - p.nu1 / p.nu2 + 1e-10);
    }
    assert!(engines > 300);
}

#[test]
fn refined_bound_both_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let p = QubitParams {
            nu1: rng.gen_range(0.2..2.0),
            nu2: rng.gen_range(0.2..3.0),
            beta: beta_of(rng.gen_range(0.05..6.0)),
            delta: rng.gen_range(0.0..1.0),
            phi: rng.gen_range(0.0..2.0 * PI),
            alpha: rng.gen_range(0.0..PI),
            chi: rng.gen_range(0.0..2.0 * PI),
        };
        let spec = build_qubit_spec(&p).unwrap();
        for mode in Mode::ALL {
            let b = bounds_report(&spec, mode).unwrap();
            if let (Some(rqc), Some(bound)) = (b.rf_qc, b.appc_bound) {
                assert!(rqc >= bound - 1e-10, "{mode}: {rqc} < {bound}");
            }
        }
    }
}

#[test]
fn zero_phase_xz_case() {
    for i in 0..30 {
        let p = QubitParams {
            delta: 0.02 + 0.03 * i as f64,
            alpha: 0.1 * i as f64,
            beta: beta_of([0.6, 1.0, 10.0][i % 3]),
            ..reference()
        };
        let spec = build_qubit_spec(&p).unwrap();
        let b = bounds_report(&spec, Mode::Undephased).unwrap();
        assert!(b.kd_discriminant.abs() <= 1e-10);
        if let (Some(w), Some(qm), Some(qc)) = (b.rf_w, b.rf_qm, b.rf_qc) {
            let scale = w.abs().max(1.0);
            assert!((w - qm).abs() <= 1e-9 * scale && (w - qc).abs() <= 1e-9 * scale);
        }
        if let Some(rel) = b.r_wd_or_wud {
            assert!(rel <= 1.0 + 1e-10);
        }
    }
}

#[test]
fn adiabatic_modes_agree() {
    for i in 0..30 {
        let f = i as f64;
        let p = QubitParams {
            delta: 0.0,
            alpha: (0.37 * f) % PI,
            chi: (0.91 * f) % (2.0 * PI),
            phi: (1.3 * f) % (2.0 * PI),
            beta: beta_of(BETAS[i % BETAS.len()]),
            ..reference()
        };
        let spec = build_qubit_spec(&p).unwrap();
        let a = cumulant_report(&spec, Mode::Dephased);
        let b = cumulant_report(&spec, Mode::Undephased);
        assert!((a.avg_w - b.avg_w).abs() <= 1e-10);
        assert!((a.avg_qm - b.avg_qm).abs() <= 1e-10);
        assert!((a.avg_qc - b.avg_qc).abs() <= 1e-10);
        assert!((a.var_w - b.var_w).norm() <= 1e-10);
        assert!((a.var_qm - b.var_qm).norm() <= 1e-10);
        assert!((a.var_qc - b.var_qc).abs() <= 1e-10);
    }
}

#[test]
fn dephased_monotone_in_transition_probability() {
    for theta in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let mut prev: Option<(f64, f64, f64, f64)> = None;
        for i in 0..25 {
            let delta = 0.49 * i as f64 / 24.0;
            let p = QubitParams { delta, ..reference() }.with_theta(theta);
            let r = cumulant_report(&build_qubit_spec(&p).unwrap(), Mode::Dephased);
            let cur = (r.avg_w, r.efficiency.unwrap(), r.reliability_w.unwrap(), r.var_w.re);
            if let Some(pr) = prev {
                assert!(cur.0 < pr.0 && cur.1 < pr.1 && cur.2 < pr.2, "theta {theta} delta {delta}");
                assert!(cur.3 > pr.3, "variance theta {theta} delta {delta}");
            }
            prev = Some(cur);
        }
    }
}

#[test]
fn reliability_saturates_for_perfect_cycle() {
    let p = QubitParams {
        beta: Beta::INFINITE,
        delta: 0.0,
        chi: FRAC_PI_2,
        ..reference()
    };
    let spec = build_qubit_spec(&p).unwrap();
    let r = cumulant_report(&spec, Mode::Dephased);
    assert!((r.avg_w - 1.0).abs() <= 1e-12);
    assert!((r.reliability_w.unwrap() - 1.0).abs() <= 1e-10);
    let tp = transition_probs(&spec).unwrap();
    let c = dephased_closed(&tp, 1.0, 2.0, Beta::INFINITE);
    assert!((c.reliability_w().unwrap() - 1.0).abs() <= 1e-10);
}

#[test]
fn fig5_parameters_match_closed_form() {
    let p = QubitParams {
        beta: Beta::new(10.0).unwrap(),
        delta: 0.3,
        alpha: 3.0 * PI / 4.0,
        ..reference()
    };
    let spec = build_qubit_spec(&p).unwrap();
    let tp = transition_probs(&spec).unwrap();
    let c = undephased_closed(&tp, 1.0, 2.0, p.beta);
    assert!(c.max_deviation(&cumulant_report(&spec, Mode::Undephased)) <= 1e-10);
}

#[test]
fn occupation_ordering_outside_engine_regime() {
    let p = QubitParams {
        beta: Beta::new(50.0).unwrap(),
        delta: 0.6,
        ..reference()
    }
    .with_theta(0.3);
    let o = occupation_probs(&p, Mode::Dephased).unwrap();
    assert!(o.p_ec <= o.p_eb);
}

#[test]
fn unmonitored_efficiency_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut seen = 0;
    for _ in 0..1000 {
        let nu1 = rng.gen_range(0.2..2.0);
        let p = QubitParams {
            nu1,
            nu2: rng.gen_range(nu1..3.0),
            beta: beta_of(rng.gen_range(0.1..10.0)),
            delta: rng.gen_range(0.0..1.0),
            phi: rng.gen_range(0.0..2.0 * PI),
            alpha: rng.gen_range(0.0..PI),
            chi: rng.gen_range(0.0..2.0 * PI),
        };
        let spec = build_qubit_spec(&p).unwrap();
        let r = cumulant_report(&spec, Mode::Undephased);
        if r.regime != Regime::Engine {
            continue;
        }
        seen += 1;
        let tp = transition_probs(&spec).unwrap();
        let e = efficiency_bounds(&tp, p.nu1, p.nu2, p.beta).unwrap();
        assert!((e.eff - r.efficiency.unwrap()).abs() <= 1e-10);
        assert!(e.eff <= 1.0 + 1e-12);
        assert!(e.eff >= e.eff_lower - 1e-12);
        assert!(r.avg_w >= e.w_lower - 1e-10);
    }
    assert!(seen > 50);
}
