//! Invariant suites behind `otto check`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use otto_core::engine::{
    cf_cumulant_crosscheck, characteristic_function, cumulant_report, cycle_table, Beta, CumulantReport, EngineSpec,
    Mode, Regime,
};
use otto_core::qmath::{CMatrix, KrausChannel, Tolerances};
use otto_core::qubit::{
    basis_comparisons, bounds_report, build_qubit_spec, build_qubit_spec_with, build_qubit_spec_with_unitary,
    dephased_cf_closed, dephased_closed, transition_probs, undephased_closed, QubitParams, VChoice,
};
use otto_core::sample::{haar_unitary, random_hermitian, random_projective_channel, random_spec, random_unitary_mixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to check under the requested conditions.
    #[serde(rename = "n/a")]
    NotApplicable,
    /// Empirical observation; never fails the run.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "N/A",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub status: Status,
    pub max_dev: f64,
    pub tol: f64,
    pub samples: usize,
    pub skipped: usize,
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<5} {:<28} max_dev={:<10.3e} tol={:<8.0e} n={}",
            self.status.to_string(),
            self.name,
            self.max_dev,
            self.tol,
            self.samples
        )?;
        if self.skipped > 0 {
            write!(f, " skipped={}", self.skipped)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Adds an amplitude-damping channel to the channel suite.
    NonUnital,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "non-unital" | "nonunital" => Ok(Fault::NonUnital),
            _ => Err(format!("unknown fault {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub seed: u64,
    /// Fix the inverse temperature of every sampled cycle.
    pub beta: Option<Beta>,
    pub inject: Option<Fault>,
}

/// Running maximum of a deviation, or of a violation amount for an
/// inequality.
#[derive(Default)]
struct Acc {
    max_dev: f64,
    samples: usize,
    skipped: usize,
}

impl Acc {
    fn dev(&mut self, d: f64) {
        self.samples += 1;
        // NaN counts as a failure
        self.max_dev = if d.is_nan() { f64::INFINITY } else { self.max_dev.max(d) };
    }

    /// Violation of `lhs <= rhs`.
    fn le(&mut self, lhs: f64, rhs: f64) {
        self.dev((lhs - rhs).max(0.0));
    }

    fn merge(mut self, o: Acc) -> Acc {
        self.max_dev = self.max_dev.max(o.max_dev);
        self.samples += o.samples;
        self.skipped += o.skipped;
        self
    }

    fn finish(self, name: &'static str, tol: f64) -> SuiteOutcome {
        let status = if self.samples == 0 {
            Status::NotApplicable
        } else if self.max_dev <= tol {
            Status::Pass
        } else {
            Status::Fail
        };
        SuiteOutcome {
            name,
            status,
            max_dev: self.max_dev,
            tol,
            samples: self.samples,
            skipped: self.skipped,
        }
    }
}

const BETAS: [f64; 6] = [0.0, 0.3, 0.6, 1.0, 5.0, f64::INFINITY];

fn beta_of(x: f64) -> Beta {
    if x.is_infinite() {
        Beta::INFINITE
    } else {
        Beta::new(x).expect("non-negative")
    }
}

struct Samples {
    qubits: Vec<QubitParams>,
    general: Vec<EngineSpec>,
    adjoint: Vec<EngineSpec>,
    gammas: Vec<[f64; 4]>,
    beta: Option<Beta>,
}

impl Samples {
    fn draw(opts: &CheckOptions) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let pick_beta = |rng: &mut ChaCha8Rng| opts.beta.unwrap_or_else(|| beta_of(BETAS[rng.gen_range(0..BETAS.len())]));
        let qubits = (0..300)
            .map(|_| {
                let nu1 = rng.gen_range(0.2..2.0);
                QubitParams {
                    nu1,
                    nu2: rng.gen_range(0.2..3.0),
                    beta: pick_beta(&mut rng),
                    delta: rng.gen_range(0.0..=1.0),
                    phi: rng.gen_range(0.0..2.0 * PI),
                    alpha: rng.gen_range(0.0..=PI),
                    chi: rng.gen_range(0.0..2.0 * PI),
                }
            })
            .collect();
        let general = (0..40)
            .map(|i| {
                let b = pick_beta(&mut rng);
                random_spec(&mut rng, 3 + i % 2, b)
            })
            .collect();
        let adjoint = (0..300)
            .map(|_| {
                let nu1 = rng.gen_range(0.2..2.0);
                let p = QubitParams {
                    nu1,
                    nu2: rng.gen_range(nu1..3.0),
                    beta: pick_beta(&mut rng),
                    delta: 0.0,
                    phi: 0.0,
                    alpha: rng.gen_range(0.0..=PI),
                    chi: rng.gen_range(0.0..2.0 * PI),
                };
                build_qubit_spec_with_unitary(&p, haar_unitary(&mut rng, 2)).expect("valid params")
            })
            .collect();
        let gammas = (0..300).map(|_| std::array::from_fn(|_| rng.gen_range(-3.0..3.0))).collect();
        Samples {
            qubits,
            general,
            adjoint,
            gammas,
            beta: opts.beta,
        }
    }

    fn qubit_specs(&self) -> Vec<EngineSpec> {
        self.qubits.iter().map(|p| build_qubit_spec(p).expect("valid params")).collect()
    }
}

fn over<T: Sync>(items: &[T], f: impl Fn(&T, &mut Acc) + Sync) -> Acc {
    items
        .par_iter()
        .map(|x| {
            let mut a = Acc::default();
            f(x, &mut a);
            a
        })
        .reduce(Acc::default, Acc::merge)
}

fn reports(spec: &EngineSpec) -> [CumulantReport; 2] {
    Mode::ALL.map(|m| cumulant_report(spec, m))
}

pub fn run_checks(opts: &CheckOptions) -> Vec<SuiteOutcome> {
    crate::parallel(|| run_all(opts))
}

fn run_all(opts: &CheckOptions) -> Vec<SuiteOutcome> {
    let s = Samples::draw(opts);
    let qspecs = s.qubit_specs();
    let all_specs: Vec<&EngineSpec> = qspecs.iter().chain(&s.general).chain(&s.adjoint).collect();
    let mut out = Vec::new();

    // qmath
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let herms: Vec<_> = (0..100).map(|i| random_hermitian(&mut rng, 1 + i % 8, 2.0)).collect();
    out.push(
        over(&herms, |h, a| {
            a.dev(h.reconstruction_error());
            let v = h.eigenvectors();
            a.dev((&v.adjoint() * v).max_abs_diff(&CMatrix::identity(h.dim())));
        })
        .finish("qmath.eigensystem", 1e-10),
    );
    let mut channels: Vec<KrausChannel> = (0..60)
        .map(|i| {
            let d = 2 + i % 3;
            if i % 2 == 0 {
                random_projective_channel(&mut rng, d)
            } else {
                random_unitary_mixture(&mut rng, d, 3)
            }
        })
        .collect();
    if opts.inject == Some(Fault::NonUnital) {
        let g: f64 = 0.3;
        let k0 = CMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]);
        let k1 = CMatrix::from_real(2, &[0.0, g.sqrt(), 0.0, 0.0]);
        channels.push(KrausChannel::from_kraus_unchecked(vec![k0, k1]).expect("square"));
    }
    out.push(
        over(&channels, |c, a| {
            a.dev(c.trace_preservation_deviation());
            a.dev(c.unitality_deviation());
            if c.check(&Tolerances::default()).is_err() {
                a.dev(f64::INFINITY);
            }
        })
        .finish("qmath.channel_unital", 1e-10),
    );

    // engine
    out.push(
        over(&all_specs, |spec, a| {
            for mode in Mode::ALL {
                let t = cycle_table(spec, mode);
                a.dev((t.total_weight() - 1.0).norm());
                for row in t.nl_marginals() {
                    for w in row {
                        a.dev(w.im.abs());
                        a.le(-w.re, 0.0);
                    }
                }
                if mode == Mode::Dephased {
                    a.dev(t.max_nonclassicality());
                }
            }
        })
        .finish("engine.normalization", 1e-10),
    );
    out.push(
        over(&all_specs, |spec, a| {
            for r in reports(spec) {
                a.dev((r.avg_w - r.avg_qm - r.avg_qc).abs());
            }
        })
        .finish("engine.first_law", 1e-10),
    );
    out.push(
        over(&all_specs, |spec, a| {
            for r in reports(spec) {
                a.le(0.0, r.avg_sigma);
                a.le(r.avg_qc, 0.0);
                a.dev(r.var_qc_im.abs());
            }
        })
        .finish("engine.second_law", 1e-10),
    );
    out.push(
        over(&all_specs, |spec, a| {
            for r in reports(spec) {
                match r.jarzynski {
                    Some(j) => a.dev((j - Complex64::new(1.0, 0.0)).norm()),
                    None => a.skipped += 1,
                }
            }
        })
        .finish("engine.jarzynski", 1e-10),
    );
    let fourier_cases: Vec<(&EngineSpec, [f64; 4])> = all_specs.iter().copied().zip(s.gammas.iter().copied().cycle()).collect();
    out.push(
        over(&fourier_cases, |(spec, g), a| {
            for mode in Mode::ALL {
                a.dev((characteristic_function(spec, mode, *g) - cycle_table(spec, mode).fourier(*g)).norm());
            }
        })
        .finish("engine.cf_fourier", 1e-9),
    );
    let cf_specs: Vec<&EngineSpec> = all_specs.iter().copied().step_by(7).take(50).collect();
    out.push(
        over(&cf_specs, |spec, a| {
            for mode in Mode::ALL {
                a.dev(cf_cumulant_crosscheck(spec, mode));
            }
        })
        .finish("engine.cf_cumulants", 1e-5),
    );

    // qubit model
    let qcases: Vec<(&QubitParams, &EngineSpec)> = s.qubits.iter().zip(&qspecs).collect();
    out.push(
        over(&qcases, |(p, spec), a| {
            let tp = transition_probs(spec).expect("qubit");
            let [d, u] = reports(spec);
            a.dev(dephased_closed(&tp, p.nu1, p.nu2, p.beta).max_deviation(&d));
            a.dev(undephased_closed(&tp, p.nu1, p.nu2, p.beta).max_deviation(&u));
            a.dev((tp.delta_p - p.delta).abs());
            a.dev((tp.zeta - p.delta).abs());
        })
        .finish("qubit.closed_forms", 1e-10),
    );
    let cf_cases: Vec<_> = qcases.iter().zip(&s.gammas).collect();
    out.push(
        over(&cf_cases, |((p, spec), g), a| {
            let tp = transition_probs(spec).expect("qubit");
            let closed = dephased_cf_closed(&tp, p.nu1, p.nu2, p.beta, **g);
            a.dev((closed - characteristic_function(spec, Mode::Dephased, **g)).norm());
        })
        .finish("qubit.cf_closed", 1e-9),
    );
    out.push(
        over(&s.adjoint, |spec, a| {
            let tp = transition_probs(spec).expect("qubit");
            a.dev((tp.zeta_sub_c - tp.theta_c).abs());
            a.dev((tp.delta_p - tp.zeta).abs());
            a.le(-tp.zeta_sup_c, 0.0);
            a.le(tp.zeta_sup_c, 0.5);
        })
        .finish("qubit.adjoint_identities", 1e-12),
    );
    out.push(
        over(&qcases, |(p, spec), a| {
            let r = cumulant_report(spec, Mode::Dephased);
            if r.regime != Regime::Engine {
                return;
            }
            let b = bounds_report(spec, Mode::Dephased).expect("qubit");
            match (b.r_wd_or_wud, b.r_qmd) {
                (Some(rw), Some(rq)) => {
                    a.le(rw, rq);
                    a.le(rq, 1.0);
                }
                _ => a.skipped += 1,
            }
            if let (Some(w), Some(qm), Some(qc)) = (b.rf_w, b.rf_qm, b.rf_qc) {
                a.le(qm, w);
                a.le(qc, qm);
                if let Some(t) = b.tur_bound {
                    a.le(t, qc);
                }
            }
            if let Some((e2, ratio)) = b.eff_sq_vs_var_ratio {
                a.le(e2, ratio);
            }
            a.le(r.efficiency.unwrap_or(0.0), 1.0 - p.nu1 / p.nu2);
        })
        .finish("qubit.monitored_bounds", 1e-10),
    );
    out.push(
        over(&qcases, |(_, spec), a| {
            for mode in Mode::ALL {
                let b = bounds_report(spec, mode).expect("qubit");
                if let (Some(rqc), Some(bound)) = (b.rf_qc, b.appc_bound) {
                    a.le(bound, rqc);
                }
            }
        })
        .finish("qubit.cold_heat_rf_bound", 1e-10),
    );
    out.push(
        over(&s.adjoint, |spec, a| {
            let b = bounds_report(spec, Mode::Undephased).expect("qubit");
            a.dev((b.thm2_gap_closed.unwrap_or(f64::NAN) - b.thm2_gap).abs());
            if cumulant_report(spec, Mode::Undephased).regime == Regime::Engine {
                a.le(0.0, b.thm2_gap);
            }
        })
        .finish("qubit.unmonitored_var_gap", 1e-10),
    );
    out.push(
        over(&s.adjoint, |spec, a| {
            let b = bounds_report(spec, Mode::Undephased).expect("qubit");
            // absolute agreement is meaningful only while the RFs stay moderate
            let moderate = [b.rf_w, b.rf_qm, b.rf_qc].iter().all(|r| r.is_some_and(|x| x <= 1e2));
            if !moderate {
                a.skipped += 1;
                return;
            }
            for (x, y) in [(b.rf_gap_w_qm, b.rf_gap_w_qm_closed), (b.rf_gap_w_qc, b.rf_gap_w_qc_closed)] {
                if let (Some(x), Some(y)) = (x, y) {
                    a.dev((x - y).abs());
                }
            }
        })
        .finish("qubit.rf_gaps", 1e-9),
    );
    let zero_phase: Vec<QubitParams> = s
        .qubits
        .iter()
        .map(|p| QubitParams {
            phi: 0.0,
            chi: 0.0,
            delta: p.delta.min(0.45),
            nu2: p.nu2.max(p.nu1 * 1.2),
            ..*p
        })
        .collect();
    out.push(
        over(&zero_phase, |p, a| {
            let spec = build_qubit_spec(p).expect("valid");
            let b = bounds_report(&spec, Mode::Undephased).expect("qubit");
            a.dev(b.kd_discriminant.abs());
            if let (Some(w), Some(qm), Some(qc)) = (b.rf_w, b.rf_qm, b.rf_qc) {
                if w <= 1e2 {
                    a.dev((w - qm).abs());
                    a.dev((w - qc).abs());
                } else {
                    a.skipped += 1;
                }
            }
        })
        .finish("qubit.zero_phase_rfs", 1e-9),
    );
    out.push(
        over(&qcases, |(p, _), a| {
            let spec = build_qubit_spec(&QubitParams { delta: 0.0, ..**p }).expect("valid");
            let [d, u] = reports(&spec);
            for (x, y) in [(d.avg_w, u.avg_w), (d.avg_qm, u.avg_qm), (d.avg_qc, u.avg_qc), (d.var_qc, u.var_qc)] {
                a.dev((x - y).abs());
            }
            a.dev((d.var_w - u.var_w).norm());
            a.dev((d.var_qm - u.var_qm).norm());
        })
        .finish("qubit.adiabatic_modes", 1e-10),
    );
    out.push(
        over(&s.qubits, |p, a| {
            let b = basis_comparisons(p).expect("valid");
            a.dev(b.max_deviation());
            if !b.ordering_holds(1e-10) {
                a.dev(f64::INFINITY);
            }
        })
        .finish("qubit.basis_comparisons", 1e-10),
    );

    // KD witness: some undephased weight leaves the simplex while the
    // monitored weights at the same point stay in it
    let witness = QubitParams {
        nu1: 1.0,
        nu2: 2.0,
        beta: s.beta.unwrap_or(beta_of(1.0)),
        delta: 0.3,
        phi: PI / 3.0,
        alpha: PI / 3.0,
        chi: PI / 5.0,
    };
    let wspec = build_qubit_spec_with(&witness, VChoice::Transpose).expect("valid");
    let und = cycle_table(&wspec, Mode::Undephased).max_nonclassicality();
    let dep = cycle_table(&wspec, Mode::Dephased).max_nonclassicality();
    out.push(SuiteOutcome {
        name: "qubit.kd_witness",
        status: if und > 1e-6 && dep <= 1e-12 { Status::Pass } else { Status::Fail },
        max_dev: dep,
        tol: 1e-12,
        samples: 1,
        skipped: 0,
    });

    // reliability bound away from the proven case: report only
    let mut rwud = over(&qcases, |(_, spec), a| {
        if let Some(r) = cumulant_report(spec, Mode::Undephased).reliability_w {
            if cumulant_report(spec, Mode::Undephased).regime == Regime::Engine {
                a.le(r, 1.0);
            }
        }
    })
    .finish("qubit.unmonitored_reliability", 1e-10);
    if rwud.status != Status::NotApplicable {
        rwud.status = Status::Info;
    }
    out.push(rwud);
    out
}

pub fn failures(outcomes: &[SuiteOutcome]) -> usize {
    outcomes.iter().filter(|o| o.status == Status::Fail).count()
}
