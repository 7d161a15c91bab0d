use num_complex::Complex64;
use serde::Serialize;

use super::{czero, EngineSpec, Mode};
use crate::qmath::CMatrix;

/// One stochastic cycle `(n, m, k, l)` with its four measured energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleEntry {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    /// Joint probability (dephased) or quasiprobability (undephased).
    pub weight: Complex64,
    /// Weight with `rho_1` replaced by the projector on `n`; `weight = p_n * conditional`.
    pub conditional: Complex64,
}

impl CycleEntry {
    pub fn energies(&self) -> [f64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    pub fn work(&self) -> f64 {
        self.e1 - self.e2 + self.e3 - self.e4
    }

    pub fn heat_hot(&self) -> f64 {
        self.e3 - self.e2
    }

    pub fn heat_cold(&self) -> f64 {
        self.e1 - self.e4
    }
}

/// All `d^4` trajectories in lexicographic `(n, m, k, l)` order.
#[derive(Debug, Clone, Serialize)]
pub struct CycleTable {
    pub mode: Mode,
    pub dim: usize,
    pub populations: Vec<f64>,
    pub entries: Vec<CycleEntry>,
}

impl CycleTable {
    pub fn total_weight(&self) -> Complex64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// `sum_{m,k} weight(n, m, k, l)` as a `d x d` array indexed `[n][l]`.
    pub fn nl_marginals(&self) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![czero(); self.dim]; self.dim];
        for e in &self.entries {
            out[e.n][e.l] += e.weight;
        }
        out
    }

    /// `sum_entries weight * f(entry)`
    pub fn expect(&self, f: impl Fn(&CycleEntry) -> f64) -> Complex64 {
        self.entries.iter().map(|e| e.weight * f(e)).sum()
    }

    /// Fourier sum `sum weight * exp(i g . e)`.
    pub fn fourier(&self, g: [f64; 4]) -> Complex64 {
        self.entries
            .iter()
            .map(|e| {
                let ph = g[0] * e.e1 + g[1] * e.e2 + g[2] * e.e3 + g[3] * e.e4;
                e.weight * Complex64::from_polar(1.0, ph)
            })
            .sum()
    }

    /// Largest `|Im|` or negative real part over all weights.
    pub fn max_nonclassicality(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.weight.im.abs().max(-e.weight.re))
            .fold(0.0, f64::max)
    }
}

pub fn cycle_table(spec: &EngineSpec, mode: Mode) -> CycleTable {
    let d = spec.dim();
    let thermal = spec.thermal_state();
    let h1 = spec.h1();
    let h2 = spec.h2();
    let u = spec.u().matrix();
    let u_dag = u.adjoint();
    let v = spec.v().matrix();
    let v_dag = v.adjoint();
    let ch = spec.channel();
    let l1 = h1.eigenvalues();
    let l2 = h2.eigenvalues();
    let vecs1: Vec<Vec<Complex64>> = (0..d).map(|i| h1.eigenvector(i)).collect();

    let mut entries = Vec::with_capacity(d.pow(4));
    for n in 0..d {
        let pn = h1.projector(n);
        // U P_n, and U P_n U† or U P_n for the two pictures
        let up = u * pn;
        for m in 0..d {
            let pm = h2.projector(m);
            let x: CMatrix = match mode {
                Mode::Dephased => &(&(pm * &up) * &up.adjoint()) * pm,
                Mode::Undephased => &(pm * &up) * &u_dag,
            };
            let y = ch.apply(&x).expect("dims validated by EngineSpec");
            for k in 0..d {
                let pk = h2.projector(k);
                let z = match mode {
                    Mode::Dephased => &(&(v * pk) * &(&y * pk)) * &v_dag,
                    Mode::Undephased => &(&(v * pk) * &y) * &v_dag,
                };
                for l in 0..d {
                    let cond = z.expectation(&vecs1[l], &vecs1[l]);
                    entries.push(CycleEntry {
                        n,
                        m,
                        k,
                        l,
                        e1: l1[n],
                        e2: l2[m],
                        e3: l2[k],
                        e4: l1[l],
                        weight: cond * thermal.populations[n],
                        conditional: cond,
                    });
                }
            }
        }
    }
    CycleTable {
        mode,
        dim: d,
        populations: thermal.populations,
        entries,
    }
}

/// Raw moment `sum weight * e1^s1 e2^s2 e3^s3 e4^s4`.
pub fn moment(table: &CycleTable, s: [u32; 4]) -> Complex64 {
    table.expect(|e| {
        e.e1.powi(s[0] as i32) * e.e2.powi(s[1] as i32) * e.e3.powi(s[2] as i32) * e.e4.powi(s[3] as i32)
    })
}
