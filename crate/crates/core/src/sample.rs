//! Random operators for randomized invariant suites.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::engine::{Beta, EngineSpec};
use crate::qmath::{CMatrix, HermitianOperator, KrausChannel, UnitaryOperator};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: Gram-Schmidt QR of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryOperator {
    let z = CMatrix::from_fn(dim, |_, _| gaussian(rng));
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut c = z.column(j);
        for q in &cols {
            let ov: Complex64 = q.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
            for (ci, qi) in c.iter_mut().zip(q) {
                *ci -= ov * qi;
            }
        }
        // Normalizing to a positive R diagonal is what makes the law Haar.
        let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for ci in c.iter_mut() {
            *ci /= norm;
        }
        cols.push(c);
    }
    let m = CMatrix::from_fn(dim, |i, j| cols[j][i]);
    UnitaryOperator::new(m).expect("Gram-Schmidt output is unitary")
}

/// Hermitian matrix with entries of order `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianOperator {
    let g = CMatrix::from_fn(dim, |_, _| gaussian(rng));
    let h = (&g + &g.adjoint()).scale_real(0.5 * scale);
    HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
}

/// Projective measurement channel in a Haar-random basis, with the basis
/// vectors grouped into a random number of blocks.
pub fn random_projective_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> KrausChannel {
    let w = haar_unitary(rng, dim);
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.shuffle(rng);
    let blocks = rng.gen_range(1..=dim);
    let mut projectors = vec![CMatrix::zeros(dim); blocks];
    for (pos, &i) in idx.iter().enumerate() {
        // first `blocks` vectors seed every block so none is empty
        let b = if pos < blocks { pos } else { rng.gen_range(0..blocks) };
        projectors[b] = &projectors[b] + &CMatrix::projector(&w.matrix().column(i));
    }
    KrausChannel::projective(projectors).expect("blocks resolve the identity")
}

/// `rho -> sum_j p_j W_j rho W_j†` with random weights and Haar unitaries.
pub fn random_unitary_mixture<R: Rng + ?Sized>(rng: &mut R, dim: usize, terms: usize) -> KrausChannel {
    let raw: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let kraus = raw
        .iter()
        .map(|p| haar_unitary(rng, dim).matrix().scale_real((p / total).sqrt()))
        .collect();
    KrausChannel::new(kraus).expect("unitary mixture is unital")
}

/// Fully random cycle of dimension `dim` at the given `beta`.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, dim: usize, beta: Beta) -> EngineSpec {
    let h1 = random_hermitian(rng, dim, 1.0);
    let h2 = random_hermitian(rng, dim, 1.5);
    let u = haar_unitary(rng, dim);
    let v = haar_unitary(rng, dim);
    let channel = if rng.gen_bool(0.5) {
        random_projective_channel(rng, dim)
    } else {
        let terms = rng.gen_range(1..=3);
        random_unitary_mixture(rng, dim, terms)
    };
    EngineSpec::new(h1, h2, u, v, channel, beta).expect("sampled parts are consistent")
}
