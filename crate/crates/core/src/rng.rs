//! Deterministic random generation keyed by a seed and a stream label, so
//! that property rows and reports are byte-identical across runs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::{cf, CMatrix, CVector};

/// Counter-based generator: each (seed, stream) pair yields an independent,
/// reproducible sequence.
pub fn stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    // Box-Muller; avoids pulling in rand_distr for one distribution.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian(rng: &mut ChaCha12Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

/// Haar-random unit vector of dimension `dim`.
pub fn random_state_vector(rng: &mut ChaCha12Rng, dim: usize) -> CVector {
    let mut v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v /= cf(norm);
    v
}

/// Random density matrix: partial trace of a Haar-random bipartite pure state
/// with an environment of the same dimension.
pub fn random_density(rng: &mut ChaCha12Rng, dim: usize) -> CMatrix {
    let psi = random_state_vector(rng, dim * dim);
    let mut rho = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..dim {
                acc += psi[i * dim + e] * psi[j * dim + e].conj();
            }
            rho[(i, j)] = acc;
        }
    }
    rho
}

/// Haar-random unitary via QR of a Gaussian matrix with phase fix.
pub fn random_unitary(rng: &mut ChaCha12Rng, dim: usize) -> CMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / cf(d.norm()) } else { cf(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}
