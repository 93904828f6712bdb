//! Thin helpers over nalgebra for the dense complex linear algebra used
//! throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn cf(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Hermitian eigendecomposition. Returns (eigenvalues ascending, eigenvectors
/// as columns). The input is symmetrized first so that callers can pass
/// matrices that are Hermitian only up to floating noise.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let se = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Singular values of a rectangular complex matrix, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut v: Vec<f64> = svd.singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Nuclear norm ‖m‖₁ (sum of singular values).
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// PSD square root via eigendecomposition; eigenvalues below `clip` are
/// treated as zero.
pub fn sqrtm_psd(m: &CMatrix, clip: f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let n = m.nrows();
    let mut d = CMatrix::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        d[(i, i)] = cf(if v > clip { v.sqrt() } else { 0.0 });
    }
    &vecs * d * vecs.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    let mut t = C_ZERO;
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)];
    }
    t
}

/// Max absolute entry of (m - identity); convenience for isometry checks.
pub fn max_dev_from_identity(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..m.ncols() {
            let want = if i == j { C_ONE } else { C_ZERO };
            worst = worst.max((m[(i, j)] - want).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}
