use num_complex::Complex64;

use crate::error::{QError, QResult};
use crate::linalg::{cf, CMatrix};
use crate::qcore::layout::RegisterLayout;
use crate::TOL;

/// Pure state over a register layout, stored as a dense amplitude vector in
/// the layout's canonical row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub layout: RegisterLayout,
    pub amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amps: Vec<Complex64>) -> QResult<Self> {
        if amps.len() != layout.total_dim() {
            return Err(QError::DimensionMismatch(format!(
                "amplitude vector has length {}, layout dimension is {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let s = PureState { layout, amps };
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > TOL {
            return Err(QError::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Basis state |index⟩ of the layout.
    pub fn basis(layout: RegisterLayout, index: usize) -> QResult<Self> {
        let dim = layout.total_dim();
        if index >= dim {
            return Err(QError::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { layout, amps })
    }

    /// The trivial state on the empty layout.
    pub fn scalar() -> Self {
        PureState {
            layout: RegisterLayout::empty(),
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product; register ids must stay unique.
    pub fn tensor(&self, other: &PureState) -> QResult<PureState> {
        let layout = self.layout.join(&other.layout)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { layout, amps })
    }

    /// ⟨self|other⟩ for identical layouts.
    pub fn overlap(&self, other: &PureState) -> QResult<Complex64> {
        if self.layout.total_dim() != other.layout.total_dim() {
            return Err(QError::DimensionMismatch(
                "overlap of states with different dimensions".into(),
            ));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap |⟨self|other⟩|² (fidelity for pure states).
    pub fn fidelity_with(&self, other: &PureState) -> QResult<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityOperator {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityOperator {
            layout: self.layout.clone(),
            matrix: m,
        }
    }
}

/// Density operator over a register layout.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    pub layout: RegisterLayout,
    pub matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity (within tolerance).
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> QResult<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QError::DimensionMismatch(format!(
                "density matrix is {}x{}, layout dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_dev = crate::linalg::max_abs_diff(&matrix, &matrix.adjoint());
        if herm_dev > TOL {
            return Err(QError::InvalidDensity(format!(
                "not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let tr = crate::linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(QError::InvalidDensity(format!("trace is {tr}")));
        }
        let (vals, _) = crate::linalg::eigh(&matrix);
        if let Some(min) = vals.first() {
            if *min < -TOL {
                return Err(QError::InvalidDensity(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(DensityOperator { layout, matrix })
    }

    /// Skips the eigenvalue check; used on hot paths where positivity holds by
    /// construction.
    pub fn new_unchecked(layout: RegisterLayout, matrix: CMatrix) -> Self {
        DensityOperator { layout, matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        crate::linalg::trace(&self.matrix)
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.total_dim();
        let m = CMatrix::identity(d, d).scale(1.0 / d as f64);
        DensityOperator { layout, matrix: m }
    }

    pub fn tensor(&self, other: &DensityOperator) -> QResult<DensityOperator> {
        let layout = self.layout.join(&other.layout)?;
        let matrix = crate::linalg::kron(&self.matrix, &other.matrix);
        Ok(DensityOperator { layout, matrix })
    }

    /// Purification into a fresh Env register holding the eigenindex. Zero
    /// eigenvalues (below `clip`) are dropped, so the Env dimension equals the
    /// numerical rank.
    pub fn purify(&self, env_id: &str) -> QResult<PureState> {
        let (vals, vecs) = crate::linalg::eigh(&self.matrix);
        let clip = 1e-12;
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > clip).collect();
        let rank = keep.len().max(1);
        let mut regs = self.layout.registers().to_vec();
        regs.push(super::layout::Register::new(
            env_id,
            rank,
            super::layout::Holder::Env,
        ));
        let layout = RegisterLayout::new(regs)?;
        let d = self.dim();
        let mut amps = vec![Complex64::new(0.0, 0.0); d * rank];
        for (k, &i) in keep.iter().enumerate() {
            let w = cf(vals[i].sqrt());
            for row in 0..d {
                amps[row * rank + k] = w * vecs[(row, i)];
            }
        }
        // Renormalize the truncation residue away.
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let scale = cf(1.0 / n2.sqrt());
        for a in &mut amps {
            *a *= scale;
        }
        PureState::new(layout, amps)
    }
}
