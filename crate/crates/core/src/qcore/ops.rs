use num_complex::Complex64;

use crate::error::{QError, QResult};
use crate::linalg::{CMatrix, C_ZERO};
use crate::qcore::layout::{Holder, Register, RegisterLayout};
use crate::qcore::state::{DensityOperator, PureState};
use crate::{DEFAULT_DIM_CAP, TOL};

/// Matrix representation of an isometry. Large structural operations
/// (embezzlement staircases, basis relabelings) use the permutation form,
/// which applies in O(dim) instead of a dense mat-vec.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixRep {
    Dense(CMatrix),
    /// Column j carries a single entry `phases[j]` at row `map[j]`.
    Permutation {
        out_dim: usize,
        map: Vec<usize>,
        phases: Vec<Complex64>,
    },
}

/// Isometry between two register layouts (out_dim ≥ in_dim, V†V = I).
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryOp {
    pub in_layout: RegisterLayout,
    pub out_layout: RegisterLayout,
    pub rep: MatrixRep,
}

impl IsometryOp {
    pub fn from_matrix(
        in_layout: RegisterLayout,
        out_layout: RegisterLayout,
        matrix: CMatrix,
    ) -> QResult<Self> {
        let (d_out, d_in) = (matrix.nrows(), matrix.ncols());
        if d_in != in_layout.total_dim() || d_out != out_layout.total_dim() {
            return Err(QError::DimensionMismatch(format!(
                "isometry is {d_out}x{d_in}, layouts give {}x{}",
                out_layout.total_dim(),
                in_layout.total_dim()
            )));
        }
        if d_out < d_in {
            return Err(QError::NotIsometry(f64::INFINITY));
        }
        let dev = crate::linalg::max_dev_from_identity(&(matrix.adjoint() * &matrix));
        if dev > TOL {
            return Err(QError::NotIsometry(dev));
        }
        Ok(IsometryOp {
            in_layout,
            out_layout,
            rep: MatrixRep::Dense(matrix),
        })
    }

    pub fn permutation(
        in_layout: RegisterLayout,
        out_layout: RegisterLayout,
        map: Vec<usize>,
        phases: Vec<Complex64>,
    ) -> QResult<Self> {
        let d_in = in_layout.total_dim();
        let d_out = out_layout.total_dim();
        if map.len() != d_in || phases.len() != d_in {
            return Err(QError::DimensionMismatch(
                "permutation map length differs from input dimension".into(),
            ));
        }
        let mut seen = vec![false; d_out];
        for (&m, p) in map.iter().zip(&phases) {
            if m >= d_out {
                return Err(QError::InvalidArgument(format!(
                    "permutation target {m} out of range {d_out}"
                )));
            }
            if seen[m] {
                return Err(QError::NotIsometry(f64::INFINITY));
            }
            seen[m] = true;
            if (p.norm() - 1.0).abs() > TOL {
                return Err(QError::NotIsometry((p.norm() - 1.0).abs()));
            }
        }
        Ok(IsometryOp {
            in_layout,
            out_layout,
            rep: MatrixRep::Permutation {
                out_dim: d_out,
                map,
                phases,
            },
        })
    }

    /// Preparation isometry: no inputs, emits `out_layout` in basis state
    /// `index`.
    pub fn prepare_basis(out_layout: RegisterLayout, index: usize) -> QResult<Self> {
        let d_out = out_layout.total_dim();
        if index >= d_out {
            return Err(QError::InvalidArgument(format!(
                "basis index {index} out of range {d_out}"
            )));
        }
        IsometryOp::permutation(
            RegisterLayout::empty(),
            out_layout,
            vec![index],
            vec![Complex64::new(1.0, 0.0)],
        )
    }

    pub fn in_dim(&self) -> usize {
        self.in_layout.total_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.out_layout.total_dim()
    }

    pub fn is_square(&self) -> bool {
        self.in_dim() == self.out_dim()
    }

    /// Dense materialization (used by serialization and small-dimension
    /// embeddings).
    pub fn dense(&self) -> CMatrix {
        match &self.rep {
            MatrixRep::Dense(m) => m.clone(),
            MatrixRep::Permutation { out_dim, map, phases } => {
                let mut m = CMatrix::zeros(*out_dim, map.len());
                for (j, (&i, p)) in map.iter().zip(phases).enumerate() {
                    m[(i, j)] = *p;
                }
                m
            }
        }
    }
}

/// Mixed-radix walker over a subset of layout positions; yields the flat
/// offset contribution of that subset while counting through configurations.
struct SubspaceIter {
    dims: Vec<usize>,
    strides: Vec<usize>,
    digits: Vec<usize>,
    offset: usize,
    total: usize,
    count: usize,
}

impl SubspaceIter {
    fn new(layout: &RegisterLayout, positions: &[usize]) -> Self {
        let dims: Vec<usize> = positions.iter().map(|&p| layout.registers()[p].dim).collect();
        let strides: Vec<usize> = positions.iter().map(|&p| layout.stride(p)).collect();
        let total = dims.iter().product::<usize>().max(1);
        SubspaceIter {
            digits: vec![0; dims.len()],
            dims,
            strides,
            offset: 0,
            total,
            count: 0,
        }
    }

    fn offsets(layout: &RegisterLayout, positions: &[usize]) -> Vec<usize> {
        let mut it = SubspaceIter::new(layout, positions);
        let mut v = Vec::with_capacity(it.total);
        while let Some(o) = it.next_offset() {
            v.push(o);
        }
        v
    }

    fn next_offset(&mut self) -> Option<usize> {
        if self.count == self.total {
            return None;
        }
        let current = self.offset;
        self.count += 1;
        // Least-significant digit last, matching row-major enumeration.
        for k in (0..self.dims.len()).rev() {
            self.digits[k] += 1;
            self.offset += self.strides[k];
            if self.digits[k] < self.dims[k] {
                break;
            }
            self.offset -= self.dims[k] * self.strides[k];
            self.digits[k] = 0;
        }
        Some(current)
    }
}

fn complement(layout: &RegisterLayout, positions: &[usize]) -> Vec<usize> {
    (0..layout.len()).filter(|p| !positions.contains(p)).collect()
}

/// Applies `op` to the named target registers of a pure state. The target
/// registers are removed and the op's output registers are spliced in at the
/// position of the first target; all other registers are untouched.
///
/// `out_ids`, when given, renames the output registers positionally (needed
/// when the same gate template is instantiated several times in one layout).
pub fn apply_on_registers(
    state: &PureState,
    op: &IsometryOp,
    targets: &[String],
    out_ids: Option<&[String]>,
    cap: usize,
) -> QResult<PureState> {
    let layout = &state.layout;
    let positions = layout.positions(targets)?;
    // Positional dimension check against the op's input layout.
    let in_regs = op.in_layout.registers();
    if positions.len() != in_regs.len() {
        return Err(QError::DimensionMismatch(format!(
            "op expects {} target registers, got {}",
            in_regs.len(),
            positions.len()
        )));
    }
    for (k, &p) in positions.iter().enumerate() {
        if layout.registers()[p].dim != in_regs[k].dim {
            return Err(QError::DimensionMismatch(format!(
                "target `{}` has dim {}, op input `{}` has dim {}",
                layout.registers()[p].id,
                layout.registers()[p].dim,
                in_regs[k].id,
                in_regs[k].dim
            )));
        }
    }
    let d_in = op.in_dim();
    let d_out = op.out_dim();
    let total = layout.total_dim();
    let rest_total = total / d_in.max(1);
    let new_total = rest_total * d_out;
    if new_total > cap {
        return Err(QError::CapExceeded { needed: new_total, cap });
    }

    // New layout: out registers replace the targets at the first target slot.
    let mut out_regs: Vec<Register> = op.out_layout.registers().to_vec();
    if let Some(ids) = out_ids {
        if ids.len() != out_regs.len() {
            return Err(QError::DimensionMismatch(
                "out_ids length differs from op output registers".into(),
            ));
        }
        for (r, id) in out_regs.iter_mut().zip(ids) {
            r.id = id.clone();
        }
    }
    // A register that keeps its id keeps its holder: gate templates carry
    // placeholder holders and must not retag the state's registers.
    for out_reg in out_regs.iter_mut() {
        if let Some(&p) = positions
            .iter()
            .find(|&&p| layout.registers()[p].id == out_reg.id)
        {
            out_reg.holder = layout.registers()[p].holder;
        }
    }
    let insert_at = positions.iter().copied().min().unwrap_or(layout.len());
    let mut new_regs: Vec<Register> = Vec::with_capacity(layout.len() - positions.len() + out_regs.len());
    for (p, r) in layout.registers().iter().enumerate() {
        if p == insert_at {
            new_regs.extend(out_regs.iter().cloned());
        }
        if !positions.contains(&p) {
            new_regs.push(r.clone());
        }
    }
    if insert_at == layout.len() {
        new_regs.extend(out_regs.iter().cloned());
    }
    let new_layout = RegisterLayout::new(new_regs)?;

    // Offset tables for the old and new layouts over matching enumerations.
    let rest_positions = complement(layout, &positions);
    let new_out_positions: Vec<usize> = (0..op.out_layout.len())
        .map(|k| {
            let count_before = rest_positions.iter().filter(|&&p| p < insert_at).count();
            count_before + k
        })
        .collect();
    let new_rest_positions: Vec<usize> = {
        let count_before = rest_positions.iter().filter(|&&p| p < insert_at).count();
        (0..rest_positions.len())
            .map(|i| if i < count_before { i } else { i + op.out_layout.len() })
            .collect()
    };

    let in_offsets = SubspaceIter::offsets(layout, &positions);
    let out_offsets = SubspaceIter::offsets(&new_layout, &new_out_positions);
    let mut new_amps = vec![C_ZERO; new_total];

    let mut old_rest = SubspaceIter::new(layout, &rest_positions);
    let mut new_rest = SubspaceIter::new(&new_layout, &new_rest_positions);
    match &op.rep {
        MatrixRep::Dense(m) => {
            let mut in_buf = vec![C_ZERO; d_in];
            while let (Some(ro), Some(rn)) = (old_rest.next_offset(), new_rest.next_offset()) {
                for (t, &io) in in_offsets.iter().enumerate() {
                    in_buf[t] = state.amps[io + ro];
                }
                for o in 0..d_out {
                    let mut acc = C_ZERO;
                    for t in 0..d_in {
                        let c = m[(o, t)];
                        if c != C_ZERO {
                            acc += c * in_buf[t];
                        }
                    }
                    new_amps[out_offsets[o] + rn] = acc;
                }
            }
        }
        MatrixRep::Permutation { map, phases, .. } => {
            while let (Some(ro), Some(rn)) = (old_rest.next_offset(), new_rest.next_offset()) {
                for (t, &io) in in_offsets.iter().enumerate() {
                    let a = state.amps[io + ro];
                    if a != C_ZERO {
                        new_amps[out_offsets[map[t]] + rn] += phases[t] * a;
                    }
                }
            }
        }
    }

    Ok(PureState {
        layout: new_layout,
        amps: new_amps,
    })
}

/// Convenience wrapper using the op's own output ids and the default cap.
pub fn apply(state: &PureState, op: &IsometryOp, targets: &[String]) -> QResult<PureState> {
    apply_on_registers(state, op, targets, None, DEFAULT_DIM_CAP)
}

/// Reduced density operator of a pure state on the kept registers
/// (in their original relative order).
pub fn partial_trace_pure(state: &PureState, keep: &[String]) -> QResult<DensityOperator> {
    let layout = &state.layout;
    let mut keep_positions = layout.positions(keep)?;
    keep_positions.sort_unstable();
    let env_positions = complement(layout, &keep_positions);
    let keep_offsets = SubspaceIter::offsets(layout, &keep_positions);
    let kd = keep_offsets.len();
    let mut rho = CMatrix::zeros(kd, kd);
    let mut env = SubspaceIter::new(layout, &env_positions);
    let mut buf = vec![C_ZERO; kd];
    while let Some(eo) = env.next_offset() {
        for (k, &ko) in keep_offsets.iter().enumerate() {
            buf[k] = state.amps[ko + eo];
        }
        for i in 0..kd {
            if buf[i] == C_ZERO {
                continue;
            }
            for j in 0..kd {
                rho[(i, j)] += buf[i] * buf[j].conj();
            }
        }
    }
    let regs: Vec<Register> = keep_positions
        .iter()
        .map(|&p| layout.registers()[p].clone())
        .collect();
    Ok(DensityOperator::new_unchecked(RegisterLayout::new(regs)?, rho))
}

/// Reduced density operator on the kept registers; accepts pure or mixed
/// input.
pub fn partial_trace(rho: &DensityOperator, keep: &[String]) -> QResult<DensityOperator> {
    let layout = &rho.layout;
    let mut keep_positions = layout.positions(keep)?;
    keep_positions.sort_unstable();
    let env_positions = complement(layout, &keep_positions);
    let keep_offsets = SubspaceIter::offsets(layout, &keep_positions);
    let env_offsets = SubspaceIter::offsets(layout, &env_positions);
    let kd = keep_offsets.len();
    let mut out = CMatrix::zeros(kd, kd);
    for i in 0..kd {
        for j in 0..kd {
            let mut acc = C_ZERO;
            for &eo in &env_offsets {
                acc += rho.matrix[(keep_offsets[i] + eo, keep_offsets[j] + eo)];
            }
            out[(i, j)] = acc;
        }
    }
    let regs: Vec<Register> = keep_positions
        .iter()
        .map(|&p| layout.registers()[p].clone())
        .collect();
    Ok(DensityOperator::new_unchecked(RegisterLayout::new(regs)?, out))
}

/// Schmidt decomposition of a pure state across a holder bipartition.
pub struct SchmidtDecomposition {
    /// Singular values, descending; their squares sum to 1.
    pub coefficients: Vec<f64>,
    /// Number of singular values above 1e-9.
    pub rank: usize,
}

/// Reshapes the amplitude vector into the (side A) × (side B) coefficient
/// matrix, also returning the register positions that form each side.
pub fn schmidt_matrix(
    state: &PureState,
    side_a: &[Holder],
    side_b: &[Holder],
) -> QResult<(CMatrix, Vec<usize>, Vec<usize>)> {
    let layout = &state.layout;
    let mut a_positions = Vec::new();
    let mut b_positions = Vec::new();
    for (p, r) in layout.registers().iter().enumerate() {
        if side_a.contains(&r.holder) {
            a_positions.push(p);
        } else if side_b.contains(&r.holder) {
            b_positions.push(p);
        } else {
            return Err(QError::HolderViolation(format!(
                "register `{}` (holder {:?}) is on neither side of the cut",
                r.id, r.holder
            )));
        }
    }
    let a_offsets = SubspaceIter::offsets(layout, &a_positions);
    let b_offsets = SubspaceIter::offsets(layout, &b_positions);
    let mut m = CMatrix::zeros(a_offsets.len(), b_offsets.len());
    for (i, &ao) in a_offsets.iter().enumerate() {
        for (j, &bo) in b_offsets.iter().enumerate() {
            m[(i, j)] = state.amps[ao + bo];
        }
    }
    Ok((m, a_positions, b_positions))
}

pub fn schmidt_decomposition(
    state: &PureState,
    side_a: &[Holder],
    side_b: &[Holder],
) -> QResult<SchmidtDecomposition> {
    let (m, _, _) = schmidt_matrix(state, side_a, side_b)?;
    let coefficients = crate::linalg::singular_values(&m);
    let rank = coefficients.iter().filter(|&&s| s > 1e-9).count();
    Ok(SchmidtDecomposition { coefficients, rank })
}

/// Permutes a density operator's registers into the given order.
pub fn reorder_density(rho: &DensityOperator, order: &[String]) -> QResult<DensityOperator> {
    if order.len() != rho.layout.len() {
        return Err(QError::DimensionMismatch(
            "reorder must list every register exactly once".into(),
        ));
    }
    let positions = rho.layout.positions(order)?;
    {
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != positions.len() {
            return Err(QError::InvalidArgument("duplicate register in reorder".into()));
        }
    }
    let new_regs: Vec<Register> = positions
        .iter()
        .map(|&p| rho.layout.registers()[p].clone())
        .collect();
    let new_layout = RegisterLayout::new(new_regs)?;
    let d = rho.dim();
    // index map: new index -> old index
    let old_strides: Vec<usize> = positions.iter().map(|&p| rho.layout.stride(p)).collect();
    let new_dims: Vec<usize> = new_layout.registers().iter().map(|r| r.dim).collect();
    let mut idx_map = vec![0usize; d];
    for (new_idx, slot) in idx_map.iter_mut().enumerate() {
        let digits = super::gates::decode_mixed_radix(new_idx, &new_dims);
        *slot = digits
            .iter()
            .zip(&old_strides)
            .map(|(&dg, &st)| dg * st)
            .sum();
    }
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = rho.matrix[(idx_map[i], idx_map[j])];
        }
    }
    Ok(DensityOperator::new_unchecked(new_layout, m))
}

/// Embeds a square operator acting on `targets` into the full space of
/// `layout`. Intended for small dimensions (POVM elements, decoder gates on
/// reduced states).
pub fn embed_square_op(layout: &RegisterLayout, targets: &[String], m: &CMatrix) -> QResult<CMatrix> {
    let positions = layout.positions(targets)?;
    let t_offsets = SubspaceIter::offsets(layout, &positions);
    let td = t_offsets.len();
    if m.nrows() != td || m.ncols() != td {
        return Err(QError::DimensionMismatch(format!(
            "operator is {}x{}, targets span dimension {td}",
            m.nrows(),
            m.ncols()
        )));
    }
    let rest_positions = complement(layout, &positions);
    let total = layout.total_dim();
    let mut full = CMatrix::zeros(total, total);
    let mut rest = SubspaceIter::new(layout, &rest_positions);
    while let Some(ro) = rest.next_offset() {
        for i in 0..td {
            for j in 0..td {
                let v = m[(i, j)];
                if v != C_ZERO {
                    full[(t_offsets[i] + ro, t_offsets[j] + ro)] = v;
                }
            }
        }
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cf;
    use crate::qcore::gates;
    use crate::qcore::layout::{Holder, Register};

    fn layout(regs: &[(&str, usize, Holder)]) -> RegisterLayout {
        RegisterLayout::new(
            regs.iter()
                .map(|(id, d, h)| Register::new(*id, *d, *h))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pauli_x_on_named_register() {
        // X on register q of |0>_q -> |1>_q
        let l = layout(&[("q", 2, Holder::Alice)]);
        let psi = PureState::basis(l, 0).unwrap();
        let x = gates::one_qubit_op("q", Holder::Alice, &gates::pauli_x());
        let out = apply(&psi, &x, &["q".into()]).unwrap();
        assert!((out.amps[1].re - 1.0).abs() < 1e-12);
        assert!(out.amps[0].norm() < 1e-12);
    }

    #[test]
    fn hadamard_pair_gives_uniform_superposition() {
        // H⊗H on |00> -> (1/2)(|00>+|01>+|10>+|11>)
        let l = layout(&[("a", 2, Holder::Alice), ("b", 2, Holder::Alice)]);
        let mut psi = PureState::basis(l, 0).unwrap();
        let h = gates::one_qubit_op("a", Holder::Alice, &gates::hadamard());
        psi = apply(&psi, &h, &["a".into()]).unwrap();
        let h2 = gates::one_qubit_op("b", Holder::Alice, &gates::hadamard());
        psi = apply(&psi, &h2, &["b".into()]).unwrap();
        for k in 0..4 {
            assert!((psi.amps[k].re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn middle_register_untouched_by_edge_ops() {
        // Apply X on the last register of a 3-register layout and check the
        // result against the flat kron product.
        let l = layout(&[
            ("a", 2, Holder::Alice),
            ("b", 3, Holder::Bob),
            ("c", 2, Holder::Bob),
        ]);
        let mut amps = vec![C_ZERO; 12];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = cf(((i + 1) as f64).sqrt());
        }
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= cf(n);
        }
        let psi = PureState::new(l, amps.clone()).unwrap();
        let x = gates::one_qubit_op("c", Holder::Bob, &gates::pauli_x());
        let out = apply(&psi, &x, &["c".into()]).unwrap();
        let full = crate::linalg::kron(
            &crate::linalg::kron(&crate::linalg::identity(2), &crate::linalg::identity(3)),
            &gates::pauli_x(),
        );
        for i in 0..12 {
            let mut want = C_ZERO;
            for j in 0..12 {
                want += full[(i, j)] * amps[j];
            }
            assert!((out.amps[i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let psi = gates::bell_pair("l", Holder::Alice, "r", Holder::Bob, 0).unwrap();
        let rho = partial_trace_pure(&psi, &["l".into()]).unwrap();
        assert!((rho.matrix[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((rho.matrix[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(rho.matrix[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        // tracing B from |0>_A ⊗ |1>_B -> |0><0|_A
        let l = layout(&[("a", 2, Holder::Alice), ("b", 2, Holder::Bob)]);
        let psi = PureState::basis(l, 1).unwrap();
        let rho = partial_trace_pure(&psi, &["a".into()]).unwrap();
        assert!((rho.matrix[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_keep_all_is_identity() {
        let psi = gates::bell_pair("l", Holder::Alice, "r", Holder::Bob, 2).unwrap();
        let rho = partial_trace_pure(&psi, &["l".into(), "r".into()]).unwrap();
        let direct = psi.to_density();
        assert!(crate::linalg::max_abs_diff(&rho.matrix, &direct.matrix) < 1e-12);
    }

    #[test]
    fn schmidt_of_bell_pair() {
        let psi = gates::bell_pair("l", Holder::Alice, "r", Holder::Bob, 0).unwrap();
        let s = schmidt_decomposition(&psi, &[Holder::Alice], &[Holder::Bob]).unwrap();
        assert_eq!(s.rank, 2);
        assert!((s.coefficients[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.coefficients[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn schmidt_of_product_state_is_rank_one() {
        let l = layout(&[("a", 2, Holder::Alice), ("b", 2, Holder::Bob)]);
        let psi = PureState::basis(l, 0).unwrap();
        let s = schmidt_decomposition(&psi, &[Holder::Alice], &[Holder::Bob]).unwrap();
        assert_eq!(s.rank, 1);
    }

    #[test]
    fn schmidt_of_two_bell_pairs_is_rank_four() {
        let p1 = gates::bell_pair("l1", Holder::Alice, "r1", Holder::Bob, 0).unwrap();
        let p2 = gates::bell_pair("l2", Holder::Alice, "r2", Holder::Bob, 0).unwrap();
        let psi = p1.tensor(&p2).unwrap();
        let s = schmidt_decomposition(&psi, &[Holder::Alice], &[Holder::Bob]).unwrap();
        assert_eq!(s.rank, 4);
    }

    #[test]
    fn composition_matches_flat_matrix_product() {
        // Two overlapping 2-qubit gates on a 3-qubit state, versus the flat
        // 8x8 product.
        let l = layout(&[
            ("a", 2, Holder::Alice),
            ("b", 2, Holder::Alice),
            ("c", 2, Holder::Alice),
        ]);
        let mut rng = crate::rng::stream(11, 0);
        let v = crate::rng::random_state_vector(&mut rng, 8);
        let psi = PureState::new(l.clone(), v.iter().copied().collect()).unwrap();
        let g1 = crate::rng::random_unitary(&mut rng, 4);
        let g2 = crate::rng::random_unitary(&mut rng, 4);
        let op1 = gates::two_qubit_op("a", "b", Holder::Alice, &g1);
        let op2 = gates::two_qubit_op("b", "c", Holder::Alice, &g2);
        let out = apply(
            &apply(&psi, &op1, &["a".into(), "b".into()]).unwrap(),
            &op2,
            &["b".into(), "c".into()],
        )
        .unwrap();
        let full =
            crate::linalg::kron(&crate::linalg::identity(2), &g2) * crate::linalg::kron(&g1, &crate::linalg::identity(2));
        for i in 0..8 {
            let mut want = C_ZERO;
            for j in 0..8 {
                want += full[(i, j)] * psi.amps[j];
            }
            assert!((out.amps[i] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn unknown_register_is_reported() {
        let l = layout(&[("q", 2, Holder::Alice)]);
        let psi = PureState::basis(l, 0).unwrap();
        let x = gates::one_qubit_op("q", Holder::Alice, &gates::pauli_x());
        let r = apply(&psi, &x, &["nope".into()]);
        assert!(matches!(r, Err(QError::UnknownRegister(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let l = layout(&[("q", 2, Holder::Alice)]);
        let psi = PureState::basis(l, 0).unwrap();
        let big = RegisterLayout::new(vec![Register::new("w", 16, Holder::Alice)]).unwrap();
        let op = IsometryOp::prepare_basis(big, 0).unwrap();
        let r = apply_on_registers(&psi, &op, &[], None, 8);
        assert!(matches!(r, Err(QError::CapExceeded { .. })));
    }
}
