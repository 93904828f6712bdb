//! Standard gate matrices and small builders for register-level operations.

use num_complex::Complex64;

use crate::error::{QError, QResult};
use crate::linalg::{cf, CMatrix, C_ONE, C_ZERO};
use crate::qcore::layout::{Holder, Register, RegisterLayout};
use crate::qcore::ops::IsometryOp;
use crate::qcore::state::PureState;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn identity2() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C_ZERO, C_ONE, C_ONE, C_ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C_ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            C_ZERO,
        ],
    )
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, cf(-1.0)])
}

pub fn hadamard() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[cf(SQRT_HALF), cf(SQRT_HALF), cf(SQRT_HALF), cf(-SQRT_HALF)],
    )
}

pub fn phase_s() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, Complex64::new(0.0, 1.0)])
}

/// X^a Z^b as a 2x2 matrix (Z applied first).
pub fn pauli_xz(a: u8, b: u8) -> CMatrix {
    let mut m = identity2();
    if b == 1 {
        m = pauli_z() * m;
    }
    if a == 1 {
        m = pauli_x() * m;
    }
    m
}

/// CNOT with the first register as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = C_ONE;
    m[(1, 1)] = C_ONE;
    m[(2, 3)] = C_ONE;
    m[(3, 2)] = C_ONE;
    m
}

pub fn cz() -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = cf(-1.0);
    m
}

pub fn swap2() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = C_ONE;
    m[(1, 2)] = C_ONE;
    m[(2, 1)] = C_ONE;
    m[(3, 3)] = C_ONE;
    m
}

/// Rotation taking the Bell basis to the computational basis:
/// (H ⊗ I)·CNOT maps β_ab to |a,b⟩.
pub fn bell_to_computational() -> CMatrix {
    crate::linalg::kron(&hadamard(), &identity2()) * cnot()
}

/// Square single-register gate template. The holder is a placeholder; a
/// register keeps its holder when a gate is applied to it.
pub fn one_qubit_op(id: &str, holder: Holder, m: &CMatrix) -> IsometryOp {
    let l = RegisterLayout::new(vec![Register::qubit(id, holder)]).unwrap();
    IsometryOp::from_matrix(l.clone(), l, m.clone()).expect("2x2 gate must be unitary")
}

/// Square two-register gate template (first id = most significant index).
pub fn two_qubit_op(id1: &str, id2: &str, holder: Holder, m: &CMatrix) -> IsometryOp {
    let l = RegisterLayout::new(vec![Register::qubit(id1, holder), Register::qubit(id2, holder)])
        .unwrap();
    IsometryOp::from_matrix(l.clone(), l, m.clone()).expect("4x4 gate must be unitary")
}

/// Square gate on registers of arbitrary dims.
pub fn square_op(regs: Vec<Register>, m: CMatrix) -> QResult<IsometryOp> {
    let l = RegisterLayout::new(regs)?;
    IsometryOp::from_matrix(l.clone(), l, m)
}

/// Bell state β_idx with idx = 2·phase_bit + flip_bit
/// (0: Φ⁺, 1: Ψ⁺, 2: Φ⁻, 3: Ψ⁻).
pub fn bell_pair(
    l_id: &str,
    l_holder: Holder,
    r_id: &str,
    r_holder: Holder,
    idx: usize,
) -> QResult<PureState> {
    let a = (idx >> 1) & 1;
    let b = idx & 1;
    let layout = RegisterLayout::new(vec![
        Register::qubit(l_id, l_holder),
        Register::qubit(r_id, r_holder),
    ])?;
    let mut amps = vec![C_ZERO; 4];
    amps[b] = cf(SQRT_HALF);
    amps[2 + (1 - b)] = cf(if a == 1 { -SQRT_HALF } else { SQRT_HALF });
    PureState::new(layout, amps)
}

/// Maximally entangled state of dimension d on two named registers.
pub fn maximally_entangled(
    l_id: &str,
    l_holder: Holder,
    r_id: &str,
    r_holder: Holder,
    d: usize,
) -> QResult<PureState> {
    let layout = RegisterLayout::new(vec![
        Register::new(l_id, d, l_holder),
        Register::new(r_id, d, r_holder),
    ])?;
    let w = cf(1.0 / (d as f64).sqrt());
    let mut amps = vec![C_ZERO; d * d];
    for k in 0..d {
        amps[k * d + k] = w;
    }
    PureState::new(layout, amps)
}

/// Decodes `idx` into mixed-radix digits over `dims` (row-major, first digit
/// most significant).
pub fn decode_mixed_radix(idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0usize; dims.len()];
    let mut rem = idx;
    for k in (0..dims.len()).rev() {
        digits[k] = rem % dims[k];
        rem /= dims[k];
    }
    digits
}

/// Permutation gate |c, t⟩ → |c, t ⊕ f(c)⟩. Register order is
/// [controls..., target]; the target dimension must be a power of two.
pub fn xor_function_gate(
    regs: Vec<Register>,
    f: impl Fn(&[usize]) -> usize,
) -> QResult<IsometryOp> {
    let layout = RegisterLayout::new(regs)?;
    let n = layout.len();
    if n == 0 {
        return Err(QError::InvalidArgument("xor gate needs a target register".into()));
    }
    let target_dim = layout.registers()[n - 1].dim;
    if !target_dim.is_power_of_two() {
        return Err(QError::InvalidArgument(
            "xor gate target dimension must be a power of two".into(),
        ));
    }
    let ctrl_dims: Vec<usize> = layout.registers()[..n - 1].iter().map(|r| r.dim).collect();
    let ctrl_total = ctrl_dims.iter().product::<usize>().max(1);
    let total = layout.total_dim();
    let mut map = Vec::with_capacity(total);
    for c in 0..ctrl_total {
        let digits = decode_mixed_radix(c, &ctrl_dims);
        let fv = f(&digits) & (target_dim - 1);
        for t in 0..target_dim {
            map.push(c * target_dim + (t ^ fv));
        }
    }
    IsometryOp::permutation(layout.clone(), layout, map, vec![C_ONE; total])
}

/// Diagonal phase gate exp(iθ(c,t)) over [controls..., target] basis states.
pub fn phase_function_gate(
    regs: Vec<Register>,
    phase: impl Fn(&[usize]) -> Complex64,
) -> QResult<IsometryOp> {
    let layout = RegisterLayout::new(regs)?;
    let dims: Vec<usize> = layout.registers().iter().map(|r| r.dim).collect();
    let total = layout.total_dim();
    let mut phases = Vec::with_capacity(total);
    for idx in 0..total {
        phases.push(phase(&decode_mixed_radix(idx, &dims)));
    }
    IsometryOp::permutation(layout.clone(), layout, (0..total).collect(), phases)
}

/// Block-diagonal controlled gate: for each control configuration c the
/// target block is `u(c)` (square, target dimension). Register order is
/// [controls..., target].
pub fn controlled_gate(
    regs: Vec<Register>,
    u: impl Fn(&[usize]) -> CMatrix,
) -> QResult<IsometryOp> {
    let layout = RegisterLayout::new(regs)?;
    let n = layout.len();
    let target_dim = layout.registers()[n - 1].dim;
    let ctrl_dims: Vec<usize> = layout.registers()[..n - 1].iter().map(|r| r.dim).collect();
    let ctrl_total = ctrl_dims.iter().product::<usize>().max(1);
    let total = layout.total_dim();
    let mut m = CMatrix::zeros(total, total);
    for c in 0..ctrl_total {
        let digits = decode_mixed_radix(c, &ctrl_dims);
        let block = u(&digits);
        if block.nrows() != target_dim || block.ncols() != target_dim {
            return Err(QError::DimensionMismatch(
                "controlled block has wrong dimension".into(),
            ));
        }
        for i in 0..target_dim {
            for j in 0..target_dim {
                m[(c * target_dim + i, c * target_dim + j)] = block[(i, j)];
            }
        }
    }
    IsometryOp::from_matrix(layout.clone(), layout, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_indices() {
        // Φ⁻ has a relative minus sign.
        let s = bell_pair("l", Holder::Alice, "r", Holder::Bob, 2).unwrap();
        assert!((s.amps[0].re - SQRT_HALF).abs() < 1e-12);
        assert!((s.amps[3].re + SQRT_HALF).abs() < 1e-12);
    }

    #[test]
    fn bell_rotation_maps_bells_to_basis() {
        let rot = bell_to_computational();
        for idx in 0..4 {
            let s = bell_pair("l", Holder::Alice, "r", Holder::Bob, idx).unwrap();
            let mut out = vec![C_ZERO; 4];
            for i in 0..4 {
                for j in 0..4 {
                    out[i] += rot[(i, j)] * s.amps[j];
                }
            }
            let a = (idx >> 1) & 1;
            let b = idx & 1;
            assert!((out[a * 2 + b].norm() - 1.0).abs() < 1e-12, "idx {idx}");
        }
    }

    #[test]
    fn xor_gate_computes_and() {
        // |x, y, t⟩ → |x, y, t ⊕ (x ∧ y)⟩
        let g = xor_function_gate(
            vec![
                Register::qubit("x", Holder::Alice),
                Register::qubit("y", Holder::Alice),
                Register::qubit("t", Holder::Alice),
            ],
            |c| c[0] & c[1],
        )
        .unwrap();
        let m = g.dense();
        // input |110⟩ = index 6 maps to |111⟩ = index 7
        assert!((m[(7, 6)].re - 1.0).abs() < 1e-12);
        // input |100⟩ = index 4 stays
        assert!((m[(4, 4)].re - 1.0).abs() < 1e-12);
    }
}
