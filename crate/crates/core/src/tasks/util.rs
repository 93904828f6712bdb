//! Shared verifier plumbing.

use crate::engine::NLQCProtocol;
use crate::error::{QError, QResult};
use crate::linalg::CMatrix;
use crate::qcore::{self, DensityOperator, Holder, PureState};
use crate::tasks::RegChannel;

/// Tensor product of maximally entangled pairs, one per declared quantum
/// input register. Each register `id` is paired with a referee-held
/// reference `ref_<id>` placed immediately before it.
pub fn entangled_inputs(p: &NLQCProtocol) -> QResult<(PureState, Vec<String>)> {
    let mut state = PureState::scalar();
    let mut refs = Vec::new();
    for reg in &p.inputs {
        let ref_id = format!("ref_{}", reg.id);
        let pair = qcore::maximally_entangled(&ref_id, Holder::Referee, &reg.id, reg.holder, reg.dim)?;
        state = state.tensor(&pair)?;
        refs.push(ref_id);
    }
    Ok((state, refs))
}

/// Maximally entangled (trace-one) projector of local dimension d: the Choi
/// matrix of the identity channel.
pub fn identity_choi(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    let w = crate::linalg::cf(1.0 / d as f64);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = w;
        }
    }
    m
}

/// Applies a decoder channel to named registers and traces everything except
/// `keep` (in that order).
pub fn decode_and_keep(
    rho: &DensityOperator,
    rc: &RegChannel,
    keep: &[String],
) -> QResult<DensityOperator> {
    let out = qcore::apply_channel(rho, &rc.ch, &rc.targets)?;
    let reduced = qcore::partial_trace(&out, keep)?;
    qcore::reorder_density(&reduced, keep)
}

/// The registers a holder owns in a layout, in layout order.
pub fn held_by(rho: &DensityOperator, holder: Holder) -> Vec<String> {
    rho.layout.ids_held_by(holder)
}

/// Expectation value tr(Op·ρ) for an operator embedded on named registers.
pub fn expectation(rho: &DensityOperator, targets: &[String], op: &CMatrix) -> QResult<f64> {
    let full = qcore::embed_square_op(&rho.layout, targets, op)?;
    let prod = full * &rho.matrix;
    Ok(crate::linalg::trace(&prod).re)
}

pub fn missing_decoder(x: u64, y: u64) -> QError {
    QError::MissingDecoder { x, y }
}
