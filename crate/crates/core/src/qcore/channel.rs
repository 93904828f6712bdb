use std::collections::BTreeSet;

use crate::error::{QError, QResult};
use crate::linalg::{self, CMatrix};
use crate::qcore::layout::{Holder, Register, RegisterLayout};
use crate::qcore::ops::{self, IsometryOp};
use crate::qcore::state::{DensityOperator, PureState};
use crate::TOL;

/// Completely positive trace-preserving map in Stinespring form: an isometry
/// followed by discarding a set of output registers.
#[derive(Debug, Clone)]
pub struct ChannelOp {
    pub stinespring: IsometryOp,
    pub discarded: BTreeSet<String>,
}

impl ChannelOp {
    pub fn new(stinespring: IsometryOp, discarded: impl IntoIterator<Item = String>) -> QResult<Self> {
        let discarded: BTreeSet<String> = discarded.into_iter().collect();
        for id in &discarded {
            if !stinespring.out_layout.has(id) {
                return Err(QError::UnknownRegister(id.clone()));
            }
        }
        Ok(ChannelOp { stinespring, discarded })
    }

    /// Channel that applies a square unitary and discards nothing.
    pub fn unitary(op: IsometryOp) -> Self {
        ChannelOp { stinespring: op, discarded: BTreeSet::new() }
    }

    /// Identity channel on the given layout.
    pub fn identity(layout: RegisterLayout) -> Self {
        let d = layout.total_dim();
        let op = IsometryOp::from_matrix(layout.clone(), layout, CMatrix::identity(d, d))
            .expect("identity is an isometry");
        ChannelOp::unitary(op)
    }

    pub fn in_dim(&self) -> usize {
        self.stinespring.in_dim()
    }

    pub fn out_dim(&self) -> usize {
        let kept: usize = self
            .stinespring
            .out_layout
            .registers()
            .iter()
            .filter(|r| !self.discarded.contains(&r.id))
            .map(|r| r.dim)
            .product();
        kept
    }

    pub fn kept_ids(&self) -> Vec<String> {
        self.stinespring
            .out_layout
            .registers()
            .iter()
            .filter(|r| !self.discarded.contains(&r.id))
            .map(|r| r.id.clone())
            .collect()
    }
}

/// Applies a channel to the named target registers of a density operator.
/// The channel's input layout is matched positionally against `targets`.
pub fn apply_channel(
    rho: &DensityOperator,
    ch: &ChannelOp,
    targets: &[String],
) -> QResult<DensityOperator> {
    // Work on a purification-free dense path: embed the Stinespring isometry,
    // conjugate, then trace the discarded registers.
    let (v_full, out_layout) = embed_isometry(&rho.layout, targets, &ch.stinespring)?;
    let big = &v_full * &rho.matrix * v_full.adjoint();
    let big = DensityOperator::new_unchecked(out_layout, big);
    let keep: Vec<String> = big
        .layout
        .ids()
        .into_iter()
        .filter(|id| !ch.discarded.contains(id))
        .collect();
    ops::partial_trace(&big, &keep)
}

/// Embeds an isometry acting on `targets` into the full space of `layout`,
/// returning the full matrix and the resulting layout. Dense; intended for
/// the small dimensions seen by verifiers and decoders.
pub fn embed_isometry(
    layout: &RegisterLayout,
    targets: &[String],
    op: &IsometryOp,
) -> QResult<(CMatrix, RegisterLayout)> {
    // Reuse the pure-state splicing logic by applying the op to each basis
    // state. Dimensions here are verifier-scale, so the dense construction is
    // fine.
    let total = layout.total_dim();
    let d_out_total = total / op.in_dim() * op.out_dim();
    let mut full = CMatrix::zeros(d_out_total, total);
    let mut out_layout = None;
    for j in 0..total {
        let basis = PureState::basis(layout.clone(), j)?;
        let image = ops::apply_on_registers(&basis, op, targets, None, usize::MAX)?;
        for (i, a) in image.amps.iter().enumerate() {
            full[(i, j)] = *a;
        }
        if out_layout.is_none() {
            out_layout = Some(image.layout);
        }
    }
    Ok((full, out_layout.unwrap()))
}

/// Choi state of a channel, maximally-entangled-input normalization
/// (trace 1). The reference register comes first in the index order.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub d_in: usize,
    pub d_out: usize,
    pub matrix: CMatrix,
}

impl ChoiMatrix {
    /// Checks positivity and the partial-trace-over-output marginal.
    pub fn validate(&self) -> QResult<()> {
        let (vals, _) = linalg::eigh(&self.matrix);
        if vals.first().map(|&v| v < -TOL).unwrap_or(false) {
            return Err(QError::InvalidDensity(format!(
                "Choi matrix has negative eigenvalue {:.3e}",
                vals[0]
            )));
        }
        // tr_out J = I/d_in
        let mut marg = CMatrix::zeros(self.d_in, self.d_in);
        for i in 0..self.d_in {
            for j in 0..self.d_in {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for o in 0..self.d_out {
                    acc += self.matrix[(i * self.d_out + o, j * self.d_out + o)];
                }
                marg[(i, j)] = acc;
            }
        }
        let want = CMatrix::identity(self.d_in, self.d_in).scale(1.0 / self.d_in as f64);
        let dev = linalg::max_abs_diff(&marg, &want);
        if dev > TOL {
            return Err(QError::InvalidDensity(format!(
                "Choi marginal deviates from I/d by {dev:.3e}"
            )));
        }
        Ok(())
    }
}

/// Choi state obtained by acting with the channel on half of a maximally
/// entangled state.
pub fn choi_of_channel(ch: &ChannelOp) -> QResult<ChoiMatrix> {
    let d_in = ch.in_dim();
    let ref_reg = Register::new("__choi_ref", d_in, Holder::Referee);
    let in_regs = ch.stinespring.in_layout.registers().to_vec();
    let mut regs = vec![ref_reg];
    regs.extend(in_regs.iter().cloned());
    let layout = RegisterLayout::new(regs)?;
    let w = crate::linalg::cf(1.0 / (d_in as f64).sqrt());
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); d_in * d_in];
    for k in 0..d_in {
        amps[k * d_in + k] = w;
    }
    let psi = PureState::new(layout, amps)?;
    let targets: Vec<String> = in_regs.iter().map(|r| r.id.clone()).collect();
    let out = ops::apply_on_registers(&psi, &ch.stinespring, &targets, None, usize::MAX)?;
    let mut keep = vec!["__choi_ref".to_string()];
    keep.extend(ch.kept_ids());
    let rho = ops::partial_trace_pure(&out, &keep)?;
    Ok(ChoiMatrix {
        d_in,
        d_out: ch.out_dim(),
        matrix: rho.matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cf;
    use crate::qcore::gates;
    use crate::qcore::metrics::DistanceBounds;

    fn qubit_layout(id: &str) -> RegisterLayout {
        RegisterLayout::new(vec![Register::qubit(id, Holder::Alice)]).unwrap()
    }

    fn identity_channel() -> ChannelOp {
        ChannelOp::identity(qubit_layout("q"))
    }

    fn z_channel() -> ChannelOp {
        ChannelOp::unitary(gates::one_qubit_op("q", Holder::Alice, &gates::pauli_z()))
    }

    /// Stinespring dilation of the depolarizing channel at probability p.
    fn depolarizing_channel(p: f64) -> ChannelOp {
        // V|ψ⟩ = √(1-3p/4)|ψ⟩|0⟩ + √(p/4)(X|ψ⟩|1⟩ + Y|ψ⟩|2⟩ + Z|ψ⟩|3⟩)
        let in_layout = qubit_layout("q");
        let out_layout = RegisterLayout::new(vec![
            Register::qubit("q", Holder::Alice),
            Register::new("env", 4, Holder::Env),
        ])
        .unwrap();
        let kraus = [
            (gates::identity2(), (1.0 - 0.75 * p).sqrt()),
            (gates::pauli_x(), (p / 4.0).sqrt()),
            (gates::pauli_y(), (p / 4.0).sqrt()),
            (gates::pauli_z(), (p / 4.0).sqrt()),
        ];
        let mut v = CMatrix::zeros(8, 2);
        for (k, (m, w)) in kraus.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    v[(i * 4 + k, j)] = cf(*w) * m[(i, j)];
                }
            }
        }
        let iso = IsometryOp::from_matrix(in_layout, out_layout, v).unwrap();
        ChannelOp::new(iso, ["env".to_string()]).unwrap()
    }

    #[test]
    fn choi_of_identity_is_max_entangled_projector() {
        let j = choi_of_channel(&identity_channel()).unwrap();
        j.validate().unwrap();
        let phi = gates::maximally_entangled("r", Holder::Referee, "q", Holder::Alice, 2).unwrap();
        let want = phi.to_density();
        assert!(linalg::max_abs_diff(&j.matrix, &want.matrix) < 1e-12);
    }

    #[test]
    fn choi_of_full_depolarizing_is_maximally_mixed() {
        let j = choi_of_channel(&depolarizing_channel(1.0)).unwrap();
        j.validate().unwrap();
        let want = CMatrix::identity(4, 4).scale(0.25);
        assert!(linalg::max_abs_diff(&j.matrix, &want) < 1e-10);
    }

    #[test]
    fn choi_of_z_conjugation_matches_direct_computation() {
        let j = choi_of_channel(&z_channel()).unwrap();
        let phi = gates::maximally_entangled("r", Holder::Referee, "q", Holder::Alice, 2).unwrap();
        let z_on_half = gates::one_qubit_op("q", Holder::Alice, &gates::pauli_z());
        let rotated = ops::apply_on_registers(&phi, &z_on_half, &["q".into()], None, usize::MAX).unwrap();
        let want = rotated.to_density();
        assert!(linalg::max_abs_diff(&j.matrix, &want.matrix) < 1e-12);
    }

    #[test]
    fn identity_vs_identity_bounds() {
        let b = crate::qcore::metrics::channel_distance_bounds(&identity_channel(), &identity_channel())
            .unwrap();
        assert!(b.exact_zero);
        assert!(b.lower < 1e-12 && b.upper < 1e-12);
    }

    #[test]
    fn identity_vs_z_bounds() {
        // Orthogonal Choi states: lower 2, upper 4.
        let b = crate::qcore::metrics::channel_distance_bounds(&identity_channel(), &z_channel()).unwrap();
        assert!(!b.exact_zero);
        assert!((b.lower - 2.0).abs() < 1e-10);
        assert!((b.upper - 4.0).abs() < 1e-10);
    }

    #[test]
    fn depolarizing_lower_bound_increases_with_p() {
        let id = identity_channel();
        let mut prev = -1.0;
        for p in [0.1, 0.2, 0.5] {
            let b =
                crate::qcore::metrics::channel_distance_bounds(&id, &depolarizing_channel(p)).unwrap();
            assert!(b.lower > prev, "lower bound must increase with p");
            assert!(b.lower <= b.upper + 1e-12);
            prev = b.lower;
        }
    }

    #[test]
    fn depolarizing_dilation_acts_correctly_on_zero() {
        // Tracing Env from the p=1 dilation applied to |0⟩ gives I/2
        // (direct Kraus-sum oracle).
        let ch = depolarizing_channel(1.0);
        let rho = PureState::basis(qubit_layout("q"), 0).unwrap().to_density();
        let out = apply_channel(&rho, &ch, &["q".into()]).unwrap();
        let want = CMatrix::identity(2, 2).scale(0.5);
        assert!(linalg::max_abs_diff(&out.matrix, &want) < 1e-10);
    }

    #[test]
    fn bounds_ordering_and_zero_certificate() {
        let b = DistanceBounds::from_chois(
            &CMatrix::identity(4, 4).scale(0.25),
            &CMatrix::identity(4, 4).scale(0.25),
            2,
        )
        .unwrap();
        assert!(b.exact_zero && b.lower <= 1e-8);
    }
}
