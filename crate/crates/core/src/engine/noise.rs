use serde::{Deserialize, Serialize};

use crate::engine::NLQCProtocol;
use crate::error::{QError, QResult};
use crate::linalg::CMatrix;
use crate::qcore::{self, DensityOperator, Holder};

/// Resource bookkeeping for a protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceAccount {
    /// log₂ of the dimension Alice holds in the resource state.
    pub alice_qubits: f64,
    pub bob_qubits: f64,
    /// Designated EPR-pair count; None when the resource is a composite
    /// state that was not assembled from EPR factors.
    pub epr_pairs: Option<usize>,
    /// Schmidt rank across the Alice | rest cut.
    pub schmidt_rank: usize,
}

/// Counts resource qubits per side and the Schmidt rank of the resource
/// state across Alice's cut.
pub fn count_resources(p: &NLQCProtocol) -> QResult<ResourceAccount> {
    let mut a_dim = 1usize;
    let mut b_dim = 1usize;
    for r in p.resource.layout.registers() {
        match r.holder {
            Holder::Alice => a_dim *= r.dim,
            Holder::Bob => b_dim *= r.dim,
            _ => {}
        }
    }
    let schmidt = if p.resource.layout.is_empty() {
        1
    } else {
        qcore::schmidt_decomposition(
            &p.resource,
            &[Holder::Alice],
            &[Holder::Bob, Holder::Env, Holder::Referee],
        )?
        .rank
    };
    Ok(ResourceAccount {
        alice_qubits: (a_dim as f64).log2(),
        bob_qubits: (b_dim as f64).log2(),
        epr_pairs: p.epr_pairs,
        schmidt_rank: schmidt,
    })
}

/// Replaces the resource by its globally depolarized version
/// ρ → (1−prob)·ρ + prob·I/D, purified into a fresh Env register so the
/// protocol keeps a pure resource.
pub fn inject_depolarizing(p: &NLQCProtocol, prob: f64) -> QResult<NLQCProtocol> {
    if p.resource.layout.is_empty() {
        return Err(QError::Protocol(
            "cannot depolarize an empty resource".into(),
        ));
    }
    if !(0.0..=1.0).contains(&prob) {
        return Err(QError::InvalidArgument(format!(
            "depolarizing probability {prob} outside [0,1]"
        )));
    }
    let d = p.resource.dim();
    let pure = p.resource.to_density();
    let mixed = CMatrix::identity(d, d).scale(prob / d as f64) + pure.matrix.scale(1.0 - prob);
    let rho = DensityOperator::new_unchecked(p.resource.layout.clone(), mixed);
    let mut env_id = "noise_env".to_string();
    let mut k = 1;
    while rho.layout.has(&env_id) {
        k += 1;
        env_id = format!("noise_env{k}");
    }
    let purified = rho.purify(&env_id)?;
    let mut out = p.clone();
    out.resource = purified;
    if prob > 0.0 {
        out.epr_pairs = None;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{ExecConfig, RoundAction};
    use crate::qcore::{PureState, Register, RegisterLayout};
    use crate::tasks::TaskInstance;

    fn trivial_protocol_with_resource(resource: PureState) -> NLQCProtocol {
        NLQCProtocol {
            alice_bits: 0,
            bob_bits: 0,
            mixture_arms: 1,
            resource,
            inputs: vec![],
            outputs: vec![],
            alice_r1: RoundAction::noop(),
            bob_r1: RoundAction::noop(),
            alice_r2: RoundAction::noop(),
            bob_r2: RoundAction::noop(),
            task: TaskInstance::Opaque("test".into()),
            provenance: vec![],
            epr_pairs: Some(1),
        }
    }

    #[test]
    fn count_single_epr_pair() {
        let epr = qcore::bell_pair("l", Holder::Alice, "r", Holder::Bob, 0).unwrap();
        let p = trivial_protocol_with_resource(epr);
        let acc = count_resources(&p).unwrap();
        assert_eq!(acc.alice_qubits, 1.0);
        assert_eq!(acc.bob_qubits, 1.0);
        assert_eq!(acc.epr_pairs, Some(1));
        assert_eq!(acc.schmidt_rank, 2);
    }

    #[test]
    fn count_two_epr_pairs() {
        let p1 = qcore::bell_pair("l1", Holder::Alice, "r1", Holder::Bob, 0).unwrap();
        let p2 = qcore::bell_pair("l2", Holder::Alice, "r2", Holder::Bob, 0).unwrap();
        let mut p = trivial_protocol_with_resource(p1.tensor(&p2).unwrap());
        p.epr_pairs = Some(2);
        let acc = count_resources(&p).unwrap();
        assert_eq!(acc.alice_qubits, 2.0);
        assert_eq!(acc.schmidt_rank, 4);
    }

    #[test]
    fn depolarized_resource_is_purified() {
        let epr = qcore::bell_pair("l", Holder::Alice, "r", Holder::Bob, 0).unwrap();
        let p = trivial_protocol_with_resource(epr);
        let noisy = inject_depolarizing(&p, 0.3).unwrap();
        assert!((noisy.resource.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(noisy.resource.layout.has("noise_env"));
        assert_eq!(noisy.epr_pairs, None);
        // Tracing the env register reproduces the depolarized state.
        let rho = qcore::partial_trace_pure(&noisy.resource, &["l".into(), "r".into()]).unwrap();
        let want = {
            let pure = p.resource.to_density();
            CMatrix::identity(4, 4).scale(0.3 / 4.0) + pure.matrix.scale(0.7)
        };
        assert!(crate::linalg::max_abs_diff(&rho.matrix, &want) < 1e-9);
    }

    #[test]
    fn zero_noise_keeps_behavior() {
        let epr = qcore::bell_pair("l", Holder::Alice, "r", Holder::Bob, 0).unwrap();
        let p = trivial_protocol_with_resource(epr);
        let same = inject_depolarizing(&p, 0.0).unwrap();
        assert_eq!(same.epr_pairs, Some(1));
        let out = crate::engine::execute(&same, 0, 0, None, &ExecConfig::default()).unwrap();
        // final state keeps nothing (no outputs, no referee regs): scalar
        assert_eq!(out.final_state.dim(), 1);
    }

    #[test]
    fn empty_resource_cannot_be_depolarized() {
        let p = trivial_protocol_with_resource(PureState::scalar());
        assert!(inject_depolarizing(&p, 0.1).is_err());
    }

    #[test]
    fn account_layout_of_composite_state() {
        // A 3-qubits-per-side state with no EPR metadata reports composite.
        let layout = RegisterLayout::new(vec![
            Register::new("l", 8, Holder::Alice),
            Register::new("r", 8, Holder::Bob),
        ])
        .unwrap();
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 64];
        let mut norm = 0.0;
        for j in 0..8 {
            let w = 1.0 / ((j + 1) as f64).sqrt();
            amps[j * 8 + j] = crate::linalg::cf(w);
            norm += w * w;
        }
        for a in &mut amps {
            *a /= crate::linalg::cf(norm.sqrt());
        }
        let mut p = trivial_protocol_with_resource(PureState::new(layout, amps).unwrap());
        p.epr_pairs = None;
        let acc = count_resources(&p).unwrap();
        assert_eq!(acc.alice_qubits, 3.0);
        assert_eq!(acc.bob_qubits, 3.0);
        assert_eq!(acc.epr_pairs, None);
        assert_eq!(acc.schmidt_rank, 8);
    }
}
