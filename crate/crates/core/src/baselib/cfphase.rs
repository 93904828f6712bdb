//! Universal coherent-phase protocol: factor f into an XOR of ANDs over
//! GF(2), then apply one nonlocal CZ gadget per AND term on locally computed
//! ancilla bits. Exact, with exactly rank(f) EPR pairs.

use crate::boolfn::{gf2_rank_decompose, TruthTable};
use crate::engine::{ErrorBound, LocalCircuit, NLQCProtocol, ReductionRecord, RoundAction, Step};
use crate::error::QResult;
use crate::qcore::{self, Holder, PureState, Register};
use crate::tasks::TaskInstance;

pub fn universal_cfphase(f: &TruthTable) -> QResult<NLQCProtocol> {
    let dec = gf2_rank_decompose(f);
    let m = dec.m;
    let a_dim = 1usize << f.n_x;
    let b_dim = 1usize << f.n_y;

    let mut resource = PureState::scalar();
    let mut alice_r1 = Vec::new();
    let mut bob_r1 = Vec::new();
    let mut alice_r2 = Vec::new();
    let mut bob_r2 = Vec::new();
    let mut alice_send = Vec::new();
    let mut bob_send = Vec::new();
    let mut alice_discard = Vec::new();
    let mut bob_discard = Vec::new();

    let cnot = qcore::two_qubit_op("c", "t", Holder::Alice, &qcore::cnot());
    let cz = qcore::two_qubit_op("c", "t", Holder::Alice, &qcore::cz());
    let h = qcore::one_qubit_op("q", Holder::Alice, &qcore::hadamard());

    for i in 0..m {
        let ea = format!("e{i}a");
        let eb = format!("e{i}b");
        let ha = format!("h{i}a");
        let hb = format!("h{i}b");
        resource = resource.tensor(&qcore::bell_pair(&ea, Holder::Alice, &eb, Holder::Bob, 0)?)?;

        // h_i(x) into a fresh ancilla, then copy into the EPR half.
        let ha_reg = Register::qubit(&ha, Holder::Alice);
        let compute_a = qcore::xor_function_gate(
            vec![Register::new("a", a_dim, Holder::Alice), ha_reg.clone()],
            {
                let hv = dec.h[i];
                move |c| ((hv >> c[0]) & 1) as usize
            },
        )?;
        alice_r1.push(Step::apply(
            qcore::IsometryOp::prepare_basis(
                qcore::RegisterLayout::new(vec![ha_reg.clone()])?,
                0,
            )?,
            &[],
            &[&ha],
        ));
        alice_r1.push(Step::gate(compute_a.clone(), &["a", &ha]));
        alice_r1.push(Step::gate(cnot.clone(), &[&ha, &ea]));
        alice_send.push(ea.clone());

        // h'_i(y) ancilla; CZ against the EPR half; X-basis readout.
        let hb_reg = Register::qubit(&hb, Holder::Bob);
        let compute_b = qcore::xor_function_gate(
            vec![Register::new("b", b_dim, Holder::Bob), hb_reg.clone()],
            {
                let hv = dec.h_prime[i];
                move |c| ((hv >> c[0]) & 1) as usize
            },
        )?;
        bob_r1.push(Step::apply(
            qcore::IsometryOp::prepare_basis(qcore::RegisterLayout::new(vec![hb_reg])?, 0)?,
            &[],
            &[&hb],
        ));
        bob_r1.push(Step::gate(compute_b.clone(), &["b", &hb]));
        bob_r1.push(Step::gate(cz.clone(), &[&eb, &hb]));
        bob_r1.push(Step::gate(h.clone(), &[&eb]));
        bob_send.push(eb.clone());

        // Corrections, then uncompute and drop the ancillas.
        alice_r2.push(Step::gate(cz.clone(), &[&eb, &ha]));
        alice_r2.push(Step::gate(compute_a, &["a", &ha]));
        alice_r2.push(Step::drop_zero(&ha));
        alice_discard.push(eb.clone());

        bob_r2.push(Step::gate(cz.clone(), &[&ea, &hb]));
        bob_r2.push(Step::gate(compute_b, &["b", &hb]));
        bob_r2.push(Step::drop_zero(&hb));
        bob_discard.push(ea.clone());
    }

    Ok(NLQCProtocol {
        alice_bits: 0,
        bob_bits: 0,
        mixture_arms: 1,
        resource,
        inputs: vec![
            Register::new("a", a_dim, Holder::Alice),
            Register::new("b", b_dim, Holder::Bob),
        ],
        outputs: vec!["a".into(), "b".into()],
        alice_r1: RoundAction {
            selector: crate::engine::Selector::fixed(),
            branches: vec![LocalCircuit::new(alice_r1)],
            send: alice_send,
            to_referee: vec![],
            discard: vec![],
        },
        bob_r1: RoundAction {
            selector: crate::engine::Selector::fixed(),
            branches: vec![LocalCircuit::new(bob_r1)],
            send: bob_send,
            to_referee: vec![],
            discard: vec![],
        },
        alice_r2: RoundAction {
            selector: crate::engine::Selector::fixed(),
            branches: vec![LocalCircuit::new(alice_r2)],
            send: vec![],
            to_referee: vec![],
            discard: alice_discard,
        },
        bob_r2: RoundAction {
            selector: crate::engine::Selector::fixed(),
            branches: vec![LocalCircuit::new(bob_r2)],
            send: vec![],
            to_referee: vec![],
            discard: bob_discard,
        },
        task: TaskInstance::CfPhase { f: f.clone() },
        provenance: vec![ReductionRecord::new(
            "universal_cfphase",
            0,
            2 * m as u32,
            ErrorBound::Exact,
            false,
        )],
        epr_pairs: Some(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::builtin;
    use crate::tasks::{verify_cf_unitary, BoundKind, VerifyOpts};

    #[test]
    fn and_function_uses_one_pair_and_is_exact() {
        let p = universal_cfphase(&builtin("and").unwrap()).unwrap();
        assert_eq!(p.epr_pairs, Some(1));
        let r = verify_cf_unitary(&p, &VerifyOpts::default()).unwrap();
        assert!(r.epsilon <= 1e-9, "eps {}", r.epsilon);
        assert_eq!(r.bound_kind, BoundKind::ChoiExact);
    }

    #[test]
    fn xor_function_uses_two_pairs_and_is_exact() {
        let p = universal_cfphase(&builtin("xor").unwrap()).unwrap();
        assert_eq!(p.epr_pairs, Some(2));
        let r = verify_cf_unitary(&p, &VerifyOpts::default()).unwrap();
        assert!(r.epsilon <= 1e-9, "eps {}", r.epsilon);
    }

    #[test]
    fn constant_zero_is_the_empty_protocol() {
        let p = universal_cfphase(&builtin("const0").unwrap()).unwrap();
        assert_eq!(p.epr_pairs, Some(0));
        assert_eq!(p.resource.dim(), 1);
        let r = verify_cf_unitary(&p, &VerifyOpts::default()).unwrap();
        assert!(r.epsilon <= 1e-9);
    }

    #[test]
    fn all_sixteen_single_bit_functions_are_exact() {
        for (k, f) in crate::boolfn::all_n1_functions().iter().enumerate() {
            let p = universal_cfphase(f).unwrap();
            let r = verify_cf_unitary(&p, &VerifyOpts::default()).unwrap();
            assert!(r.epsilon <= 1e-9, "function {k}: eps {}", r.epsilon);
            assert_eq!(p.epr_pairs, Some(crate::boolfn::gf2_rank_decompose(f).m));
        }
    }

    #[test]
    fn random_two_bit_functions_are_exact() {
        use rand::Rng;
        for trial in 0..5u64 {
            let mut rng = crate::rng::stream(99, trial);
            let f = TruthTable::from_fn(2, 2, |_, _| rng.gen_bool(0.5)).unwrap();
            let p = universal_cfphase(&f).unwrap();
            let r = verify_cf_unitary(&p, &VerifyOpts::default()).unwrap();
            assert!(r.epsilon <= 1e-9, "trial {trial}: eps {}", r.epsilon);
        }
    }
}
