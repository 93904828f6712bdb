//! Teleportation and nonlocal two-qubit gates from one shared EPR pair, with
//! all Pauli corrections applied coherently off the exchanged outcome
//! registers.

use crate::engine::{
    ErrorBound, LocalCircuit, NLQCProtocol, ReductionRecord, RoundAction, Step,
};
use crate::error::QResult;
use crate::linalg::CMatrix;
use crate::qcore::{self, Holder, IsometryOp, Register, RegisterLayout};
use crate::tasks::{DecoderBundle, RegChannel, TargetPlacement, TaskInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlocalGate {
    Cz,
    Cnot,
}

/// One-round nonlocal CZ (or CNOT) across the cut: one EPR pair, one
/// classical bit each way, phase corrections in round two. Exact.
///
/// Registers: `at` (Alice's qubit), `bt` (Bob's qubit); resource `e_a`/`e_b`.
/// Alice's message is `e_a` (her CNOT copy, a uniform bit), Bob's is `e_b`
/// (his X-basis readout).
pub fn nonlocal_gate_via_epr(gate: NonlocalGate) -> QResult<NLQCProtocol> {
    let resource = qcore::bell_pair("e_a", Holder::Alice, "e_b", Holder::Bob, 0)?;
    let cnot = qcore::two_qubit_op("c", "t", Holder::Alice, &qcore::cnot());
    let cz = qcore::two_qubit_op("c", "t", Holder::Alice, &qcore::cz());
    let h = qcore::one_qubit_op("q", Holder::Alice, &qcore::hadamard());

    let alice_r1 = LocalCircuit::new(vec![
        // copy at into the EPR half, computational basis
        Step::Apply {
            op: cnot.clone(),
            targets: vec!["at".into(), "e_a".into()],
            out_ids: vec!["at".into(), "e_a".into()],
        },
    ]);
    let mut bob_steps = Vec::new();
    if gate == NonlocalGate::Cnot {
        bob_steps.push(Step::Apply {
            op: h.clone(),
            targets: vec!["bt".into()],
            out_ids: vec!["bt".into()],
        });
    }
    bob_steps.push(Step::Apply {
        op: cz.clone(),
        targets: vec!["e_b".into(), "bt".into()],
        out_ids: vec!["e_b".into(), "bt".into()],
    });
    bob_steps.push(Step::Apply {
        op: h.clone(),
        targets: vec!["e_b".into()],
        out_ids: vec!["e_b".into()],
    });
    let bob_r1 = LocalCircuit::new(bob_steps);

    let alice_r2 = LocalCircuit::new(vec![
        // phase fix (−1)^{at·m2}, controlled on the received bit
        Step::Apply {
            op: cz.clone(),
            targets: vec!["e_b".into(), "at".into()],
            out_ids: vec!["e_b".into(), "at".into()],
        },
    ]);
    let mut bob_r2_steps = vec![Step::Apply {
        op: cz.clone(),
        targets: vec!["e_a".into(), "bt".into()],
        out_ids: vec!["e_a".into(), "bt".into()],
    }];
    if gate == NonlocalGate::Cnot {
        bob_r2_steps.push(Step::Apply {
            op: h,
            targets: vec!["bt".into()],
            out_ids: vec!["bt".into()],
        });
    }
    let bob_r2 = LocalCircuit::new(bob_r2_steps);

    let u = match gate {
        NonlocalGate::Cz => qcore::cz(),
        NonlocalGate::Cnot => qcore::cnot(),
    };
    let f_const1 = crate::boolfn::TruthTable::from_fn(0, 0, |_, _| true)?;
    Ok(NLQCProtocol {
        alice_bits: 0,
        bob_bits: 0,
        mixture_arms: 1,
        resource,
        inputs: vec![
            Register::qubit("at", Holder::Alice),
            Register::qubit("bt", Holder::Bob),
        ],
        outputs: vec!["at".into(), "bt".into()],
        alice_r1: RoundAction::single(alice_r1).with_send(&["e_a"]),
        bob_r1: RoundAction::single(bob_r1).with_send(&["e_b"]),
        alice_r2: RoundAction::single(alice_r2).with_discard(&["e_b"]),
        bob_r2: RoundAction::single(bob_r2).with_discard(&["e_a"]),
        task: TaskInstance::CfUnitary {
            f: f_const1,
            u,
            placement: TargetPlacement::Both,
        },
        provenance: vec![ReductionRecord::new(
            "nonlocal_gate_via_epr",
            0,
            2,
            ErrorBound::Exact,
            false,
        )],
        epr_pairs: Some(1),
    })
}

/// Standard teleportation as a routing protocol for the constant-1 function:
/// Alice's qubit `q` always ends up with Bob, Pauli-corrected into the EPR
/// half `e_b`. The decoder is the identity on `e_b`.
pub fn teleport_protocol() -> QResult<(NLQCProtocol, DecoderBundle)> {
    let resource = qcore::bell_pair("e_a", Holder::Alice, "e_b", Holder::Bob, 0)?;
    let rot = qcore::two_qubit_op("c", "t", Holder::Alice, &qcore::bell_to_computational());
    let alice_r1 = LocalCircuit::new(vec![Step::Apply {
        op: rot,
        targets: vec!["q".into(), "e_a".into()],
        out_ids: vec!["q".into(), "e_a".into()],
    }]);
    // correction Z^a X^m on e_b, controls (q = a, e_a = m)
    let correction = qcore::controlled_gate(
        vec![
            Register::qubit("a", Holder::Bob),
            Register::qubit("m", Holder::Bob),
            Register::qubit("t", Holder::Bob),
        ],
        |c| {
            let mut m = CMatrix::identity(2, 2);
            if c[1] == 1 {
                m = qcore::pauli_x() * m;
            }
            if c[0] == 1 {
                m = qcore::pauli_z() * m;
            }
            m
        },
    )?;
    let bob_r2 = LocalCircuit::new(vec![Step::Apply {
        op: correction,
        targets: vec!["q".into(), "e_a".into(), "e_b".into()],
        out_ids: vec!["q".into(), "e_a".into(), "e_b".into()],
    }]);
    let f = crate::boolfn::builtin("const1")?;
    let p = NLQCProtocol {
        alice_bits: 1,
        bob_bits: 1,
        mixture_arms: 1,
        resource,
        inputs: vec![Register::qubit("q", Holder::Alice)],
        outputs: vec!["e_b".into()],
        alice_r1: RoundAction {
            selector: crate::engine::Selector::by_own(),
            branches: vec![alice_r1.clone(), alice_r1],
            send: vec!["q".into(), "e_a".into()],
            to_referee: vec![],
            discard: vec![],
        },
        bob_r1: RoundAction {
            selector: crate::engine::Selector::by_own(),
            branches: vec![LocalCircuit::empty(), LocalCircuit::empty()],
            send: vec![],
            to_referee: vec![],
            discard: vec![],
        },
        alice_r2: RoundAction::noop(),
        bob_r2: RoundAction {
            selector: crate::engine::Selector::by_pair(),
            branches: vec![bob_r2.clone(), bob_r2.clone(), bob_r2.clone(), bob_r2],
            send: vec![],
            to_referee: vec![],
            discard: vec!["q".into(), "e_a".into()],
        },
        task: TaskInstance::FRoute { f: f.clone(), d_q: 2 },
        provenance: vec![ReductionRecord::new("teleport", 0, 2, ErrorBound::Exact, false)],
        epr_pairs: Some(1),
    };
    let mut dec = DecoderBundle::default();
    for (x, y, _) in f.inputs() {
        dec.route_bob.insert((x, y), identity_decoder("e_b", "qd", 2));
    }
    Ok((p, dec))
}

/// Identity recovery channel: relabels a register as the decoded output.
pub fn identity_decoder(target: &str, out: &str, dim: usize) -> RegChannel {
    let in_l = RegisterLayout::new(vec![Register::new(target, dim, Holder::Alice)]).unwrap();
    let out_l = RegisterLayout::new(vec![Register::new(out, dim, Holder::Alice)]).unwrap();
    let op = IsometryOp::from_matrix(in_l, out_l, crate::linalg::identity(dim)).unwrap();
    RegChannel {
        targets: vec![target.into()],
        ch: crate::qcore::ChannelOp::unitary(op),
    }
}
