use crate::engine::{count_resources, execute, NLQCProtocol};
use crate::error::{QError, QResult};
use crate::qcore::{self, DistanceBounds, Holder};
use crate::tasks::util;
use crate::tasks::{BoundKind, DecoderBundle, TaskInstance, VerificationReport, VerifyOpts};

/// Routing verifier: for every (x, y) the recovering side's decoder composed
/// with the protocol channel on Q must be the identity channel. ε is the
/// worst sandwich upper bound over inputs; exact when every Choi pair
/// matches.
pub fn verify_froute(
    p: &NLQCProtocol,
    dec: &DecoderBundle,
    opts: &VerifyOpts,
) -> QResult<VerificationReport> {
    let (f, d_q) = match &p.task {
        TaskInstance::FRoute { f, d_q } => (f.clone(), *d_q),
        other => {
            return Err(QError::TaskMismatch {
                expected: "f_route".into(),
                found: other.name(),
            })
        }
    };
    let mut report = VerificationReport::new(p.task.name(), count_resources(p)?);
    let mut all_exact = true;
    let mut eps = 0.0f64;
    let mut eps_lower = 0.0f64;
    let target = util::identity_choi(d_q);
    for (x, y, routed) in f.inputs() {
        let (input, _) = util::entangled_inputs(p)?;
        let out = execute(p, x, y, Some(&input), &opts.exec())?;
        let (side, table) = if routed {
            (Holder::Bob, &dec.route_bob)
        } else {
            (Holder::Alice, &dec.route_alice)
        };
        let rc = table.get(&(x, y)).ok_or_else(|| util::missing_decoder(x, y))?;
        for t in &rc.targets {
            let reg = out.final_state.layout.register(t)?;
            if reg.holder != side {
                return Err(QError::HolderViolation(format!(
                    "route decoder for ({x},{y}) touches `{t}` held by {:?}",
                    reg.holder
                )));
            }
        }
        let kept = rc.ch.kept_ids();
        if kept.len() != 1 {
            return Err(QError::Protocol(
                "route decoder must keep exactly one output register".into(),
            ));
        }
        let keep = vec!["ref_q".to_string(), kept[0].clone()];
        let rho = util::decode_and_keep(&out.final_state, rc, &keep)?;
        if rho.dim() != d_q * d_q {
            return Err(QError::DimensionMismatch(format!(
                "decoded state has dimension {}, expected {}",
                rho.dim(),
                d_q * d_q
            )));
        }
        let bounds = DistanceBounds::from_chois(&rho.matrix, &target, d_q)?;
        report
            .per_input
            .insert(format!("x{x}_y{y}"), bounds.epsilon());
        all_exact &= bounds.exact_zero;
        eps = eps.max(bounds.epsilon());
        eps_lower = eps_lower.max(bounds.lower);
    }
    report.epsilon = eps;
    report.epsilon_lower = Some(eps_lower);
    report.bound_kind = if all_exact { BoundKind::ChoiExact } else { BoundKind::Sandwich };
    Ok(report)
}

/// Entanglement fidelity of recovering Q from the correct side, averaged the
/// way a random-routing baseline would be scored: used by the triviality
/// rows.
pub fn random_routing_success(d_q: usize) -> f64 {
    // Routing the qubit to the correct side at random succeeds with
    // probability 1/2 independent of d_q; kept here as a named constant
    // with its derivation in the acceptance suite.
    let _ = d_q;
    0.5
}
