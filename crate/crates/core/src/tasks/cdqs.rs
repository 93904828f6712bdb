use crate::engine::{count_resources, execute, NLQCProtocol};
use crate::error::{QError, QResult};
use crate::linalg::{kron, CMatrix};
use crate::qcore::{self, DistanceBounds, Holder};
use crate::tasks::util;
use crate::tasks::{BoundKind, DecoderBundle, TaskInstance, VerificationReport, VerifyOpts};

/// Conditional disclosure of a quantum secret.
///
/// ε: worst sandwich bound, over f = 1 inputs, of decoder ∘ referee-channel
/// against the identity on Q.
///
/// δ: worst sandwich bound, over f = 0 inputs, between the referee-marginal
/// channel and the constant channel emitting the protocol's own output on a
/// maximally mixed secret. This upper-bounds the definition's infimum over
/// simulators.
pub fn verify_cdqs(
    p: &NLQCProtocol,
    dec: &DecoderBundle,
    opts: &VerifyOpts,
) -> QResult<VerificationReport> {
    let (f, d_q) = match &p.task {
        TaskInstance::Cdqs { f, d_q } => (f.clone(), *d_q),
        other => {
            return Err(QError::TaskMismatch {
                expected: "cdqs".into(),
                found: other.name(),
            })
        }
    };
    let mut report = VerificationReport::new(p.task.name(), count_resources(p)?);
    let mut all_exact = true;
    let mut eps = 0.0f64;
    let mut eps_lower = 0.0f64;
    let mut delta = 0.0f64;
    let mut delta_lower = 0.0f64;
    let mut saw_zero = false;
    let target = util::identity_choi(d_q);
    for (x, y, fv) in f.inputs() {
        let (input, _) = util::entangled_inputs(p)?;
        let out = execute(p, x, y, Some(&input), &opts.exec())?;
        if fv {
            let rc = dec.referee.get(&(x, y)).ok_or_else(|| util::missing_decoder(x, y))?;
            let kept = rc.ch.kept_ids();
            if kept.len() != 1 {
                return Err(QError::Protocol(
                    "cdqs decoder must keep exactly one output register".into(),
                ));
            }
            let keep = vec!["ref_q".to_string(), kept[0].clone()];
            let rho = util::decode_and_keep(&out.final_state, rc, &keep)?;
            let bounds = DistanceBounds::from_chois(&rho.matrix, &target, d_q)?;
            report.per_input.insert(format!("x{x}_y{y}_correct"), bounds.epsilon());
            all_exact &= bounds.exact_zero;
            eps = eps.max(bounds.epsilon());
            eps_lower = eps_lower.max(bounds.lower);
        } else {
            saw_zero = true;
            // Referee view as a channel of the secret: state on
            // (ref_q, referee message registers).
            let mut keep = vec!["ref_q".to_string()];
            for id in util::held_by(&out.final_state, Holder::Referee) {
                if id != "ref_q" {
                    keep.push(id);
                }
            }
            let rho = qcore::partial_trace(&out.final_state, &keep)?;
            let rho = qcore::reorder_density(&rho, &keep)?;
            // Simulator: same marginal with the secret ignored.
            let sigma_m = qcore::partial_trace(&rho, &keep[1..])?;
            let j_sim = kron(
                &CMatrix::identity(d_q, d_q).scale(1.0 / d_q as f64),
                &sigma_m.matrix,
            );
            let bounds = DistanceBounds::from_chois(&rho.matrix, &j_sim, d_q)?;
            report.per_input.insert(format!("x{x}_y{y}_secure"), bounds.epsilon());
            delta = delta.max(bounds.epsilon());
            delta_lower = delta_lower.max(bounds.lower);
        }
    }
    report.epsilon = eps;
    report.epsilon_lower = Some(eps_lower);
    if saw_zero {
        report.delta = Some(delta);
        report.delta_lower = Some(delta_lower);
    }
    report.bound_kind = if all_exact { BoundKind::ChoiExact } else { BoundKind::Sandwich };
    Ok(report)
}

/// Conditional disclosure of a classical secret.
///
/// ε: worst, over f = 1 inputs and secrets s, of the probability that the
/// referee's decoder fails to output s.
///
/// δ: worst, over f = 0 inputs and s, of ‖σ_M(x,y) − ρ_M(s,x,y)‖₁ with the
/// simulator σ_M the uniform mixture over s.
pub fn verify_cdqs_prime(
    p: &NLQCProtocol,
    dec: &DecoderBundle,
    opts: &VerifyOpts,
) -> QResult<VerificationReport> {
    let (f, secret_bits) = match &p.task {
        TaskInstance::CdqsPrime { f, secret_bits } => (f.clone(), *secret_bits),
        other => {
            return Err(QError::TaskMismatch {
                expected: "cdqs_prime".into(),
                found: other.name(),
            })
        }
    };
    if p.alice_bits != f.n_x + secret_bits {
        return Err(QError::Protocol(format!(
            "cdqs_prime protocol must take x ({} bits) plus the secret ({} bits) as Alice's classical input",
            f.n_x, secret_bits
        )));
    }
    let readout = dec
        .readout
        .clone()
        .ok_or_else(|| QError::Protocol("cdqs_prime decoder needs a readout register".into()))?;
    let mut report = VerificationReport::new(p.task.name(), count_resources(p)?);
    report.bound_kind = BoundKind::Probability;
    let mut eps = 0.0f64;
    let mut delta = 0.0f64;
    let mut saw_zero = false;
    let s_count = 1u64 << secret_bits;
    for (x, y, fv) in f.inputs() {
        if fv {
            let rc = dec.referee.get(&(x, y)).ok_or_else(|| util::missing_decoder(x, y))?;
            for s in 0..s_count {
                let a_in = (s << f.n_x) | x;
                let out = execute(p, a_in, y, None, &opts.exec())?;
                let rho = util::decode_and_keep(&out.final_state, rc, &[readout.clone()])?;
                let d = rho.dim();
                if s as usize >= d {
                    return Err(QError::DimensionMismatch(format!(
                        "readout register dimension {d} cannot encode secret {s}"
                    )));
                }
                let p_ok = rho.matrix[(s as usize, s as usize)].re;
                let fail = (1.0 - p_ok).max(0.0);
                report
                    .per_input
                    .insert(format!("x{x}_y{y}_s{s}_correct"), fail);
                eps = eps.max(fail);
            }
        } else {
            saw_zero = true;
            // Referee marginals per secret.
            let mut marginals = Vec::new();
            for s in 0..s_count {
                let a_in = (s << f.n_x) | x;
                let out = execute(p, a_in, y, None, &opts.exec())?;
                let keep = util::held_by(&out.final_state, Holder::Referee);
                let rho = qcore::partial_trace(&out.final_state, &keep)?;
                marginals.push(qcore::reorder_density(&rho, &keep)?);
            }
            let mut sigma = marginals[0].matrix.clone().scale(1.0 / s_count as f64);
            for m in &marginals[1..] {
                sigma += m.matrix.clone().scale(1.0 / s_count as f64);
            }
            for (s, m) in marginals.iter().enumerate() {
                let dist = crate::linalg::trace_norm(&(&sigma - &m.matrix));
                report
                    .per_input
                    .insert(format!("x{x}_y{y}_s{s}_secure"), dist);
                delta = delta.max(dist);
            }
        }
    }
    report.epsilon = eps;
    if saw_zero {
        report.delta = Some(delta);
    }
    Ok(report)
}
