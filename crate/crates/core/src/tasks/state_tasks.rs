use num_complex::Complex64;

use crate::engine::{count_resources, execute, NLQCProtocol};
use crate::error::{QError, QResult};
use crate::linalg::cf;
use crate::qcore::{self, DistanceBounds, PureState};
use crate::tasks::util;
use crate::tasks::{BoundKind, TaskInstance, VerificationReport, VerifyOpts};

/// Distinguish verifier: on input φ_b both parties must output b into their
/// `out_a` / `out_b` registers; ε = 1 − min_b Pr[both output b].
pub fn verify_distinguish(p: &NLQCProtocol, opts: &VerifyOpts) -> QResult<VerificationReport> {
    let (phi0, phi1) = match &p.task {
        TaskInstance::Distinguish { phi0, phi1 } => (phi0.clone(), phi1.clone()),
        other => {
            return Err(QError::TaskMismatch {
                expected: "distinguish".into(),
                found: other.name(),
            })
        }
    };
    p.task.validate()?;
    let mut report = VerificationReport::new(p.task.name(), count_resources(p)?);
    report.bound_kind = BoundKind::Probability;
    let mut eps = 0.0f64;
    for (b, phi) in [(0usize, &phi0), (1usize, &phi1)] {
        let out = execute(p, 0, 0, Some(phi), &opts.exec())?;
        let rho = &out.final_state;
        let mut proj = crate::linalg::CMatrix::zeros(2, 2);
        proj[(b, b)] = cf(1.0);
        let pa = util::expectation(rho, &["out_a".to_string()], &proj)?;
        let _ = pa;
        let both = {
            let full_a =
                qcore::embed_square_op(&rho.layout, &["out_a".to_string()], &proj)?;
            let full_b =
                qcore::embed_square_op(&rho.layout, &["out_b".to_string()], &proj)?;
            let m = full_a * full_b * &rho.matrix;
            crate::linalg::trace(&m).re
        };
        report.per_input.insert(format!("b{b}"), 1.0 - both);
        eps = eps.max(1.0 - both);
    }
    report.epsilon = eps.max(0.0);
    Ok(report)
}

/// Interchange verifier: the protocol must act as the swap ψ0 ↔ ψ1 on the
/// two-dimensional span. Checked on the four states ψ0, ψ1, (ψ0 ± ψ1)/√2 via
/// output fidelities and through the Choi matrix of the span-restricted
/// channel.
pub fn verify_interchange(p: &NLQCProtocol, opts: &VerifyOpts) -> QResult<VerificationReport> {
    let (psi0, psi1) = match &p.task {
        TaskInstance::Interchange { psi0, psi1 } => (psi0.clone(), psi1.clone()),
        other => {
            return Err(QError::TaskMismatch {
                expected: "interchange".into(),
                found: other.name(),
            })
        }
    };
    p.task.validate()?;
    let mut report = VerificationReport::new(p.task.name(), count_resources(p)?);
    let ids = psi0.layout.ids();

    // Fidelity spot checks on the four span states.
    let superpose = |sign: f64| -> QResult<PureState> {
        let amps: Vec<Complex64> = psi0
            .amps
            .iter()
            .zip(&psi1.amps)
            .map(|(a, b)| (a + cf(sign) * b) * cf(std::f64::consts::FRAC_1_SQRT_2))
            .collect();
        PureState::new(psi0.layout.clone(), amps)
    };
    let cases: Vec<(String, PureState, PureState)> = vec![
        ("psi0".into(), psi0.clone(), psi1.clone()),
        ("psi1".into(), psi1.clone(), psi0.clone()),
        ("plus".into(), superpose(1.0)?, superpose(1.0)?),
        ("minus".into(), superpose(-1.0)?, {
            // U(ψ0 − ψ1) = ψ1 − ψ0 = −(ψ0 − ψ1): same state up to phase.
            superpose(-1.0)?
        }),
    ];
    for (label, input, want) in &cases {
        let out = execute(p, 0, 0, Some(input), &opts.exec())?;
        let rho = qcore::partial_trace(&out.final_state, &ids)?;
        let rho = qcore::reorder_density(&rho, &ids)?;
        let target = want.to_density();
        let fid = qcore::fidelity(&rho, &target)?;
        report.per_input.insert(format!("fid_{label}"), 1.0 - fid);
    }

    // Span-restricted Choi: reference qubit entangled with the span index.
    let mut regs = vec![qcore::Register::qubit("ref_span", qcore::Holder::Referee)];
    regs.extend(psi0.layout.registers().to_vec());
    let layout = qcore::RegisterLayout::new(regs)?;
    let d = psi0.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * d];
    for i in 0..d {
        amps[i] = psi0.amps[i] * cf(std::f64::consts::FRAC_1_SQRT_2);
        amps[d + i] = psi1.amps[i] * cf(std::f64::consts::FRAC_1_SQRT_2);
    }
    let span_input = PureState::new(layout.clone(), amps)?;
    let out = execute(p, 0, 0, Some(&span_input), &opts.exec())?;
    let mut keep = vec!["ref_span".to_string()];
    keep.extend(ids.iter().cloned());
    let got = qcore::reorder_density(&qcore::partial_trace(&out.final_state, &keep)?, &keep)?;
    // Ideal: |0⟩ψ1 + |1⟩ψ0 (the swapped correlation).
    let mut ideal_amps = vec![Complex64::new(0.0, 0.0); 2 * d];
    for i in 0..d {
        ideal_amps[i] = psi1.amps[i] * cf(std::f64::consts::FRAC_1_SQRT_2);
        ideal_amps[d + i] = psi0.amps[i] * cf(std::f64::consts::FRAC_1_SQRT_2);
    }
    let ideal = PureState::new(layout, ideal_amps)?.to_density();
    let bounds = DistanceBounds::from_chois(&got.matrix, &ideal.matrix, 2)?;
    report.per_input.insert("span_choi".into(), bounds.epsilon());
    report.epsilon = bounds.epsilon();
    report.epsilon_lower = Some(bounds.lower);
    report.bound_kind = if bounds.exact_zero {
        BoundKind::ChoiExact
    } else {
        BoundKind::Sandwich
    };
    Ok(report)
}
