use crate::engine::{count_resources, execute, NLQCProtocol};
use crate::error::{QError, QResult};
use crate::linalg::{CMatrix, C_ONE};
use crate::qcore::{self, DistanceBounds, IsometryOp, PureState, RegisterLayout};
use crate::tasks::util;
use crate::tasks::{BoundKind, TaskInstance, VerificationReport, VerifyOpts};

/// The dense target unitary on the protocol's declared quantum inputs, in
/// their declared order, for a fixed classical input pair. For coherent
/// protocols (no classical inputs) the control registers are part of the
/// declared inputs and (x, y) are ignored.
pub fn cf_target_unitary(p: &NLQCProtocol, x: u64, y: u64) -> QResult<CMatrix> {
    let input_dims: Vec<usize> = p.inputs.iter().map(|r| r.dim).collect();
    let total: usize = input_dims.iter().product();
    let coherent = p.alice_bits == 0 && p.bob_bits == 0;
    match &p.task {
        TaskInstance::CfPhase { f } => {
            if !coherent {
                return Err(QError::Protocol(
                    "a coherent phase protocol must take its inputs as quantum registers".into(),
                ));
            }
            if input_dims != vec![1 << f.n_x, 1 << f.n_y] {
                return Err(QError::Protocol(
                    "coherent phase inputs must be `a`, `b` with dims 2^n_x, 2^n_y".into(),
                ));
            }
            let mut m = CMatrix::zeros(total, total);
            for xv in 0..f.x_values() {
                for yv in 0..f.y_values() {
                    let idx = (xv * f.y_values() + yv) as usize;
                    m[(idx, idx)] = if f.eval(xv, yv) {
                        crate::linalg::cf(-1.0)
                    } else {
                        C_ONE
                    };
                }
            }
            Ok(m)
        }
        TaskInstance::CfUnitary { f, u, .. } | TaskInstance::CfSwap { f } => {
            let u = match &p.task {
                TaskInstance::CfSwap { .. } => qcore::swap2(),
                TaskInstance::CfUnitary { u, .. } => u.clone(),
                _ => unreachable!(),
            };
            let target_dim = u.nrows();
            if coherent {
                let ctrl_dim = (1usize << f.n_x) * (1usize << f.n_y);
                if total != ctrl_dim * target_dim {
                    return Err(QError::Protocol(format!(
                        "declared inputs span {total}, expected controls({ctrl_dim})·target({target_dim})"
                    )));
                }
                let mut m = CMatrix::zeros(total, total);
                for xv in 0..f.x_values() {
                    for yv in 0..f.y_values() {
                        let base = (xv * f.y_values() + yv) as usize * target_dim;
                        let apply = f.eval(xv, yv);
                        for i in 0..target_dim {
                            for j in 0..target_dim {
                                let v = if apply {
                                    u[(i, j)]
                                } else if i == j {
                                    C_ONE
                                } else {
                                    continue;
                                };
                                m[(base + i, base + j)] = v;
                            }
                        }
                    }
                }
                Ok(m)
            } else {
                if total != target_dim {
                    return Err(QError::Protocol(format!(
                        "declared inputs span {total}, target unitary has dimension {target_dim}"
                    )));
                }
                if f.eval(x, y) {
                    Ok(u)
                } else {
                    Ok(CMatrix::identity(total, total))
                }
            }
        }
        other => Err(QError::TaskMismatch {
            expected: "a coherent unitary task".into(),
            found: other.name(),
        }),
    }
}

fn choi_of_run(
    p: &NLQCProtocol,
    x: u64,
    y: u64,
    opts: &VerifyOpts,
) -> QResult<(CMatrix, CMatrix, usize)> {
    let (input, refs) = util::entangled_inputs(p)?;
    let ids: Vec<String> = p.inputs.iter().map(|r| r.id.clone()).collect();
    let mut order = refs.clone();
    order.extend(ids.iter().cloned());

    let out = execute(p, x, y, Some(&input), &opts.exec())?;
    let got = qcore::reorder_density(&qcore::partial_trace(&out.final_state, &order)?, &order)?;

    let u = cf_target_unitary(p, x, y)?;
    let in_layout = RegisterLayout::new(p.inputs.clone())?;
    let u_op = IsometryOp::from_matrix(in_layout.clone(), in_layout, u)?;
    let ideal_state = qcore::apply_on_registers(&input, &u_op, &ids, None, opts.cap)?;
    let ideal = qcore::reorder_density(
        &qcore::partial_trace_pure(&ideal_state, &order)?,
        &order,
    )?;
    let d_in: usize = p.inputs.iter().map(|r| r.dim).product();
    Ok((got.matrix, ideal.matrix, d_in))
}

/// Coherent-unitary verifier. Protocols with quantum control registers are
/// compared against the full controlled unitary in one Choi check; protocols
/// with classical control inputs (the route-derived swap family) are checked
/// per (x, y) against the fixed target u^{f(x,y)} on the quantum targets.
pub fn verify_cf_unitary(p: &NLQCProtocol, opts: &VerifyOpts) -> QResult<VerificationReport> {
    let f = p
        .task
        .function()
        .ok_or_else(|| QError::TaskMismatch {
            expected: "a coherent unitary task".into(),
            found: p.task.name(),
        })?
        .clone();
    let mut report = VerificationReport::new(p.task.name(), count_resources(p)?);
    let coherent = p.alice_bits == 0 && p.bob_bits == 0;
    let mut all_exact = true;
    let mut eps = 0.0f64;
    let mut eps_lower = 0.0f64;
    if coherent {
        let (got, ideal, d_in) = choi_of_run(p, 0, 0, opts)?;
        let bounds = DistanceBounds::from_chois(&got, &ideal, d_in)?;
        report.per_input.insert("coherent".into(), bounds.epsilon());
        all_exact = bounds.exact_zero;
        eps = bounds.epsilon();
        eps_lower = bounds.lower;
    } else {
        for (x, y, _) in f.inputs() {
            let (got, ideal, d_in) = choi_of_run(p, x, y, opts)?;
            let bounds = DistanceBounds::from_chois(&got, &ideal, d_in)?;
            report.per_input.insert(format!("x{x}_y{y}"), bounds.epsilon());
            all_exact &= bounds.exact_zero;
            eps = eps.max(bounds.epsilon());
            eps_lower = eps_lower.max(bounds.lower);
        }
    }
    report.epsilon = eps;
    report.epsilon_lower = Some(eps_lower);
    report.bound_kind = if all_exact {
        BoundKind::ChoiExact
    } else {
        BoundKind::Sandwich
    };
    Ok(report)
}

/// Relative phase picked up by a classically controlled protocol on a target
/// eigenstate, made physical by comparing against a reference input within
/// the same branch: returns ⟨ideal | actual⟩ where the junk factor is
/// cancelled using a run on `reference` (which the target unitary must fix).
///
/// Used by the singlet identity check: the swap family acting on |Φ⁻⟩ must
/// return exactly −1 per routed input.
pub fn branch_eigenphase(
    p: &NLQCProtocol,
    x: u64,
    y: u64,
    eigenstate: &PureState,
    reference: &PureState,
    opts: &VerifyOpts,
) -> QResult<num_complex::Complex64> {
    let cfg = crate::engine::ExecConfig {
        cap: opts.cap,
        record_transcript: true,
    };
    let run_e = execute(p, x, y, Some(eigenstate), &cfg)?;
    let run_r = execute(p, x, y, Some(reference), &cfg)?;
    if p.mixture_arms != 1 {
        return Err(QError::Protocol(
            "eigenphase extraction needs a deterministic protocol".into(),
        ));
    }
    let fin_e = &run_e.arms[0].final_pure;
    let fin_r = &run_r.arms[0].final_pure;
    // Contract the reference run against its known ideal output to isolate
    // the junk vector, then contract the eigenstate run against (ideal ⊗
    // junk).
    let ids: Vec<String> = p.inputs.iter().map(|r| r.id.clone()).collect();
    let u = cf_target_unitary(p, x, y)?;
    let in_layout = RegisterLayout::new(p.inputs.clone())?;
    let u_op = IsometryOp::from_matrix(in_layout.clone(), in_layout, u)?;
    let ideal_r = qcore::apply_on_registers(reference, &u_op, &ids, None, opts.cap)?;
    let ideal_e = qcore::apply_on_registers(eigenstate, &u_op, &ids, None, opts.cap)?;
    let junk = contract_against(fin_r, &ideal_r)?;
    let junk_norm: f64 = junk.iter().map(|a| a.norm_sqr()).sum();
    if (junk_norm - 1.0).abs() > 1e-7 {
        return Err(QError::Protocol(format!(
            "reference run is not exact on this branch (junk norm {junk_norm})"
        )));
    }
    let junk_e = contract_against(fin_e, &ideal_e)?;
    let phase: num_complex::Complex64 = junk
        .iter()
        .zip(&junk_e)
        .map(|(r, e)| r.conj() * e)
        .sum();
    Ok(phase)
}

/// ⟨ideal|_{inputs} · |full⟩: the residual vector on the non-input registers.
fn contract_against(
    full: &PureState,
    ideal: &PureState,
) -> QResult<Vec<num_complex::Complex64>> {
    // positions of the ideal's registers inside the full layout
    let ids = ideal.layout.ids();
    let (m_full, _, _) = split_amplitudes(full, &ids)?;
    // m_full is (ideal-dim) x (rest-dim): residual = ideal† · m_full
    let d_i = ideal.dim();
    let d_rest = m_full.len() / d_i;
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); d_rest];
    for i in 0..d_i {
        let c = ideal.amps[i].conj();
        if c == num_complex::Complex64::new(0.0, 0.0) {
            continue;
        }
        for r in 0..d_rest {
            out[r] += c * m_full[i * d_rest + r];
        }
    }
    Ok(out)
}

/// Amplitudes regrouped as (named registers) × (rest), row-major.
fn split_amplitudes(
    state: &PureState,
    ids: &[String],
) -> QResult<(Vec<num_complex::Complex64>, usize, usize)> {
    let positions = state.layout.positions(ids)?;
    let dims: Vec<usize> = state.layout.registers().iter().map(|r| r.dim).collect();
    let strides: Vec<usize> = (0..dims.len()).map(|p| state.layout.stride(p)).collect();
    let named_dim: usize = positions.iter().map(|&p| dims[p]).product();
    let rest_dim = state.dim() / named_dim;
    let rest_positions: Vec<usize> =
        (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); state.dim()];
    for (idx, amp) in state.amps.iter().enumerate() {
        let mut named = 0usize;
        for &p in &positions {
            named = named * dims[p] + (idx / strides[p]) % dims[p];
        }
        let mut rest = 0usize;
        for &p in &rest_positions {
            rest = rest * dims[p] + (idx / strides[p]) % dims[p];
        }
        out[named * rest_dim + rest] = *amp;
    }
    Ok((out, named_dim, rest_dim))
}
