use num_complex::Complex64;

use crate::engine::{NLQCProtocol, Party, RoundAction, Step};
use crate::error::{QError, QResult};
use crate::linalg::CMatrix;
use crate::qcore::{self, DensityOperator, Holder, PureState};
use crate::DEFAULT_DIM_CAP;

#[derive(Debug, Clone)]
pub struct ExecConfig {
    pub cap: usize,
    pub record_transcript: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            cap: DEFAULT_DIM_CAP,
            record_transcript: false,
        }
    }
}

/// Global pure state after a named stage.
#[derive(Debug, Clone)]
pub struct StageState {
    pub label: String,
    pub state: PureState,
}

/// One classical-randomness arm of an execution.
#[derive(Debug, Clone)]
pub struct ArmRun {
    pub arm: usize,
    pub stages: Vec<StageState>,
    pub final_pure: PureState,
}

/// Result of executing a protocol on fixed classical inputs.
#[derive(Debug)]
pub struct ExecOutcome {
    /// Arm-averaged state on the declared outputs plus every register the
    /// referee holds at the end.
    pub final_state: DensityOperator,
    pub kept_ids: Vec<String>,
    pub arms: Vec<ArmRun>,
}

fn run_circuit(
    state: PureState,
    action: &RoundAction,
    p: &NLQCProtocol,
    party: Party,
    a_in: u64,
    b_in: u64,
    arm: usize,
    cap: usize,
) -> QResult<PureState> {
    let idx = p.branch_index(action.selector, party == Party::Alice, a_in, b_in, arm);
    let circuit = action.branches.get(idx).ok_or_else(|| {
        QError::Protocol(format!("branch index {idx} out of range"))
    })?;
    let holder = party.holder();
    let mut st = state;
    for step in &circuit.steps {
        match step {
            Step::Apply { op, targets, out_ids } => {
                for t in targets {
                    let reg = st.layout.register(t)?;
                    if reg.holder != holder {
                        return Err(QError::HolderViolation(format!(
                            "{:?} acts on `{t}` held by {:?}",
                            party, reg.holder
                        )));
                    }
                }
                st = qcore::apply_on_registers(&st, op, targets, Some(out_ids), cap)?;
                // Fresh registers belong to the acting party.
                for id in out_ids {
                    if st.layout.register(id)?.holder == Holder::Env {
                        continue;
                    }
                    st.layout.set_holder(id, holder)?;
                }
            }
            Step::DropZero { id } => {
                let reg = st.layout.register(id)?;
                if reg.holder != holder {
                    return Err(QError::HolderViolation(format!(
                        "{:?} drops `{id}` held by {:?}",
                        party, reg.holder
                    )));
                }
                st = drop_zero_register(&st, id)?;
            }
        }
    }
    Ok(st)
}

/// Removes a register whose reduced state is exactly |0⟩.
fn drop_zero_register(state: &PureState, id: &str) -> QResult<PureState> {
    let pos = state.layout.position(id)?;
    let dim = state.layout.registers()[pos].dim;
    let stride = state.layout.stride(pos);
    let new_total = state.dim() / dim;
    let mut amps = vec![Complex64::new(0.0, 0.0); new_total];
    let mut residue = 0.0f64;
    for (i, a) in state.amps.iter().enumerate() {
        let digit = (i / stride) % dim;
        if digit == 0 {
            let prefix = i / (stride * dim);
            amps[prefix * stride + (i % stride)] = *a;
        } else {
            residue += a.norm_sqr();
        }
    }
    if residue > crate::TOL {
        return Err(QError::Protocol(format!(
            "register `{id}` dropped while carrying weight {residue:.3e}"
        )));
    }
    let mut regs = state.layout.registers().to_vec();
    regs.remove(pos);
    PureState::new(crate::qcore::RegisterLayout::new(regs)?, amps)
}

fn apply_partition(state: &mut PureState, action: &RoundAction, sender: Holder) -> QResult<()> {
    let recipient = match sender {
        Holder::Alice => Holder::Bob,
        Holder::Bob => Holder::Alice,
        _ => return Err(QError::Protocol("sender must be a party".into())),
    };
    for id in &action.send {
        let reg = state.layout.register(id)?;
        if reg.holder != sender {
            return Err(QError::HolderViolation(format!(
                "`{id}` sent by {:?} but held by {:?}",
                sender, reg.holder
            )));
        }
        state.layout.set_holder(id, recipient)?;
    }
    for id in &action.to_referee {
        let reg = state.layout.register(id)?;
        if reg.holder != sender {
            return Err(QError::HolderViolation(format!(
                "`{id}` sent by {:?} but held by {:?}",
                sender, reg.holder
            )));
        }
        state.layout.set_holder(id, Holder::Referee)?;
    }
    for id in &action.discard {
        let reg = state.layout.register(id)?;
        if reg.holder != sender {
            return Err(QError::HolderViolation(format!(
                "`{id}` discarded by {:?} but held by {:?}",
                sender, reg.holder
            )));
        }
        state.layout.set_holder(id, Holder::Env)?;
    }
    Ok(())
}

fn check_norm(state: &PureState, label: &str) -> QResult<()> {
    let n2 = state.norm_sqr();
    if (n2 - 1.0).abs() > crate::TOL {
        return Err(QError::Protocol(format!(
            "transcript norm drifted to {n2} after {label}"
        )));
    }
    Ok(())
}

/// Executes the protocol on classical inputs (a_in, b_in) and the given
/// quantum input. Referee-held registers in the input pass through untouched
/// and are kept in the final state (the reference-system pattern).
pub fn execute(
    p: &NLQCProtocol,
    a_in: u64,
    b_in: u64,
    quantum_in: Option<&PureState>,
    cfg: &ExecConfig,
) -> QResult<ExecOutcome> {
    p.validate()?;
    if a_in >= 1 << p.alice_bits || b_in >= 1 << p.bob_bits {
        return Err(QError::InvalidArgument(format!(
            "classical inputs ({a_in}, {b_in}) out of range for widths ({}, {})",
            p.alice_bits, p.bob_bits
        )));
    }
    // Assemble the initial state.
    let base = match quantum_in {
        Some(q) => {
            for want in &p.inputs {
                let reg = q.layout.register(&want.id).map_err(|_| {
                    QError::Protocol(format!("quantum input misses register `{}`", want.id))
                })?;
                if reg.dim != want.dim || reg.holder != want.holder {
                    return Err(QError::Protocol(format!(
                        "quantum input register `{}` has (dim {}, {:?}), protocol declares (dim {}, {:?})",
                        want.id, reg.dim, reg.holder, want.dim, want.holder
                    )));
                }
            }
            for reg in q.layout.registers() {
                let declared = p.inputs.iter().any(|r| r.id == reg.id);
                if !declared && reg.holder != Holder::Referee && reg.holder != Holder::Env {
                    return Err(QError::Protocol(format!(
                        "undeclared party-held register `{}` in quantum input",
                        reg.id
                    )));
                }
            }
            q.clone()
        }
        None => {
            if !p.inputs.is_empty() {
                return Err(QError::Protocol(
                    "protocol declares quantum inputs but none were given".into(),
                ));
            }
            PureState::scalar()
        }
    };
    let initial = base.tensor(&p.resource)?;
    if initial.dim() > cfg.cap {
        return Err(QError::CapExceeded {
            needed: initial.dim(),
            cap: cfg.cap,
        });
    }

    let mut arms = Vec::with_capacity(p.mixture_arms);
    let mut averaged: Option<(Vec<String>, CMatrix)> = None;
    let mut kept_ids_common: Option<Vec<String>> = None;
    for arm in 0..p.mixture_arms {
        let mut stages = Vec::new();
        let mut st = initial.clone();
        check_norm(&st, "input")?;
        if cfg.record_transcript {
            stages.push(StageState { label: "input".into(), state: st.clone() });
        }

        st = run_circuit(st, &p.alice_r1, p, Party::Alice, a_in, b_in, arm, cfg.cap)?;
        st = run_circuit(st, &p.bob_r1, p, Party::Bob, a_in, b_in, arm, cfg.cap)?;
        check_norm(&st, "round1")?;
        if cfg.record_transcript {
            stages.push(StageState { label: "round1".into(), state: st.clone() });
        }

        apply_partition(&mut st, &p.alice_r1, Holder::Alice)?;
        apply_partition(&mut st, &p.bob_r1, Holder::Bob)?;
        if cfg.record_transcript {
            stages.push(StageState { label: "exchange".into(), state: st.clone() });
        }

        st = run_circuit(st, &p.alice_r2, p, Party::Alice, a_in, b_in, arm, cfg.cap)?;
        st = run_circuit(st, &p.bob_r2, p, Party::Bob, a_in, b_in, arm, cfg.cap)?;
        apply_partition(&mut st, &p.alice_r2, Holder::Alice)?;
        apply_partition(&mut st, &p.bob_r2, Holder::Bob)?;
        check_norm(&st, "round2")?;
        if cfg.record_transcript {
            stages.push(StageState { label: "round2".into(), state: st.clone() });
        }

        // Keep declared outputs plus everything the referee holds.
        let mut keep: Vec<String> = Vec::new();
        for id in &p.outputs {
            st.layout.position(id)?;
            keep.push(id.clone());
        }
        for reg in st.layout.registers() {
            if reg.holder == Holder::Referee && !keep.contains(&reg.id) {
                keep.push(reg.id.clone());
            }
        }
        // Canonical order: layout order.
        keep.sort_by_key(|id| st.layout.position(id).unwrap());
        let reduced = qcore::partial_trace_pure(&st, &keep)?;
        match &mut averaged {
            None => {
                kept_ids_common = Some(reduced.layout.ids());
                averaged = Some((reduced.layout.ids(), reduced.matrix.clone()));
            }
            Some((ids, acc)) => {
                if *ids != reduced.layout.ids() {
                    return Err(QError::Protocol(
                        "mixture arms end with different register sets".into(),
                    ));
                }
                *acc += reduced.matrix;
            }
        }
        arms.push(ArmRun { arm, stages, final_pure: st });
    }
    let (ids, mut acc) = averaged.expect("at least one arm");
    acc /= Complex64::new(p.mixture_arms as f64, 0.0);
    // Rebuild the layout from the last arm's final state for holder tags.
    let last = &arms.last().unwrap().final_pure;
    let regs: Vec<crate::qcore::Register> = ids
        .iter()
        .map(|id| last.layout.register(id).unwrap().clone())
        .collect();
    let layout = crate::qcore::RegisterLayout::new(regs)?;
    Ok(ExecOutcome {
        final_state: DensityOperator::new_unchecked(layout, acc),
        kept_ids: kept_ids_common.unwrap(),
        arms,
    })
}
