//! Execution model for one-round two-party protocols: a shared entangled
//! resource state, per-classical-input first-round circuits with
//! keep/send/discard partitions, one simultaneous exchange, and second-round
//! circuits. Everything is isometric; classical messages are
//! computational-basis registers and classical randomness is an explicit
//! uniform mixture over execution arms.

mod execute;
mod noise;

pub use execute::{execute, ArmRun, ExecConfig, ExecOutcome, StageState};
pub use noise::{count_resources, inject_depolarizing, ResourceAccount};

use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::qcore::{Holder, IsometryOp, PureState, Register};
use crate::tasks::TaskInstance;

/// One step of a party's local circuit.
#[derive(Debug, Clone)]
pub enum Step {
    /// Apply an isometry to named registers. `out_ids` names the op's output
    /// registers positionally; newly created registers are tagged with the
    /// acting party's holder.
    Apply {
        op: IsometryOp,
        targets: Vec<String>,
        out_ids: Vec<String>,
    },
    /// Remove a register that is exactly |0⟩ (norm of other components below
    /// tolerance). Keeps transcript dimensions at desk scale.
    DropZero { id: String },
}

impl Step {
    pub fn apply(op: IsometryOp, targets: &[&str], out_ids: &[&str]) -> Step {
        Step::Apply {
            op,
            targets: targets.iter().map(|s| s.to_string()).collect(),
            out_ids: out_ids.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Square gate: outputs keep the target names.
    pub fn gate(op: IsometryOp, targets: &[&str]) -> Step {
        Step::Apply {
            op,
            targets: targets.iter().map(|s| s.to_string()).collect(),
            out_ids: targets.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn drop_zero(id: &str) -> Step {
        Step::DropZero { id: id.to_string() }
    }

    /// Rewrites every register reference through `f`.
    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Step {
        match self {
            Step::Apply { op, targets, out_ids } => Step::Apply {
                op: op.clone(),
                targets: targets.iter().map(|t| f(t)).collect(),
                out_ids: out_ids.iter().map(|t| f(t)).collect(),
            },
            Step::DropZero { id } => Step::DropZero { id: f(id) },
        }
    }
}

/// Sequence of steps run by one party within one round.
#[derive(Debug, Clone, Default)]
pub struct LocalCircuit {
    pub steps: Vec<Step>,
}

impl LocalCircuit {
    pub fn new(steps: Vec<Step>) -> Self {
        LocalCircuit { steps }
    }

    pub fn empty() -> Self {
        LocalCircuit { steps: vec![] }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> LocalCircuit {
        LocalCircuit {
            steps: self.steps.iter().map(|s| s.rename(f)).collect(),
        }
    }

    pub fn extend(&mut self, other: LocalCircuit) {
        self.steps.extend(other.steps);
    }
}

/// What a round action's branch choice depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputDep {
    /// Single branch.
    None,
    /// The party's own classical input (the only legal input dependence in
    /// round 1).
    Own,
    /// Both classical inputs. Legal in round 2 only: after the exchange both
    /// parties are assumed to have sent their inputs across, which costs no
    /// entanglement.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selector {
    pub input: InputDep,
    pub by_arm: bool,
}

impl Selector {
    pub fn fixed() -> Self {
        Selector { input: InputDep::None, by_arm: false }
    }

    pub fn by_own() -> Self {
        Selector { input: InputDep::Own, by_arm: false }
    }

    pub fn by_pair() -> Self {
        Selector { input: InputDep::Pair, by_arm: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn holder(&self) -> Holder {
        match self {
            Party::Alice => Holder::Alice,
            Party::Bob => Holder::Bob,
        }
    }
}

/// A party's action within one round: branch circuits plus the partition of
/// its registers into keep / send / to-referee / discard, applied at the end
/// of the round. All branches must produce the same register set.
#[derive(Debug, Clone)]
pub struct RoundAction {
    pub selector: Selector,
    pub branches: Vec<LocalCircuit>,
    /// Registers shipped to the other party at the exchange (round 1 only).
    pub send: Vec<String>,
    /// Registers shipped straight to the referee at the exchange
    /// (round 1 only; the referee-as-receiver pattern).
    pub to_referee: Vec<String>,
    /// Registers retagged Env at the end of the round.
    pub discard: Vec<String>,
}

impl RoundAction {
    pub fn noop() -> Self {
        RoundAction {
            selector: Selector::fixed(),
            branches: vec![LocalCircuit::empty()],
            send: vec![],
            to_referee: vec![],
            discard: vec![],
        }
    }

    pub fn single(circuit: LocalCircuit) -> Self {
        RoundAction {
            selector: Selector::fixed(),
            branches: vec![circuit],
            send: vec![],
            to_referee: vec![],
            discard: vec![],
        }
    }

    pub fn with_send(mut self, send: &[&str]) -> Self {
        self.send = send.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_discard(mut self, discard: &[&str]) -> Self {
        self.discard = discard.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> RoundAction {
        RoundAction {
            selector: self.selector,
            branches: self.branches.iter().map(|c| c.rename(f)).collect(),
            send: self.send.iter().map(|s| f(s)).collect(),
            to_referee: self.to_referee.iter().map(|s| f(s)).collect(),
            discard: self.discard.iter().map(|s| f(s)).collect(),
        }
    }
}

/// Tag describing how a transformer's claimed output error is computed from
/// the measured input errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorBound {
    /// Claims exact correctness.
    Exact,
    /// Same error as the (single) input.
    Same,
    /// Sum of the input errors.
    Sum,
    /// k times the input error.
    Scaled(u32),
    /// One-time-pad correctness: 4ε.
    PadCorrectness,
    /// One-time-pad security: 2δ.
    PadSecurity,
    /// Classical-secret security from a measurement error:
    /// 2·sqrt((2 ln 2)·h(ε)).
    MeasureSecurity,
}

impl ErrorBound {
    /// Evaluates the claim on the measured input errors.
    pub fn evaluate(&self, inputs: &[f64]) -> f64 {
        let first = inputs.first().copied().unwrap_or(0.0);
        match self {
            ErrorBound::Exact => 0.0,
            ErrorBound::Same => first,
            ErrorBound::Sum => inputs.iter().sum(),
            ErrorBound::Scaled(k) => *k as f64 * first,
            ErrorBound::PadCorrectness => 4.0 * first,
            ErrorBound::PadSecurity => 2.0 * first,
            ErrorBound::MeasureSecurity => {
                let h = crate::infotheory::binary_entropy(first.clamp(0.0, 1.0))
                    .unwrap_or(1.0);
                2.0 * (2.0 * std::f64::consts::LN_2 * h).sqrt()
            }
        }
    }
}

/// Provenance entry attached by each transformer: resource overhead (α
/// protocol copies, β extra qubits) and the claimed error propagation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub rule: String,
    pub alpha: u32,
    pub beta: u32,
    pub claimed_error_bound: ErrorBound,
    /// True when the transformer composes whole protocols as black boxes
    /// (additive error propagation applies structurally).
    pub oracle_style: bool,
}

impl ReductionRecord {
    pub fn new(rule: &str, alpha: u32, beta: u32, bound: ErrorBound, oracle_style: bool) -> Self {
        ReductionRecord {
            rule: rule.into(),
            alpha,
            beta,
            claimed_error_bound: bound,
            oracle_style,
        }
    }
}

/// A one-round two-party protocol.
#[derive(Debug, Clone)]
pub struct NLQCProtocol {
    /// Width of Alice's classical input in bits (task input x in the low
    /// bits, any extra classical inputs such as a secret above them).
    pub alice_bits: usize,
    pub bob_bits: usize,
    /// Number of equally weighted classical-randomness arms; outputs are
    /// averaged over arms.
    pub mixture_arms: usize,
    /// Shared resource: pure, with registers tagged Alice/Bob (plus Env for
    /// purified noise).
    pub resource: PureState,
    /// Declared quantum input registers (id, dim, holder).
    pub inputs: Vec<Register>,
    /// Registers that constitute the declared output after round 2.
    pub outputs: Vec<String>,
    pub alice_r1: RoundAction,
    pub bob_r1: RoundAction,
    pub alice_r2: RoundAction,
    pub bob_r2: RoundAction,
    pub task: TaskInstance,
    pub provenance: Vec<ReductionRecord>,
    /// Count of designated maximally entangled qubit pairs when the resource
    /// was assembled from EPR tensor factors; None marks a composite state.
    pub epr_pairs: Option<usize>,
}

impl NLQCProtocol {
    /// Structural checks that do not need an execution.
    pub fn validate(&self) -> QResult<()> {
        if self.mixture_arms == 0 {
            return Err(QError::Protocol("mixture_arms must be at least 1".into()));
        }
        if (self.resource.norm_sqr() - 1.0).abs() > crate::TOL {
            return Err(QError::NotNormalized(self.resource.norm_sqr()));
        }
        for r in self.resource.layout.registers() {
            if r.holder == Holder::Referee {
                return Err(QError::HolderViolation(format!(
                    "resource register `{}` held by the referee",
                    r.id
                )));
            }
        }
        for (action, round1, label) in [
            (&self.alice_r1, true, "alice_r1"),
            (&self.bob_r1, true, "bob_r1"),
            (&self.alice_r2, false, "alice_r2"),
            (&self.bob_r2, false, "bob_r2"),
        ] {
            if round1 && action.selector.input == InputDep::Pair {
                return Err(QError::Protocol(format!(
                    "{label}: round-1 branches may depend only on the local input"
                )));
            }
            if !round1 && (!action.send.is_empty() || !action.to_referee.is_empty()) {
                return Err(QError::Protocol(format!(
                    "{label}: nothing can be sent after the exchange"
                )));
            }
            let want = self.branch_count(action.selector, label.starts_with("alice"));
            if action.branches.len() != want {
                return Err(QError::Protocol(format!(
                    "{label}: expected {want} branches, found {}",
                    action.branches.len()
                )));
            }
        }
        Ok(())
    }

    fn branch_count(&self, sel: Selector, alice: bool) -> usize {
        let input = match sel.input {
            InputDep::None => 1,
            InputDep::Own => {
                if alice {
                    1 << self.alice_bits
                } else {
                    1 << self.bob_bits
                }
            }
            InputDep::Pair => 1 << (self.alice_bits + self.bob_bits),
        };
        input * if sel.by_arm { self.mixture_arms } else { 1 }
    }

    pub(crate) fn branch_index(
        &self,
        sel: Selector,
        alice: bool,
        a_in: u64,
        b_in: u64,
        arm: usize,
    ) -> usize {
        let input_idx = match sel.input {
            InputDep::None => 0,
            InputDep::Own => {
                if alice {
                    a_in as usize
                } else {
                    b_in as usize
                }
            }
            InputDep::Pair => ((a_in as usize) << self.bob_bits) | b_in as usize,
        };
        let arms = if sel.by_arm { self.mixture_arms } else { 1 };
        input_idx * arms + if sel.by_arm { arm } else { 0 }
    }

    /// The task's x value from Alice's full classical input (low bits).
    pub fn x_of(&self, a_in: u64, x_bits: usize) -> u64 {
        a_in & ((1 << x_bits) - 1)
    }
}
