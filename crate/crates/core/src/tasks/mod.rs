//! Task definitions and their verifiers: given a protocol plus the decoders
//! or measurements a construction supplies, compute the correctness error ε
//! and (where defined) the security error δ exactly as the task definitions
//! quantify them.
//!
//! Register-name contract used by every task-typed protocol:
//!
//! | task              | declared quantum inputs                       | outputs          |
//! |-------------------|-----------------------------------------------|------------------|
//! | f-route           | `q` (Alice, dim d_Q)                          | surviving side regs |
//! | f-measure         | `q` (Alice, qubit)                            | both parties' regs |
//! | CDQS / CDQS′      | `q` (Alice) / none (classical secret in a_in) | referee messages |
//! | Cf-PHASE          | `a` (Alice, 2^n_x), `b` (Bob, 2^n_y)          | `a`, `b`         |
//! | Cf-U / Cf-SWAP    | controls plus `at` and/or `bt` targets        | controls+targets |
//! | Distinguish       | `da` (Alice), `db` (Bob)                      | `out_a`, `out_b` |
//! | Interchange       | `da`, `db`                                    | `da`, `db`       |

mod cdqs;
mod coherent;
mod measure;
mod route;
mod state_tasks;
pub(crate) mod util;

pub use cdqs::{verify_cdqs, verify_cdqs_prime};
pub use coherent::{branch_eigenphase, cf_target_unitary, verify_cf_unitary};
pub use measure::{bb84_projector, verify_fmeasure};
pub use route::verify_froute;
pub use state_tasks::{verify_distinguish, verify_interchange};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boolfn::TruthTable;
use crate::engine::{ExecConfig, NLQCProtocol, ResourceAccount};
use crate::error::{QError, QResult};
use crate::linalg::CMatrix;
use crate::qcore::{ChannelOp, PureState};
use crate::TOL;

/// Which side hosts the target register(s) of a coherently controlled
/// unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetPlacement {
    Alice,
    Bob,
    Both,
}

/// The task a protocol claims to solve.
#[derive(Debug, Clone)]
pub enum TaskInstance {
    FRoute { f: TruthTable, d_q: usize },
    FMeasure { f: TruthTable },
    Cdqs { f: TruthTable, d_q: usize },
    CdqsPrime { f: TruthTable, secret_bits: usize },
    CfPhase { f: TruthTable },
    /// Coherent application of `u^f` on the declared target registers.
    CfUnitary { f: TruthTable, u: CMatrix, placement: TargetPlacement },
    CfSwap { f: TruthTable },
    Distinguish { phi0: PureState, phi1: PureState },
    Interchange { psi0: PureState, psi1: PureState },
    /// Plumbing protocols without a verifier (gadget tests).
    Opaque(String),
}

impl TaskInstance {
    pub fn name(&self) -> String {
        match self {
            TaskInstance::FRoute { .. } => "f_route".into(),
            TaskInstance::FMeasure { .. } => "f_measure".into(),
            TaskInstance::Cdqs { .. } => "cdqs".into(),
            TaskInstance::CdqsPrime { .. } => "cdqs_prime".into(),
            TaskInstance::CfPhase { .. } => "cf_phase".into(),
            TaskInstance::CfUnitary { .. } => "cf_unitary".into(),
            TaskInstance::CfSwap { .. } => "cf_swap".into(),
            TaskInstance::Distinguish { .. } => "distinguish".into(),
            TaskInstance::Interchange { .. } => "interchange".into(),
            TaskInstance::Opaque(s) => format!("opaque:{s}"),
        }
    }

    pub fn function(&self) -> Option<&TruthTable> {
        match self {
            TaskInstance::FRoute { f, .. }
            | TaskInstance::FMeasure { f }
            | TaskInstance::Cdqs { f, .. }
            | TaskInstance::CdqsPrime { f, .. }
            | TaskInstance::CfPhase { f }
            | TaskInstance::CfUnitary { f, .. }
            | TaskInstance::CfSwap { f } => Some(f),
            _ => None,
        }
    }

    /// Orthogonality invariant for the state-pair tasks.
    pub fn validate(&self) -> QResult<()> {
        let pair = match self {
            TaskInstance::Distinguish { phi0, phi1 } => Some((phi0, phi1)),
            TaskInstance::Interchange { psi0, psi1 } => Some((psi0, psi1)),
            _ => None,
        };
        if let Some((a, b)) = pair {
            let ov = a.overlap(b)?.norm();
            if ov > TOL {
                return Err(QError::InvalidArgument(format!(
                    "state pair is not orthogonal (|⟨φ0|φ1⟩| = {ov:.3e})"
                )));
            }
        }
        Ok(())
    }
}

/// A channel applied by a decoder to named registers of the final state.
#[derive(Debug, Clone)]
pub struct RegChannel {
    pub targets: Vec<String>,
    pub ch: ChannelOp,
}

/// A POVM applied to named registers; `elements[k]` is the operator for
/// outcome k.
#[derive(Debug, Clone)]
pub struct RegPovm {
    pub targets: Vec<String>,
    pub elements: Vec<CMatrix>,
}

impl RegPovm {
    pub fn validate(&self) -> QResult<()> {
        if self.elements.is_empty() {
            return Err(QError::MalformedPovm("no elements".into()));
        }
        let d = self.elements[0].nrows();
        let mut sum = CMatrix::zeros(d, d);
        for e in &self.elements {
            if e.nrows() != d || e.ncols() != d {
                return Err(QError::MalformedPovm("element shape mismatch".into()));
            }
            let (vals, _) = crate::linalg::eigh(e);
            if vals.first().map(|&v| v < -TOL).unwrap_or(false) {
                return Err(QError::MalformedPovm(format!(
                    "element has negative eigenvalue {:.3e}",
                    vals[0]
                )));
            }
            sum += e;
        }
        let dev = crate::linalg::max_dev_from_identity(&sum);
        if dev > TOL {
            return Err(QError::MalformedPovm(format!(
                "elements sum deviates from identity by {dev:.3e}"
            )));
        }
        Ok(())
    }
}

/// Decoders and measurements supplied alongside a protocol.
#[derive(Debug, Clone, Default)]
pub struct DecoderBundle {
    /// f-route recovery channels per (x, y), per side.
    pub route_alice: BTreeMap<(u64, u64), RegChannel>,
    pub route_bob: BTreeMap<(u64, u64), RegChannel>,
    /// f-measure POVMs per (x, y), per side.
    pub povm_alice: BTreeMap<(u64, u64), RegPovm>,
    pub povm_bob: BTreeMap<(u64, u64), RegPovm>,
    /// Referee decoding channel per (x, y) (CDQS: emits the secret register;
    /// CDQS′: emits a classical readout register).
    pub referee: BTreeMap<(u64, u64), RegChannel>,
    /// Readout register id for classical-secret decoding.
    pub readout: Option<String>,
}

/// How the reported ε was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Choi matrices matched entrywise within tolerance.
    ChoiExact,
    /// ε is the diamond-norm sandwich upper bound (lower bound attached).
    Sandwich,
    /// ε is an exactly computed probability or trace distance.
    Probability,
}

/// Verification result. `epsilon` is conservative: for channel comparisons
/// it is the sandwich upper bound unless Choi equality certifies zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub task: String,
    pub epsilon: f64,
    /// Certified diamond lower bound, when the check was Choi-based.
    pub epsilon_lower: Option<f64>,
    pub delta: Option<f64>,
    pub delta_lower: Option<f64>,
    pub bound_kind: BoundKind,
    pub per_input: BTreeMap<String, f64>,
    pub resources: ResourceAccount,
    pub claimed_bound: Option<f64>,
    pub claim_satisfied: Option<bool>,
}

impl VerificationReport {
    pub(crate) fn new(task: String, resources: ResourceAccount) -> Self {
        VerificationReport {
            task,
            epsilon: 0.0,
            epsilon_lower: None,
            delta: None,
            delta_lower: None,
            bound_kind: BoundKind::ChoiExact,
            per_input: BTreeMap::new(),
            resources,
            claimed_bound: None,
            claim_satisfied: None,
        }
    }

    /// Attaches a claimed bound (from provenance) and records whether the
    /// measured error meets it.
    pub fn check_claim(&mut self, claimed: f64) {
        self.claimed_bound = Some(claimed);
        let mut ok = self.epsilon <= claimed + 1e-7;
        if let Some(d) = self.delta {
            ok = ok && d <= claimed.max(self.claimed_bound.unwrap_or(0.0)) + 1e-7;
        }
        self.claim_satisfied = Some(ok);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Options shared by every verifier.
#[derive(Debug, Clone)]
pub struct VerifyOpts {
    pub cap: usize,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts { cap: crate::DEFAULT_DIM_CAP }
    }
}

impl VerifyOpts {
    pub(crate) fn exec(&self) -> ExecConfig {
        ExecConfig { cap: self.cap, record_transcript: false }
    }
}

/// Dispatches to the verifier matching the protocol's declared task.
pub fn verify(p: &NLQCProtocol, dec: &DecoderBundle, opts: &VerifyOpts) -> QResult<VerificationReport> {
    match &p.task {
        TaskInstance::FRoute { .. } => verify_froute(p, dec, opts),
        TaskInstance::FMeasure { .. } => verify_fmeasure(p, dec, opts),
        TaskInstance::Cdqs { .. } => verify_cdqs(p, dec, opts),
        TaskInstance::CdqsPrime { .. } => verify_cdqs_prime(p, dec, opts),
        TaskInstance::CfPhase { .. } | TaskInstance::CfUnitary { .. } | TaskInstance::CfSwap { .. } => {
            verify_cf_unitary(p, opts)
        }
        TaskInstance::Distinguish { .. } => verify_distinguish(p, opts),
        TaskInstance::Interchange { .. } => verify_interchange(p, opts),
        TaskInstance::Opaque(name) => Err(QError::TaskMismatch {
            expected: "a verifiable task".into(),
            found: name.clone(),
        }),
    }
}
