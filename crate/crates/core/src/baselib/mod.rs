//! Concrete exact protocols that seed every transformation chain:
//! teleportation, nonlocal two-qubit gates from one EPR pair, the universal
//! coherent-phase construction from the GF(2) rank factorization, garden-hose
//! routing, embezzlement states, and the Bell-phase distinguisher.

mod cfphase;
mod distinguisher;
mod embezzle;
mod gardenhose;
mod nonlocal;
mod swap;

pub use cfphase::universal_cfphase;
pub use distinguisher::bell_phase_distinguisher;
pub use embezzle::{
    embezzlement_deviation, embezzlement_state, extraction_isometries, EmbezzleSpec,
};
pub use gardenhose::{find_strategy, garden_hose_froute, GardenHoseStrategy};
pub use nonlocal::{nonlocal_gate_via_epr, teleport_protocol, NonlocalGate};
pub use swap::{universal_cfswap, universal_froute};

use crate::boolfn::TruthTable;
use crate::error::{QError, QResult};
use crate::tasks::DecoderBundle;

/// Baseline registry addressable by name from chain specs.
pub fn build_baseline(
    name: &str,
    f: &TruthTable,
) -> QResult<(crate::engine::NLQCProtocol, DecoderBundle)> {
    match name {
        "universal_cfphase" => Ok((universal_cfphase(f)?, DecoderBundle::default())),
        "universal_cfswap" => universal_cfswap(f),
        "universal_froute" => universal_froute(f),
        "cz_epr" => Ok((
            nonlocal_gate_via_epr(NonlocalGate::Cz)?,
            DecoderBundle::default(),
        )),
        "teleport" => teleport_protocol(),
        other => {
            if let Some(strategy_name) = other.strip_prefix("garden_hose:") {
                let strategy = match strategy_name {
                    "auto" => find_strategy(f, 4)?,
                    _ => {
                        return Err(QError::InvalidArgument(format!(
                            "unknown garden-hose strategy `{strategy_name}` (use `auto`)"
                        )))
                    }
                };
                garden_hose_froute(f, &strategy)
            } else {
                Err(QError::InvalidArgument(format!(
                    "unknown baseline `{other}`; known: universal_cfphase, universal_cfswap, \
                     universal_froute, garden_hose:auto, cz_epr, teleport"
                )))
            }
        }
    }
}
