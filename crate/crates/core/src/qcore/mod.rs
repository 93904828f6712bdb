//! Dense complex linear algebra over named, holder-tagged registers: states,
//! isometries, channels, Choi matrices, and the distance measures used by the
//! verifiers.

mod channel;
mod gates;
mod layout;
mod metrics;
mod ops;
mod state;

pub use channel::{apply_channel, choi_of_channel, ChannelOp, ChoiMatrix};
pub use gates::*;
pub use layout::{Holder, Register, RegisterLayout};
pub use metrics::{channel_distance_bounds, fidelity, trace_distance, DistanceBounds};
pub use ops::{
    apply_on_registers, embed_square_op, partial_trace, partial_trace_pure, reorder_density,
    schmidt_decomposition, schmidt_matrix, IsometryOp, MatrixRep, SchmidtDecomposition,
};
pub use state::{DensityOperator, PureState};
