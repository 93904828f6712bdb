//! Simulation and verification laboratory for one-round non-local quantum
//! computation (NLQC).
//!
//! The crate models two-party protocols that consist of a shared entangled
//! resource state, one round of local operations, a single simultaneous
//! exchange of registers, and local post-processing. On top of that execution
//! model it provides:
//!
//! - dense complex linear algebra over named, holder-tagged registers
//!   ([`qcore`]),
//! - entropic diagnostics and inequality checks ([`infotheory`]),
//! - Boolean functions and their GF(2) rank factorization ([`boolfn`]),
//! - the protocol engine with resource accounting and noise injection
//!   ([`engine`]),
//! - task definitions and verifiers that measure correctness and security
//!   errors ([`tasks`]),
//! - exact baseline protocols ([`baselib`]) and the constructive transformers
//!   between task classes ([`reductions`]),
//! - a batch chain runner and the acceptance suite ([`chain`], [`suite`]).

pub mod baselib;
pub mod boolfn;
pub mod chain;
pub mod engine;
pub mod error;
pub mod infotheory;
pub mod linalg;
pub mod protocol_io;
pub mod qcore;
pub mod reductions;
pub mod rng;
pub mod suite;
pub mod tasks;

pub use error::QError;

/// Default cap on the global Hilbert-space dimension (2^22).
pub const DEFAULT_DIM_CAP: usize = 1 << 22;

/// Global numerical tolerance for "exact" assertions.
pub const TOL: f64 = 1e-9;
