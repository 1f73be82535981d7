//! Polynomial entanglement measures of pure three-qubit states.
//!
//! Bipartite concurrences `c_{a|bc}`, the W-measure `ω = 2‖T(ψ)‖` built from
//! the cubic FTS covariant, and the three-tangle `τ = 4|Det ψ|`, together with
//! SLOCC classification, the canonical-form maximizations and Monte-Carlo
//! checks of the ordering `0 ≤ τ ≤ nω ≤ n²c_{a|bc} ≤ n⁴`.

pub mod canonical;
pub mod classify;
pub mod error;
pub mod io;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod nelder_mead;
pub mod rng;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{SmallMatrix, C64};
pub use measures::{InvariantReport, Measures};
pub use tensor::{PureState, Qubit, TwoQubitState};
