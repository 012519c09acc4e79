//! Switched approximations of adaptive basis functions.
//!
//! Each basis vector of the projection is a length-`q` segment of `ψ` placed
//! at a pre-stored offset. A book of `C` offset patterns is kept and the
//! filter switches, per symbol, to the pattern with the smallest
//! instantaneous error.

mod book;
mod filter;
mod mmse;

pub use book::{OffsetPolicy, PositionBook};
pub use filter::{project, psi_regressor, BranchDecision, SaabfAdaptation, SaabfFilter, SaabfMode, SaabfStep};
pub use mmse::{expand_psi, psi_moments, saabf_mmse_fixed_point, saabf_mse, FixedPoint};
