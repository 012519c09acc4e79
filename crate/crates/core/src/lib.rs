//! Reduced-rank adaptive interference suppression for DS-UWB uplinks.
//!
//! The crate contains the uplink signal model ([`uwb`]), full-rank linear
//! receivers ([`linear`]), the generic jointly optimized reduced-rank
//! scheme ([`generic`]), the switched approximation of adaptive basis
//! functions ([`saabf`]), automatic selection of its structural parameters
//! ([`order`]) and a seeded Monte-Carlo benchmark harness ([`bench`]).

pub mod bench;
pub mod error;
pub mod generic;
pub mod linalg;
pub mod linear;
pub mod order;
pub mod saabf;
pub mod uwb;

pub use error::{Error, Result};
