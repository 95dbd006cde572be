//! Exact-arithmetic construction and verification of Cantor-type subsets of
//! badly approximable points in `[0,1]^d`.
//!
//! The crate builds a nested family of surviving grid cubes by pruning away
//! thickened rational hyperplanes stage by stage, extracts the rationals
//! that lead the pruning, transfers mass onto a tree of balls centered at
//! those rationals, and verifies measure, covering, and dimension
//! properties of the result — all decisions are made in exact rational
//! arithmetic (irrational radii are compared through integer powers).

pub mod checkpoint;
pub mod cube;
pub mod enumerate;
pub mod error;
pub mod flat;
pub mod lp;
pub mod params;
pub mod power;
pub mod pruning;
pub mod transfer;
pub mod rational;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
