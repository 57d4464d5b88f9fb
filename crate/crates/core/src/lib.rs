//! Exact computation of complexity invariants for torus-invariant log pairs.
//!
//! A toric variety is described by a [`fan::Fan`]; torus-invariant divisors are
//! rational coefficient vectors indexed by the fan's rays. On top of that the
//! crate computes class groups, Cartier data and nefness ([`divisor`]), the
//! complexity, fine complexity and orbifold complexity of a pair together with
//! an exact minimizer ([`complexity`]), adjunction along an invariant divisor
//! ([`adjunction`]), checks for toric birational surgeries ([`birational`]) and
//! the orbifold-cone / Cox-monoid description of plt blow-ups ([`conecox`]).
//!
//! Everything is exact: integers are arbitrary precision and rationals are
//! always normalized.

pub mod adjunction;
pub mod birational;
pub mod complexity;
pub mod conecox;
pub mod divisor;
pub mod fan;
pub mod lattice;
pub mod num;
pub mod pair;
pub mod par;

pub use num::{Int, Rat};
