//! Exact-arithmetic workbench for curves over finite fields.
//!
//! Everything in this crate is exact: prime and extension field elements,
//! univariate polynomials, places and divisors of the rational function
//! field, hyperelliptic Jacobians in Mumford form, zeta-function point
//! counting, and the recovery of a field embedding from a purely
//! multiplicative, order- and value-preserving embedding of unit groups.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `anabelia` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod counting;
pub mod curve;
pub mod field;
pub mod func;
pub mod jacobian;
pub mod lattice;
pub mod mobius;
pub mod mumford;
pub mod oracle;
pub mod poly;
pub mod recover;
pub mod residue;
pub mod rng;
pub mod tower;
pub mod zeta;

pub use field::{FieldElement, FieldSpec};
pub use func::{Divisor, Place, RationalFunction};
pub use poly::Polynomial;
