//! Exact q-series laboratory core: truncated Laurent series in q^(1/D) over
//! arbitrary-precision rationals, a small description language for
//! q-hypergeometric summands, named series builders, tail-sum renormalization,
//! and exact evaluation at roots of unity in cyclotomic fields.
//!
//! The crate is `no_std` (with `alloc`): every value is immutable after
//! construction, every operation is a pure function, and all arithmetic is
//! exact. Floating-point evaluation, file formats, and the CLI live in the
//! companion `qlab` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod biseries;
pub mod catalog;
pub mod cyclotomic;
pub mod dsl;
pub mod renorm;
pub mod series;

mod error;

pub use biseries::BiSeries;
pub use catalog::{MonomialParam, ThetaChar, ThetaDescriptor, ThetaKind};
pub use cyclotomic::{
    cohen_check, cyclotomic_poly, eval_terminating, finiteness_scan, phi, primitive_residues,
    zagier_phi, CycNum, RootValue,
};
pub use dsl::{LinFactor, PochFactor, Position, SignMode, TermDescriptor};
pub use error::CoreError;
pub use series::{Exp, QSeries, Rat};

/// Shorthand for an integer rational coefficient.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Shorthand for a rational coefficient n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Shorthand for an integer exponent.
pub fn exp_int(n: i64) -> Exp {
    Exp::from_integer(n)
}

/// Shorthand for a rational exponent n/d.
pub fn exp(n: i64, d: i64) -> Exp {
    Exp::new(n, d)
}
