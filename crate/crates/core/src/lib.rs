//! Exact computations with mod-n Galois images of elliptic curves.
//!
//! Subgroups of GL(2, Z/n) live in [`modmat`]; entanglement between division
//! fields is in [`entangle`]; curves, families and division polynomials are in
//! [`eqcurves`] and [`qpoly`]; [`frobsample`] tests candidate images against
//! point counts. The guide under `book/` walks through each of these.

pub mod arith;
pub mod entangle;
pub mod eqcurves;
pub mod error;
pub mod fixtures;
pub mod field;
pub mod frobsample;
pub mod gaussperiod;
pub mod group;
pub mod json;
pub mod modmat;
pub mod poly;
pub mod polyfp;
pub mod qpoly;
pub mod ratfunc;
pub mod stdgroups;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/standard-groups.md")]
    mod standard_groups {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/frobenius.md")]
    mod frobenius {}
    #[doc = include_str!("../../../book/src/periods.md")]
    mod periods {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
