//! Exact hybridness analysis for p-adic group rings `Z_p[G]` and for
//! one-dimensional Iwasawa algebras `Lambda(H x| Gamma)`.
//!
//! Groups are finite multiplication tables, characters carry exact values
//! in cyclotomic fields, and every verdict records the rule that produced it.

pub mod arith;
pub mod character;
pub mod cyclo;
pub mod eimc;
pub mod error;
pub mod frobenius;
pub mod group;
pub mod hybrid;
pub mod iwasawa;

pub use error::{Error, Result};
