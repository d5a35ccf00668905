//! Symbolic toolkit for multidimensional Poisson vertex algebras: exact
//! differential-polynomial arithmetic, λ-brackets of rank `d`, the bracket
//! catalog of hydrodynamic normal forms, and the symmetry/deformation engine
//! built on top of them.

pub mod atom;
pub mod catalog;
pub mod cond;
pub mod defo;
pub mod diff;
pub mod error;
pub mod fixtures;
pub mod gauss;
pub mod gcd;
pub mod lambda;
pub mod multi;
pub mod parse;
pub mod print;
pub mod sample;
pub mod scalar;
pub mod verify;

pub use error::PvaError;
