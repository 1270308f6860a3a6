//! Strongly abelian congruences of finite algebras, decomposition boxmaps,
//! the sorted algebras built from a congruence and its coordinatized
//! classes, and the first-order encoding of bipartite graphs into the
//! variety of the flat sorted algebra.

pub mod algebra;
pub mod boxmap;
pub mod commands;
pub mod congruence;
pub mod error;
pub mod examples;
pub mod format;
pub mod interp;
pub mod sorted;
pub mod termset;
pub mod util;

pub use algebra::{FiniteAlgebra, Limits, Term, TermOperation};
pub use congruence::Congruence;
pub use error::{Error, Result};
