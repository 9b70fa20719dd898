//! A desk-scale laboratory for Boolean-valued models of two-sort bounded arithmetic
//! built from circuit algebras.

pub mod circuit;
pub mod corpus;
pub mod error;
pub mod formula;
pub mod generic;
pub mod instances;
pub mod limits;
pub mod mcv;
pub mod proof;
pub mod random;
pub mod suite;
pub mod translate;

pub use error::{Error, Result};
pub use limits::Limits;
