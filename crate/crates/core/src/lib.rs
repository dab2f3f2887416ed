//! Labeled countable closed linear orders: a term language, embeddability,
//! Cantor-Bendixson ranks, and Goedel logics over closed sets of reals.

pub mod embed;
pub mod error;
pub mod explore;
pub mod goedel;
pub mod qo;
pub mod syntax;
pub mod term;

pub use error::{Error, Result};
