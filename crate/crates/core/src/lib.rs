//! Finite-horizon computations for group chains acting on rooted trees:
//! normal cores, discriminant towers and stable/wild verdicts, together with
//! the iterated wreath product and Baumslag–Solitar families.

pub mod bs;
pub mod chain;
pub mod error;
pub mod odometer;
pub mod perm;
pub mod tree;
pub mod wreath;

pub use error::{Error, Result};
