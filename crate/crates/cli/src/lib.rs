//! Command-line front end for `ht-rational`: node documents, verification, factorization,
//! constructors and the self-test.

pub mod commands;
pub mod document;
pub mod error;
pub mod selftest;

pub use commands::run;
pub use error::{exit, CliError};
