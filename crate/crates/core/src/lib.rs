//! Pliable index coding over prime fields.
//!
//! A server holds `m` messages and each of `n` clients wants any one message
//! outside its side information. This crate builds linear codes for that
//! setting and checks them:
//!
//! - [`bingreedy`]: the deterministic round-based greedy encoder;
//! - [`randomized`]: the degree-binned random baseline;
//! - [`decode`]: per-client decodability and value recovery;
//! - [`oracle`]: exhaustive optimal code length and fitted-matrix minrank;
//! - [`bench`]: the comparison harness.
//!
//! Messages and clients are 0-indexed.

pub mod bench;
pub mod bingreedy;
pub mod decode;
pub mod error;
pub mod field;
pub mod instance;
pub mod oracle;
pub mod randomized;
pub mod report;

pub use error::{Error, Result};
pub use field::{FMatrix, Field};
pub use instance::{ActiveSet, PliableInstance};
pub use report::RunReport;
