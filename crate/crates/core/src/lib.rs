//! Lower bounds for hypergraph Ramsey numbers `r_k(p, q)`.
//!
//! * [`pcv`]: primal cardinality vectors and their families.
//! * [`pasting`]: pasting CNFs, their decoding and verification, and the
//!   hand-constructed colorings.
//! * [`sat`]: CNF type, complete and local-search solvers, DIMACS.
//! * [`direct`]: the hyperedge-per-variable encoding and certificates.
//! * [`bounds`]: the recurrence engine producing bound tables.

pub mod bounds;
pub mod direct;
pub mod error;
pub mod pasting;
pub mod pcv;
pub mod sat;

pub use error::{Error, Result};
