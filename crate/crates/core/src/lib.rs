//! Modular data of rational chiral theories, fusion rules, statistics
//! matrices, and exhaustive enumeration and structural classification of
//! modular-invariant coupling matrices.
//!
//! ```
//! use modinv::invariants::{enumerate_invariants, EnumerationConstraints};
//! use modinv::modular_data::su2_modular_data;
//!
//! let md = su2_modular_data(4).unwrap();
//! let found = enumerate_invariants(&md, &md, &EnumerationConstraints::default()).unwrap();
//! assert_eq!(found.invariants.len(), 2);
//! ```

pub mod cli;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod modular_data;
pub mod report;
pub mod statistics;
pub mod structure;

pub use error::{Error, Result};
