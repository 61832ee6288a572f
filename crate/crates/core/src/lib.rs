//! Finite symplectic polar geometry over small prime fields.
//!
//! The crate enumerates isotropic Grassmannians of W(2n−1, p), builds base subsets
//! from symplectic bases, classifies their inexact and complement subsets, and
//! reconstructs a point embedding from a Grassmannian map that sends base subsets
//! to base subsets.

pub mod base_subset;
pub mod bases;
pub mod cache;
pub mod error;
pub mod field;
pub mod grassmannian;
pub mod linalg;
pub mod oracle;
pub mod reconstruction;
pub mod space;
pub mod suites;

pub use error::{Error, Result};
