//! Adams spectral sequence workbench.
//!
//! The crate computes the classical Adams E2 page as the homology of the
//! Lambda algebra, evaluates 3-fold Massey products with indeterminacy, and
//! closes chart-level fact bases under the Leibniz rule and the higher
//! Leibniz rule for Massey products, producing deduction logs, page turns,
//! and group-theoretic readings of E-infinity stems.

pub mod ext;
pub mod sseq;
pub mod f2;
pub mod lambda;
pub mod massey;
pub mod oracle;
