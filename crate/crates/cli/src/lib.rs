//! Support pieces for the `symtest` binary: embedded datasets, input-file
//! parsing, and number formatting. Kept in a library so the integration
//! tests can reach them.

pub mod fixture;
pub mod format;
pub mod input;
