//! Configuration files, the correspondence expression language, seeded
//! stress suites and machine-readable reports on top of `corrdyn`.

pub mod config;
pub mod expr;
pub mod report;
pub mod sampling;
pub mod suite;
