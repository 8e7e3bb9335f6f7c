//! Exact cohomological models of abelian varieties built from elliptic curves,
//! effective finite correspondences acting on them, and certified spectral
//! invariants of those actions.
//!
//! Everything is computed over arbitrary-precision rationals. Irrational
//! quantities such as spectral radii are returned as rational intervals that
//! provably contain the true value.

pub mod abelian;
pub mod correspondence;
pub mod error;
pub mod exterior;
pub mod interval;
pub mod linalg;
pub mod numerics;
pub mod poly;
pub mod spectral;

pub use abelian::{AbelianVariety, EndOrder, EndomorphismMatrix, Factor, OrderElement};
pub use correspondence::{Atom, Correspondence, DegreeSequence, GradedAction, Word};
pub use error::{Error, Result};
pub use exterior::{BasisIndex, CohomologyModel, GradedClass};
pub use interval::Interval;
pub use linalg::{rat, ratio, Matrix, Rat};
pub use poly::Poly;
pub use spectral::dynamics::Verdict;
