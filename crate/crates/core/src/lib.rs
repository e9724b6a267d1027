//! The mod-p lambda algebra and the unstable E² pages it computes for odd
//! spheres, plus the arithmetic that covers the remaining dimensions of
//! `π_n(S²)`.

pub mod algebra;
pub mod cache;
pub mod cli;
pub mod coverage;
pub mod differential;
pub mod error;
pub mod fparith;
pub mod homology;
pub mod hopf;
pub mod rewrite;

pub use algebra::{basis, BasisKey, Generator, Ideal, Kind, Monomial};
pub use differential::SignConvention;
pub use error::{LambdaError, Result};
pub use fparith::{Fp, PrimeContext};
pub use rewrite::{Element, Lambda};
