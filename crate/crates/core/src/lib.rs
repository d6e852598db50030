//! Exact Donaldson-Futaki invariants for flag-ideal test configurations of
//! polarized toric varieties.
//!
//! Two independent routes are provided:
//!
//! * [`weight`] counts Gₘ-weights directly. The total weight on the central
//!   fibre is minus the colength of `𝒥^K` inside the sections of `L^{rK}`,
//!   so every weight is an exact lattice-point count.
//! * [`intersection`] evaluates the closed intersection-number formula:
//!   a canonical divisor part built from `(Lⁿ)`, `(L^{n-1}.K_X)` and the
//!   top self-intersection of `𝓛(−E)`, plus a discrepancy term summed over
//!   the exceptional divisors of the normalized blow-up.
//!
//! All arithmetic is exact (machine integers for lattice data, arbitrary
//! precision rationals for everything derived from them).

pub mod cache;
pub mod cli;
pub mod error;
pub mod exact;
pub mod flag;
pub mod intersection;
pub mod io;
pub mod lab;
pub mod lattice;
mod linalg;
pub mod monomial;
pub mod newton;
pub mod poly;
pub mod report;
pub mod weight;

pub use error::{Error, NotStabilized, Result};
pub use exact::Rational;
pub use flag::{FlagIdeal, Mode, RawFlagIdeal, SupportClass};
pub use lattice::{LatticePolytope, PolarizedToricVariety};
pub use monomial::{Monomial, MonomialIdeal};
pub use newton::NewtonPolyhedron;
pub use poly::ExactPolynomial;
pub use report::{DfReport, Pipeline};

/// Version string mixed into cache keys.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
