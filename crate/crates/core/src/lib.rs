//! Exact arithmetic in imaginary quadratic fields, and finiteness of the
//! points with finite `alpha`-adic expansion lying on a self-similar set
//! `S = { sum a_k beta^-k }`.
//!
//! Everything is generic over the integer type (see [`scalar::Int`]); the
//! aliases below fix it to [`BigInt`].

pub mod cns;
pub mod error;
pub mod fractal;
pub mod ideals;
pub mod intersection;
pub mod membership;
pub mod ordercalc;
pub mod quadring;
pub mod scalar;

pub use num_bigint::BigInt;

pub use error::{Error, Result};
pub use intersection::{Mode, TheoremCase, DEFAULT_CAP};
pub use quadring::{BasisKind, FieldSpec};
pub use scalar::Int;

pub type Element = quadring::QuadInt<BigInt>;
pub type Point = quadring::FieldElem<BigInt>;
pub type Ideal = ideals::IdealHnf<BigInt>;
pub type Prime = ideals::PrimeIdeal<BigInt>;
pub type Factorization = ideals::ElementFactorization<BigInt>;
pub type Ifs = fractal::IfsSpec<BigInt>;
pub type Coding = membership::Coding<BigInt>;
pub type IntersectionReport = intersection::IntersectionReport<BigInt>;
pub type Cns = cns::CnsBasis<BigInt>;
