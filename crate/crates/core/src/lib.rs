//! Quasi-Stirling and Stirling permutations of multisets, their companion
//! ordered labeled trees, and exact partial gamma expansions of the
//! `(asc, des, plat)` polynomials.
//!
//! Polynomials are generic over an exact integer [`Coefficient`]; the
//! aliases below fix the common choices.

pub mod bijection;
pub mod error;
pub mod fs_action;
pub mod gamma;
pub mod poly;
pub mod trees;
pub mod verify;
pub mod words;

pub use bijection::{phi, phi_inverse};
pub use error::{Error, Result};
pub use gamma::{Family, GammaTable};
pub use poly::{Coefficient, Poly, Poly2, Poly3};
pub use trees::{Tree, TreeStats, VertexClass, VertexRef};
pub use words::{Multiset, Word};

pub use num_bigint::BigInt;

pub type Poly3I64 = Poly3<i64>;
pub type Poly2I64 = Poly2<i64>;
pub type GammaTableI64 = GammaTable<i64>;

pub type Poly3Big = Poly3<BigInt>;
pub type Poly2Big = Poly2<BigInt>;
pub type GammaTableBig = GammaTable<BigInt>;
