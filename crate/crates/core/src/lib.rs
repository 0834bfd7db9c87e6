//! Finite k-cyclic modal pseudocomplemented De Morgan algebras.
//!
//! * [`algebra`]: operation tables, generators, products, closure,
//!   subalgebra and automorphism enumeration.
//! * [`spectrum`]: prime elements, the Birula–Rasiowa map, component
//!   classification and signatures.
//! * [`morphisms`]: S-functions, their induced epimorphisms, brute-force
//!   homomorphism search and the factorial counting formulas.
//! * [`freealg`]: divisor combinatorics, α coefficients and free-algebra
//!   cardinalities.
//! * [`io`]: the two JSON shapes for algebras.
//! * [`par`]: data-parallel helpers with a sequential fallback.

pub mod algebra;
mod dec;
pub mod error;
pub mod freealg;
pub mod io;
pub mod morphisms;
pub mod par;
pub mod spectrum;

pub use algebra::{ElementId, FiniteAlgebra, GeneratorKind};
pub use error::{Error, Result};
