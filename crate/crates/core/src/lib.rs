//! Reconstruction, analysis and factorization of Fuchsian linear
//! differential operators from truncated power series.
//!
//! The toolkit is modular-first: series and operators live over 15-bit
//! prime fields, several primes are combined by Chinese remaindering, and
//! exact rational objects are recovered by bounded rational
//! reconstruction. The main pieces:
//!
//! - [`modarith`]: prime contexts, CRT, rational reconstruction
//! - [`series`]: truncated power series and ODE recurrences
//! - [`diffop`]: operator arithmetic, local exponents, log structure,
//!   p-curvature
//! - [`guess`]: annihilating-ODE search and the empirical N = dQ + qD - C
//!   count formula
//! - [`factor`]: exponent-following factorization sweeps
//! - [`elliptic`]: complete elliptic integral series and the K/E ansatz
//!   solver
//! - [`multiprime`]: multi-prime orchestration and operator
//!   reconstruction

pub mod diffop;
pub mod elliptic;
pub mod factor;
pub mod field;
pub mod guess;
mod linalg;
pub mod modarith;
pub mod multiprime;
pub mod poly;
pub mod series;

pub use field::{Field, Fp, Rationals};
pub use modarith::{PrimeContext, Rational, DEFAULT_PRIMES};
pub use poly::{Poly, RatFn};
