//! Supercommutative polynomial algebra over ℚ.
//!
//! Conventions: odd factors of a monomial are kept in chart order, products
//! pick up the sign of the sorting permutation, and `∂_θ` is the LEFT
//! derivative (move `θ` to the front, then strike it).

mod chart;
mod monomial;
mod parity;
mod poly;

pub use chart::{Chart, Coordinate, RESERVED_PREFIX};
pub use monomial::Monomial;
pub use parity::Parity;
pub use poly::{rational, SuperPolynomial};

pub(crate) use chart::same_chart;
pub(crate) use parity::odd;
