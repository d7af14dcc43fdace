//! Exact symbolic computation on Q-manifolds: supercommutative polynomial
//! algebra, tensor fields with Koszul-signed operations, Lie and covariant
//! derivatives, the universal cocycle series and their cohomology.

pub mod algebra;
pub mod cocycles;
pub mod cohomology;
pub mod connection;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod models;
pub mod random;
pub mod tensor;

pub use algebra::{rational, Chart, Coordinate, Monomial, Parity, SuperPolynomial};
pub use connection::Connection;
pub use error::{Error, Result};
pub use lie::{apply_vector, bracket, check_homological, delta, lie_derivative, HomologicalField};
pub use tensor::{Endomorphism, TensorField, VectorField};
