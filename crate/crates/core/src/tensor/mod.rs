//! Tensor fields over a chart and the endomorphism algebra `𝒯^{(1,1)}`.

mod derivation;
mod field;
mod ops;

pub(crate) use derivation::Derivation;
pub use field::{Endomorphism, TensorField, VectorField};
pub use ops::{
    contract, contract_product, endo_apply, endo_commutator, endo_compose, endo_power, from_first_slot_insertions,
    insert, supertrace, tensor_product,
};
