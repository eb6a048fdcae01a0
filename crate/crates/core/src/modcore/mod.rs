//! Exact arithmetic in Z/p^k together with the integer and modular matrices
//! the rest of the crate is built on.
//!
//! Vectors are rows and matrices act on the right: a linear map with matrix
//! `T` sends the row vector `v` to `v · T`.

mod matrix;
mod perm;
mod ring;

pub use matrix::{elementary_matrix, inv_unitriangular, perm_matrix, IntMatrix, ModMatrix};
pub use perm::{parse_cycles, Perm};
pub use ring::{is_prime, ModulusContext, ResidueVector, MAX_MODULUS, MAX_RANK};
