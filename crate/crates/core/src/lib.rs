//! Finite abelian p-group regular branched covers of the 2-sphere.
//!
//! A cover branched over `n` points is an epimorphism `φ` from
//! `H_1(S^2 minus n points)` onto a finite abelian p-group `A` with
//! `φ(x_1) + ... + φ(x_n) = 0`. Every homeomorphism preserving the branch
//! set lifts exactly when the kernel of the induced map on
//! `H_1(-; Z/p^k) ≅ (Z/p^k)^{n-1}` is invariant under all permutations of the
//! branch classes. This crate represents those kernels exactly, decides the
//! invariance, and classifies the fully liftable covers for small parameters.
//!
//! Layout:
//! - [`modcore`]: Z/p^k arithmetic, integer and modular matrices, permutations.
//! - [`subgroups`]: Howell-reduced subgroups and the `⟨PQω⟩` normal form.
//! - [`action`]: the S_{b+1} action, the divisibility criterion, liftability.
//! - [`covers`]: cover descriptions, kernels, equivalence, CRT splitting.
//! - [`census`]: exhaustive classification and the closed-form prediction.
//! - [`cli`]: the `liftcov` command line.

pub mod action;
pub mod census;
pub mod cli;
pub mod covers;
pub mod error;
pub mod modcore;
pub mod subgroups;

pub use error::{CoverIssue, Error, Result};
