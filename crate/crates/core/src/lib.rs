//! Reznick-type sum-of-squares certificates for strictly positive bi-Hermitian
//! and real homogeneous forms.
//!
//! A positive form `p` of degree `k` is certified by writing
//! `‖x‖^{2(n-k)} p(x)` as a nonnegative combination of `2n`-th powers of
//! linear forms. The building blocks are
//!
//! * [`symspace`]: monomial bookkeeping, partial traces as Laplacians, evaluation;
//! * [`chiribella`]: exact coefficient families and the maps `MP`, `Φ`, `Ψ`, `Clone`;
//! * [`designs`]: complex spherical designs from Gauss–Laguerre nodes;
//! * [`certify`]: degree bounds and certificate construction;
//! * [`definetti`]: truncation errors of the exponential de Finetti expansion.

pub mod certify;
pub mod chiribella;
pub mod combinat;
pub mod definetti;
pub mod designs;
pub mod error;
pub mod io;
pub mod matrix;
pub mod sampling;
pub mod scalar;
pub mod symspace;

pub use error::{Error, Result};
pub use scalar::{ComplexRational, Rational, Scalar, C64};
