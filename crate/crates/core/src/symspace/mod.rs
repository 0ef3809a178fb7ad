//! Symmetric-subspace index algebra and the polynomial picture of operators.

mod bernstein;
mod biform;
mod extrema;
mod herm;
mod index;
mod realpoly;
pub mod tensor;

pub use bernstein::{bernstein_check, bernstein_check_real, BernsteinReport};
pub use biform::BiForm;
pub use extrema::{estimate_extrema, estimate_extrema_real, ExtremaEstimate, ExtremaOptions};
pub use herm::HermOp;
pub use index::{power_table, SymBasis, SymIndex};
pub use realpoly::RealSymPoly;
