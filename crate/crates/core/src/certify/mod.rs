//! Degree bounds, certificate construction and verification, and the shifted Motzkin family.

mod bounds;
mod complex;
mod motzkin;
mod real;

use serde::{Deserialize, Serialize};

pub use bounds::{
    bound_n_complex, bound_n_numeric, bound_n_real, bound_n_real_numeric, complex_bracket, real_bracket, BoundReport, Field,
    DEFAULT_N_MAX,
};
pub use complex::{
    build_certificate, transform, transform_laplacian, CertBundle, CertOptions, MatrixParts, SosTerm, EIG_CLIP, POSITIVITY_TOL,
    RESIDUAL_TOL,
};
pub use motzkin::{eps_grid, motzkin_eps_threshold, motzkin_figure, motzkin_poly, MotzkinRow};
pub use real::{build_certificate_real, transform_real, RealCertBundle};

/// Whether the chosen degree meets a proven sufficient bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Proven,
    Empirical,
}
