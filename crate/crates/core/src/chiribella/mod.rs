//! Coefficient families `c, q, q̂, c_R, q_R` and the maps `MP`, `Φ`, `Ψ`, `Clone`.

mod coeffs;
mod maps;
mod verify;

pub use coeffs::{coeff_c, coeff_c_real, coeff_q, coeff_q_real, coeff_qhat, coeff_qhat_real, signum, CoeffTable};
pub use maps::{
    haar_moment, mp_design, real_sphere_moment, space_dim, MpRoute, Picture, SymLinearMap, TraceRoute,
};
pub use verify::{verify_chiribella, verify_real_identity, ChiribellaReport, RealIdentityReport};
