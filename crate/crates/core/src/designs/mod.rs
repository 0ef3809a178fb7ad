//! Complex spherical designs built from Gauss–Laguerre moment atoms, and
//! numerical checks of the Hilbert identities and Gaussian Wick formulas.

mod construct;
mod hilbert;
mod laguerre;
mod wick;

pub use construct::{
    build_design, build_raw_design, cached_design, cached_design_strict, default_cache_dir, moment_atoms, moment_matrix, monte_carlo_design,
    verify_design, Construction, DesignAtom, DesignReport, RawDesign, SphericalDesign,
};
pub use hilbert::{real_sphere_power_integral, verify_hilbert_complex, verify_hilbert_complex_mc, verify_hilbert_real, HilbertReport, HilbertRoute};
pub use laguerre::{laguerre, laguerre_derivative, laguerre_nodes, vandermonde_weights, LaguerreData, MAX_NODES};
pub use wick::{complex_permutation_sum, pairings, permutations, real_pairing_tensor, wick_check, WickReport};
