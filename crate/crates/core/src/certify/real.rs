use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{bound_n_real, BoundReport};
use super::complex::{CertOptions, POSITIVITY_TOL, RESIDUAL_TOL};
use super::Regime;
use crate::chiribella::{MpRoute, Picture, SymLinearMap};
use crate::combinat::real_dim_const;
use crate::error::{Error, Result};
use crate::io::CoeffTerm;
use crate::sampling::{norm_r, real_gaussian, real_sphere, seeded};
use crate::scalar::Rational;
use crate::symspace::{estimate_extrema_real, ExtremaOptions, RealSymPoly};

/// A real certificate `‖x‖^{2(n-k)} p_v(x) = ∫ p_ṽ(φ) ⟨φ,x⟩^{2n} dφ` with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealCertBundle {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub regime: Regime,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub bounds: BoundReport,
    /// Exact coefficients of `ṽ = d_R[n+k] Ψ^R(v)`.
    pub v_tilde: Vec<CoeffTerm>,
    /// `tr*_{k→n}(v) = MP^R_{k→n}(Ψ^R(v))` holds exactly.
    pub exact_identity: bool,
    /// Smallest sampled (and locally refined) value of `p_ṽ` on the sphere.
    pub min_eval: f64,
    pub samples: usize,
    /// Worst relative residual of the reconstruction identity at random points.
    pub residual: f64,
    pub check_points: usize,
    pub positive: bool,
    pub pass: bool,
}

/// `ṽ = d_R[n+k] Ψ^R_{k→k}(v)`.
pub fn transform_real(v: &RealSymPoly<Rational>, n: usize) -> Result<RealSymPoly<Rational>> {
    let psi = SymLinearMap::psi(n, v.k(), v.d(), Picture::Real)?;
    Ok(psi.apply_poly(v)?.scale(&real_dim_const(v.d(), n + v.k())))
}

pub fn build_certificate_real(v: &RealSymPoly<Rational>, opts: &CertOptions) -> Result<RealCertBundle> {
    let (d, k) = (v.d(), v.k());
    if k == 0 {
        return Err(Error::InvalidParameter("certificate needs k >= 1".into()));
    }
    let (m, big_m) = match (opts.m, opts.big_m) {
        (Some(m), Some(big_m)) => (m, big_m),
        (m, big_m) => {
            let est = estimate_extrema_real(v, &opts.extrema);
            (m.unwrap_or(est.min), big_m.unwrap_or(est.max))
        }
    };
    if !(m > 0.0) {
        return Err(Error::NotPositive(m));
    }
    let bounds = bound_n_real(d, k, m, big_m, opts.n_max)?;
    let n = opts.n.unwrap_or_else(|| bounds.recommended());
    if n < k {
        return Err(Error::InvalidParameter(format!("n = {n} must be at least k = {k}")));
    }
    let proven_at = bounds.numeric.unwrap_or(bounds.general);
    let regime = if n >= proven_at { Regime::Proven } else { Regime::Empirical };

    let psi = SymLinearMap::psi(n, k, d, Picture::Real)?;
    let psi_v = psi.apply_poly(v)?;
    let v_tilde = psi_v.scale(&real_dim_const(d, n + k));
    let mp = SymLinearMap::mp(k, n, d, Picture::Real, MpRoute::HaarMoments)?;
    let rebuilt = mp.apply_poly(&psi_v)?;
    let lifted = v.trace_adjoint(n)?;
    let exact_identity = rebuilt == lifted;

    let vt = v_tilde.to_f64();
    let ext = estimate_extrema_real(&vt, &ExtremaOptions { seed: opts.seed, ..opts.extrema.clone() });
    let mut rng = seeded(opts.seed);
    let extra: Vec<Vec<f64>> = (0..opts.extra_samples).map(|_| real_sphere(&mut rng, d)).collect();
    let min_extra = extra.par_iter().map(|x| vt.eval(x)).reduce(|| f64::INFINITY, f64::min);
    let min_eval = ext.min.min(min_extra);
    let positive = min_eval >= -POSITIVITY_TOL;

    let vf = v.to_f64();
    let rf = rebuilt.to_f64();
    let residual = (0..opts.check_points)
        .map(|_| real_gaussian(&mut rng, d))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| {
            let lhs = norm_r(x).powi(2 * (n - k) as i32) * vf.eval(x);
            ((lhs - rf.eval(x)) / lhs.abs().max(f64::MIN_POSITIVE)).abs()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);

    let pass = exact_identity && residual <= RESIDUAL_TOL && (positive || regime == Regime::Empirical);
    Ok(RealCertBundle {
        d,
        k,
        n,
        regime,
        m,
        big_m,
        bounds,
        v_tilde: CoeffTerm::from_poly(&v_tilde),
        exact_identity,
        min_eval,
        samples: opts.extrema.samples + opts.extra_samples,
        residual,
        check_points: opts.check_points,
        positive,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::motzkin_poly;
    use crate::chiribella::TraceRoute;
    use crate::scalar::q;

    #[test]
    fn norm_power_is_flat() {
        let v = RealSymPoly::<Rational>::norm_power(3, 2);
        let vt = transform_real(&v, 4).unwrap();
        let vf = vt.to_f64();
        let mut rng = seeded(1);
        let c = vf.eval(&real_sphere(&mut rng, 3));
        for _ in 0..20 {
            assert!((vf.eval(&real_sphere(&mut rng, 3)) - c).abs() < 1e-10 * c.abs());
        }
        assert!(c > 0.0);
    }

    #[test]
    fn matrix_identity_small() {
        for n in 3..=5 {
            let tr = SymLinearMap::trace_adjoint(3, 3, n, Picture::Real, TraceRoute::Laplacian).unwrap();
            let mp = SymLinearMap::mp(3, n, 3, Picture::Real, MpRoute::HaarMoments).unwrap();
            let psi = SymLinearMap::psi(n, 3, 3, Picture::Real).unwrap();
            assert_eq!(mp.compose(&psi).unwrap(), tr, "n={n}");
        }
    }

    #[test]
    fn motzkin_certificate() {
        let eps = q(1, 2);
        let v = motzkin_poly(&eps);
        let opts = CertOptions { m: Some(0.5), big_m: Some(0.5 + 4.0 / 27.0), ..Default::default() };
        let cert = build_certificate_real(&v, &opts).unwrap();
        assert!(cert.exact_identity);
        assert_eq!(cert.regime, Regime::Proven);
        assert!(cert.pass && cert.positive, "{} {}", cert.min_eval, cert.residual);
    }
}
