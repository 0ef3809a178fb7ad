//! Seeded Gaussian and sphere sampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::C64;

/// Seed used whenever a caller does not provide one.
pub const DEFAULT_SEED: u64 = 20_190_415;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real_gaussian<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// i.i.d. complex Gaussians with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng>(rng: &mut R, d: usize) -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..d)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// Uniform point on the real unit sphere (normalized Gaussian).
pub fn real_sphere<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v = real_gaussian(rng, d);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point on the complex unit sphere of `C^d`.
pub fn complex_sphere<R: Rng>(rng: &mut R, d: usize) -> Vec<C64> {
    loop {
        let v = complex_gaussian(rng, d);
        let n = norm_c(&v);
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn norm_c(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_r(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn inner_c(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = seeded(7);
        for d in 1..5 {
            assert!((norm_r(&real_sphere(&mut rng, d)) - 1.0).abs() < 1e-14);
            assert!((norm_c(&complex_sphere(&mut rng, d)) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = real_gaussian(&mut seeded(3), 10);
        let b = real_gaussian(&mut seeded(3), 10);
        assert_eq!(a, b);
    }
}
