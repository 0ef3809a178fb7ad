use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{complex_gaussian, real_gaussian, seeded};

const MC_CHUNK: usize = 4096;

/// All perfect matchings of `{0, …, 2n-1}`.
pub fn pairings(len: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(acc.clone());
            return;
        };
        for (i, &partner) in tail.iter().enumerate() {
            let remaining: Vec<usize> = tail.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            acc.push((first, partner));
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if len % 2 == 0 {
        let all: Vec<usize> = (0..len).collect();
        go(&all, &mut Vec::new(), &mut out);
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Word with index `idx` in base `d`, most significant letter first.
pub fn word(idx: usize, d: usize, len: usize) -> Vec<usize> {
    let mut w = vec![0; len];
    let mut r = idx;
    for slot in w.iter_mut().rev() {
        *slot = r % d;
        r /= d;
    }
    w
}

/// `Σ_{π ∈ Π[2n]} |π⟩` as a vector over words of length `2n`.
pub fn real_pairing_tensor(d: usize, n: usize) -> Vec<f64> {
    let ps = pairings(2 * n);
    let len = d.pow(2 * n as u32);
    (0..len)
        .map(|i| {
            let w = word(i, d, 2 * n);
            ps.iter().filter(|p| p.iter().all(|&(a, b)| w[a] == w[b])).count() as f64
        })
        .collect()
}

/// `Σ_σ P_σ = n! P_sym` as a `d^n × d^n` matrix, row-major.
pub fn complex_permutation_sum(d: usize, n: usize) -> Vec<f64> {
    let perms = permutations(n);
    let len = d.pow(n as u32);
    let mut out = vec![0.0; len * len];
    for r in 0..len {
        let wr = word(r, d, n);
        for c in 0..len {
            let wc = word(c, d, n);
            out[r * len + c] = perms.iter().filter(|s| (0..n).all(|a| wr[a] == wc[s[a]])).count() as f64;
        }
    }
    out
}

/// Comparison of combinatorial Gaussian moment formulas with Monte Carlo estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WickReport {
    pub d: usize,
    pub n: usize,
    pub pairings: usize,
    pub permutations: usize,
    pub samples: usize,
    pub seed: u64,
    pub real_components: usize,
    pub complex_components: usize,
    pub real_max_sigma: f64,
    pub complex_max_sigma: f64,
    pub real_max_abs: f64,
    pub complex_max_abs: f64,
    pub pass: bool,
}

struct Moments {
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Moments {
    fn zeros(len: usize) -> Self {
        Self { sum: vec![0.0; len], sq: vec![0.0; len] }
    }

    fn push(&mut self, i: usize, v: f64) {
        self.sum[i] += v;
        self.sq[i] += v * v;
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.sum.iter_mut().zip(other.sum) {
            *a += b;
        }
        for (a, b) in self.sq.iter_mut().zip(other.sq) {
            *a += b;
        }
        self
    }

    /// Largest `|mean - exact| / stderr` and largest `|mean - exact|`.
    fn compare(&self, exact: &[f64], samples: usize) -> (f64, f64) {
        let nf = samples as f64;
        let mut zmax: f64 = 0.0;
        let mut amax: f64 = 0.0;
        for (i, e) in exact.iter().enumerate() {
            let mean = self.sum[i] / nf;
            let var = (self.sq[i] / nf - mean * mean).max(0.0);
            let se = (var / nf).sqrt();
            let dev = (mean - e).abs();
            amax = amax.max(dev);
            let z = if se > 0.0 {
                dev / se
            } else if dev <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            zmax = zmax.max(z);
        }
        (zmax, amax)
    }
}

fn chunked<F>(samples: usize, seed: u64, len: usize, body: F) -> Moments
where
    F: Fn(&mut crate::sampling::SeededRng, &mut Moments) + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = seeded(seed.wrapping_add(ci as u64));
            let mut m = Moments::zeros(len);
            for _ in 0..MC_CHUNK.min(samples - ci * MC_CHUNK) {
                body(&mut rng, &mut m);
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::zeros(len), Moments::merge)
}

/// `E[φ^{⊗2n}] = Σ_π |π⟩` for real standard Gaussians and
/// `E[(φφ^*)^{⊗n}] = n! P_sym` for complex Gaussians with `E|φ_i|² = 1`.
pub fn wick_check(d: usize, n: usize, samples: usize, seed: u64) -> Result<WickReport> {
    if d == 0 || d > 3 || n > 3 {
        return Err(Error::InvalidParameter(format!("wick check supports 1 <= d <= 3 and n <= 3, got d = {d}, n = {n}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("wick check needs at least 2 samples".into()));
    }
    let real_exact = real_pairing_tensor(d, n);
    let rlen = real_exact.len();
    let real_words: Vec<Vec<usize>> = (0..rlen).map(|i| word(i, d, 2 * n)).collect();
    let real = chunked(samples, seed, rlen, |rng, m| {
        let phi = real_gaussian(rng, d);
        for (i, w) in real_words.iter().enumerate() {
            m.push(i, w.iter().map(|&l| phi[l]).product());
        }
    });
    let (real_max_sigma, real_max_abs) = real.compare(&real_exact, samples);

    let complex_exact = complex_permutation_sum(d, n);
    let clen = d.pow(n as u32);
    let cwords: Vec<Vec<usize>> = (0..clen).map(|i| word(i, d, n)).collect();
    let complex = chunked(samples, seed.wrapping_add(1 << 32), 2 * clen * clen, |rng, m| {
        let phi = complex_gaussian(rng, d);
        let col: Vec<_> = cwords.iter().map(|w| w.iter().map(|&l| phi[l]).product::<crate::scalar::C64>()).collect();
        for r in 0..clen {
            for c in 0..clen {
                let v = col[r] * col[c].conj();
                m.push(2 * (r * clen + c), v.re);
                m.push(2 * (r * clen + c) + 1, v.im);
            }
        }
    });
    let complex_exact_split: Vec<f64> = complex_exact.iter().flat_map(|&v| [v, 0.0]).collect();
    let (complex_max_sigma, complex_max_abs) = complex.compare(&complex_exact_split, samples);

    Ok(WickReport {
        d,
        n,
        pairings: pairings(2 * n).len(),
        permutations: permutations(n).len(),
        samples,
        seed,
        real_components: rlen,
        complex_components: clen * clen,
        real_max_sigma,
        complex_max_sigma,
        real_max_abs,
        complex_max_abs,
        pass: real_max_sigma <= 4.0 && complex_max_sigma <= 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::odd_double_factorial;
    use crate::symspace::SymIndex;
    use num::ToPrimitive;

    #[test]
    fn pairing_counts() {
        assert_eq!(pairings(4).len(), 3);
        assert_eq!(pairings(0).len(), 1);
        for n in 1..=4 {
            assert_eq!(pairings(2 * n).len(), odd_double_factorial(n).to_usize().unwrap());
        }
    }

    #[test]
    fn real_tensor_matches_gaussian_moments() {
        // E[φ^α] for a standard Gaussian is Π (α_i - 1)!! over even exponents
        let (d, n) = (2, 2);
        let t = real_pairing_tensor(d, n);
        for (i, v) in t.iter().enumerate() {
            let a = SymIndex::of_word(&word(i, d, 2 * n), d);
            let expect: f64 = if a.exponents().iter().any(|e| e % 2 == 1) {
                0.0
            } else {
                a.exponents().iter().map(|&e| odd_double_factorial(e as usize / 2).to_f64().unwrap()).product()
            };
            assert_eq!(*v, expect);
        }
    }

    #[test]
    fn permutation_sum_is_type_factorial() {
        let (d, n) = (3, 3);
        let m = complex_permutation_sum(d, n);
        let len = d.pow(n as u32);
        for r in 0..len {
            for c in 0..len {
                let (a, b) = (SymIndex::of_word(&word(r, d, n), d), SymIndex::of_word(&word(c, d, n), d));
                let expect = if a == b { a.factorial_product().to_f64().unwrap() } else { 0.0 };
                assert_eq!(m[r * len + c], expect);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees() {
        let r = wick_check(2, 2, 40_000, 11).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.real_components, 16);
        let r1 = wick_check(3, 1, 20_000, 3).unwrap();
        assert!(r1.pass, "{r1:?}");
    }

    #[test]
    fn rejects_large_sizes() {
        assert!(wick_check(4, 2, 100, 1).is_err());
        assert!(wick_check(2, 4, 100, 1).is_err());
    }
}
