//! Seeded samplers. Every random stream is a ChaCha8 generator keyed by a
//! 64-bit seed; parallel work items derive child seeds with [`child_seed`], so
//! results never depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::Tensor;

pub type SeededRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of task `index` under `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sign(rng: &mut impl Rng) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn sign_vector(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| sign(rng)).collect()
}

pub fn gaussian_vector(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

/// Uniform point on the Euclidean unit sphere of `R^dim`.
pub fn sphere_direction(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian_vector(rng, dim);
        let norm = crate::lp::l2_norm(&v);
        if norm > 1e-300 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Tensor with independent symmetric ±1 entries.
pub fn sample_sign_tensor(order: usize, n: usize, seed: u64) -> Tensor {
    let mut r = rng(seed);
    let mut t = Tensor::zeros(order, n);
    t.entries_mut().iter_mut().for_each(|e| *e = sign(&mut r));
    t
}

/// Tensor with independent standard Gaussian entries.
pub fn sample_gaussian_tensor(order: usize, n: usize, seed: u64) -> Tensor {
    let mut r = rng(seed);
    let mut t = Tensor::zeros(order, n);
    t.entries_mut().iter_mut().for_each(|e| *e = gaussian(&mut r));
    t
}

pub fn sample_sphere_direction(dim: usize, seed: u64) -> Vec<f64> {
    sphere_direction(&mut rng(seed), dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_tensor_entries_and_determinism() {
        let a = sample_sign_tensor(3, 4, 17);
        assert!(a.entries().iter().all(|&v| v == 1.0 || v == -1.0));
        let b = sample_sign_tensor(3, 4, 17);
        let bits_a: Vec<u64> = a.entries().iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = b.entries().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
        assert_ne!(a, sample_sign_tensor(3, 4, 18));
    }

    #[test]
    fn sign_frequencies_balanced() {
        let a = sample_sign_tensor(2, 300, 5);
        let plus = a.entries().iter().filter(|&&v| v > 0.0).count() as f64;
        let frac = plus / a.len() as f64;
        // 4 standard deviations of a Bernoulli(1/2) mean over 90000 draws
        assert!((frac - 0.5).abs() < 4.0 * 0.5 / 300.0);
    }

    #[test]
    fn gaussian_mean_within_clt_bound() {
        let a = sample_gaussian_tensor(2, 1000, 99);
        let mean = a.entries().iter().sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 4e-3, "mean {mean}");
    }

    #[test]
    fn sphere_direction_is_unit() {
        for seed in 0..20 {
            let v = sample_sphere_direction(1 + seed as usize, seed);
            assert!((crate::lp::l2_norm(&v) - 1.0).abs() < 1e-12);
            assert_eq!(v, sample_sphere_direction(1 + seed as usize, seed));
        }
    }

    #[test]
    fn child_seeds_distinct() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| child_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(child_seed(7, 0), child_seed(8, 0));
    }
}
