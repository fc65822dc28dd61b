//! Seed derivation. Every random draw is keyed by the master seed plus a
//! structural index, so parallel schedules give identical streams.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of structural indices.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(seed), |acc, &k| splitmix(acc ^ splitmix(k.wrapping_add(0x5851_F42D))))
}

pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A direction drawn from the unitarily invariant distribution on the unit
/// sphere of C^k (normalized complex Gaussian vector).
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..k).map(|_| complex_gaussian(rng)).collect();
        let norm = crate::norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-ish random unitary matrix (Gram-Schmidt on a complex Gaussian
/// matrix), stored by rows.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let dot: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = crate::norm(&v);
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_columns_are_orthonormal() {
        let mut rng = stream(3, &[1]);
        let u = random_unitary(&mut rng, 4);
        for a in 0..4 {
            for b in 0..4 {
                let dot: Complex64 = (0..4).map(|i| u[i][a].conj() * u[i][b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[1]));
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(9, &[4, 2]), derive_seed(9, &[4, 2]));
    }
}
