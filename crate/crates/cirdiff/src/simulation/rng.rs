//! Reproducible per-path random substreams.
//!
//! Every `(seed, path, leg)` tuple owns an independent ChaCha8 stream, so
//! simulated paths are identical no matter how work is scheduled across
//! threads. Gaussian increments come from the inverse normal CDF applied
//! to one uniform per draw, keeping stream consumption fixed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::model::Leg;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The substream owned by `(seed, path, leg)`.
pub fn substream(seed: u64, path: u64, leg: Leg) -> ChaCha8Rng {
    let tag = match leg {
        Leg::X => 0x1u64,
        Leg::Y => 0x2u64,
    };
    let mut state = seed;
    let mixed_seed = splitmix64(&mut state);
    let mut key_state = mixed_seed
        ^ path.wrapping_mul(0xA076_1D64_78BD_642F)
        ^ tag.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut key_state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw strictly inside (0, 1): 53 mantissa bits, offset by half
/// an ulp so neither endpoint can occur.
pub fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// One standard normal via the inverse CDF.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    Normal::standard().inverse_cdf(uniform_open01(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let mut a1 = substream(42, 7, Leg::X);
        let mut a2 = substream(42, 7, Leg::X);
        let mut b = substream(42, 7, Leg::Y);
        let mut c = substream(42, 8, Leg::X);
        let mut d = substream(43, 7, Leg::X);
        let s1: Vec<u64> = (0..8).map(|_| a1.next_u64()).collect();
        let s2: Vec<u64> = (0..8).map(|_| a2.next_u64()).collect();
        assert_eq!(s1, s2);
        assert_ne!(s1, (0..8).map(|_| b.next_u64()).collect::<Vec<_>>());
        assert_ne!(s1, (0..8).map(|_| c.next_u64()).collect::<Vec<_>>());
        assert_ne!(s1, (0..8).map(|_| d.next_u64()).collect::<Vec<_>>());
    }

    #[test]
    fn normals_have_sane_moments() {
        let mut rng = substream(1, 0, Leg::X);
        let n = 200_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let z = standard_normal(&mut rng);
            sum += z;
            sum2 += z * z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn uniforms_stay_strictly_inside_unit_interval() {
        let mut rng = substream(9, 3, Leg::Y);
        for _ in 0..10_000 {
            let u = uniform_open01(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn leg_streams_are_uncorrelated() {
        // sample cross-correlation of the two increment streams across
        // paths and steps stays within 4/sqrt(samples)
        let paths = 200;
        let steps = 1000;
        let (mut sxy, mut sx, mut sy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let n = (paths * steps) as f64;
        for p in 0..paths {
            let mut rx = substream(123, p, Leg::X);
            let mut ry = substream(123, p, Leg::Y);
            for _ in 0..steps {
                let zx = standard_normal(&mut rx);
                let zy = standard_normal(&mut ry);
                sxy += zx * zy;
                sx += zx;
                sy += zy;
                sxx += zx * zx;
                syy += zy * zy;
            }
        }
        let cov = sxy / n - (sx / n) * (sy / n);
        let rho = cov / ((sxx / n - (sx / n).powi(2)).sqrt() * (syy / n - (sy / n).powi(2)).sqrt());
        assert!(rho.abs() < 4.0 / n.sqrt(), "rho = {rho}");
    }
}
