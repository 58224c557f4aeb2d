//! Randomly shifted Halton points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    acc
}

/// `k` points in the box, from the Halton sequence with a seeded
/// Cranley-Patterson rotation. Deterministic in `(bounds, k, seed)`.
pub fn halton_box(bounds: &[(f64, f64)], k: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(bounds.len() <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = bounds.iter().map(|_| rng.gen::<f64>()).collect();
    (1..=k as u64)
        .map(|j| {
            bounds
                .iter()
                .zip(PRIMES)
                .zip(&shift)
                .map(|(((lo, hi), p), s)| {
                    let x = (radical_inverse(j, p) + s).fract();
                    lo + (hi - lo) * x
                })
                .collect()
        })
        .collect()
}

pub const MAX_DIM: usize = PRIMES.len();

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, [0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn points_stay_in_box_and_are_reproducible() {
        let b = [(-5.0, 5.0), (0.0, 40.0)];
        let p = halton_box(&b, 64, 7);
        assert_eq!(p, halton_box(&b, 64, 7));
        assert_ne!(p, halton_box(&b, 64, 8));
        for x in &p {
            assert!((-5.0..=5.0).contains(&x[0]) && (0.0..=40.0).contains(&x[1]));
        }
    }

    #[test]
    fn low_discrepancy_fills_quadrants() {
        let p = halton_box(&[(0.0, 1.0), (0.0, 1.0)], 64, 1);
        for (qx, qy) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let n = p
                .iter()
                .filter(|x| ((x[0] >= 0.5) as i32, (x[1] >= 0.5) as i32) == (qx, qy))
                .count();
            assert!((10..=22).contains(&n), "quadrant ({qx},{qy}) has {n}");
        }
    }
}
