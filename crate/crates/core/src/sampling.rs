//! Seeded sampling of covectors and algebra elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lie::{AlgebraVector, Covector, LieAlgebra, orbit_report, DEFAULT_RANK_TOL};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed unit ball in `R^n` (rejection from the cube).
pub fn unit_ball(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return x;
        }
    }
}

/// Uniform point of the sphere of the given radius.
pub fn sphere(rng: &mut impl Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let x = unit_ball(rng, n);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-3 {
            return x.iter().map(|v| v * radius / r).collect();
        }
    }
}

pub fn covector_in_ball(rng: &mut impl Rng, n: usize) -> Covector {
    Covector::from(unit_ball(rng, n))
}

pub fn algebra_vector_in_ball(rng: &mut impl Rng, n: usize, radius: f64) -> AlgebraVector {
    AlgebraVector::from(unit_ball(rng, n).into_iter().map(|x| x * radius).collect::<Vec<_>>())
}

/// Verification samples: `count` points in the unit ball followed by `count`
/// points on the sphere of radius 5.
pub fn verification_covectors(n: usize, count: usize, seed: u64) -> Vec<Covector> {
    let mut r = rng(seed);
    let mut out: Vec<Covector> = (0..count).map(|_| covector_in_ball(&mut r, n)).collect();
    out.extend((0..count).map(|_| Covector::from(sphere(&mut r, n, 5.0))));
    out
}

/// Covectors of the unit ball lying in the generic set with a margin: the
/// stabilizer pairing exceeds `margin` and stays generic under the rank test.
pub fn generic_covectors(
    algebra: &LieAlgebra,
    count: usize,
    seed: u64,
    margin: f64,
) -> Vec<Covector> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let p = covector_in_ball(&mut r, algebra.dim());
        let rep = orbit_report(algebra, &p, DEFAULT_RANK_TOL);
        if rep.in_generic_set && rep.pairing.is_some_and(|x| x.abs() > margin) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_and_sphere_radii() {
        let mut r = rng(3);
        for _ in 0..100 {
            let b = unit_ball(&mut r, 4);
            assert!(b.iter().map(|x| x * x).sum::<f64>() <= 1.0);
            let s = sphere(&mut r, 3, 5.0);
            assert!((s.iter().map(|x| x * x).sum::<f64>().sqrt() - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        assert_eq!(verification_covectors(3, 10, 9), verification_covectors(3, 10, 9));
        assert_ne!(verification_covectors(3, 10, 9), verification_covectors(3, 10, 10));
    }
}
