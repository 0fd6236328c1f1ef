//! Seeded frequency sampling shared by the rank, wave-cone and exactness
//! checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::polyalg::{frac, Rational};

/// Coordinate range for random integer frequencies.
pub const COORD_RANGE: i64 = 9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `e_i` for every axis, then every `±e_i ± e_j` with `i < j`.
pub fn structured_directions(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut e = vec![0; n];
                e[i] = si;
                e[j] = sj;
                out.push(e);
            }
        }
    }
    out
}

/// Uniform integer vector in `[-9, 9]^n`, redrawn while it is zero.
pub fn random_integer_point<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-COORD_RANGE..=COORD_RANGE)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Nonzero rational vector with small numerators and denominators.
pub fn random_rational_point<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..n)
            .map(|_| frac(rng.gen_range(-COORD_RANGE..=COORD_RANGE), rng.gen_range(1..=6)))
            .collect();
        if v.iter().any(|x| *x != frac(0, 1)) {
            return v;
        }
    }
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    frac(rng.gen_range(-COORD_RANGE..=COORD_RANGE), rng.gen_range(1..=6))
}

/// Structured directions followed by `count` seeded random integer points.
pub fn sample_frequencies(n: usize, count: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut out = structured_directions(n);
    let mut r = rng(seed);
    out.extend((0..count).map(|_| random_integer_point(&mut r, n)));
    out
}

pub fn to_rational(xi: &[i64]) -> Vec<Rational> {
    xi.iter().map(|&x| frac(x, 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_set_sizes() {
        assert_eq!(structured_directions(2).len(), 2 + 4);
        assert_eq!(structured_directions(3).len(), 3 + 12);
    }

    #[test]
    fn sampling_is_seeded_and_nonzero() {
        let a = sample_frequencies(3, 50, 7);
        assert_eq!(a, sample_frequencies(3, 50, 7));
        assert_ne!(a, sample_frequencies(3, 50, 8));
        assert!(a.iter().all(|v| v.iter().any(|&x| x != 0)));
        assert!(a.iter().flatten().all(|x| x.abs() <= COORD_RANGE));
    }
}
