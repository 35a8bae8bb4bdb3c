//! Slow reference implementations used to cross-check the fast kernels.

use crate::info::{gaussian_entropy, MixtureDensity};

/// Minimum pairwise distance by scanning every pair.
pub fn brute_force_min_distance(points: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a - b).abs());
        }
    }
    best
}

/// Law of a sum of `k` uniform symbols on `{-Q, …, Q}` by floating-point
/// convolution of probability vectors.
pub fn convolved_pam_pmf(half_range: u32, k: u32) -> Vec<f64> {
    let width = 2 * half_range as usize + 1;
    let unit = vec![1.0 / width as f64; width];
    let mut acc = vec![1.0];
    for _ in 0..k {
        let mut next = vec![0.0; acc.len() + width - 1];
        for (i, p) in acc.iter().enumerate() {
            for (j, u) in unit.iter().enumerate() {
                next[i + j] += p * u;
            }
        }
        acc = next;
    }
    acc
}

/// Plain Riemann sum of `-f log2 f` on a fixed fine grid over
/// `[min μ - 12, max μ + 12]`, evaluating every component at every node.
pub fn riemann_entropy(mix: &MixtureDensity, step: f64) -> f64 {
    if mix.len() == 1 {
        return gaussian_entropy(1.0);
    }
    let lo = mix.means()[0] - 12.0;
    let hi = mix.means()[mix.len() - 1] + 12.0;
    let n = ((hi - lo) / step).ceil() as usize;
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    (0..=n)
        .map(|i| {
            let y = lo + i as f64 * step;
            let f: f64 = mix
                .means()
                .iter()
                .zip(mix.weights())
                .map(|(m, w)| w * norm * (-0.5 * (y - m).powi(2)).exp())
                .sum();
            if f > 0.0 {
                -f * f.log2() * step
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_basics() {
        assert_eq!(brute_force_min_distance(&[3.0, -1.0, 2.5, 10.0]), 0.5);
        assert_eq!(brute_force_min_distance(&[1.0]), f64::INFINITY);
    }

    #[test]
    fn convolution_matches_triangle() {
        let p = convolved_pam_pmf(1, 2);
        let expect = [1.0, 2.0, 3.0, 2.0, 1.0].map(|c| c / 9.0);
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
