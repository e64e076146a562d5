//! Multinomial sampling shared by simulated measurement and the
//! enumeration-based wavefunction sampler.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Draw multinomial counts: `m` independent draws from the distribution
/// proportional to `weights`. Exactly equivalent in law to `m` sequential
/// categorical draws, but runs in `O(len)` or `O(m log len)` time.
///
/// Two regimes:
/// * few draws (`m < 4·len`): CDF inversion per draw;
/// * many draws: a chain of binomial splits — `counts[0] ~ Binomial(m, p₀)`,
///   then `counts[1] ~ Binomial(m − counts[0], p₁/(1−p₀))`, and so on, which
///   is the standard conditional decomposition of the multinomial.
///
/// The regime choice is a deterministic function of `(m, len)`, so a fixed
/// RNG stream always reproduces the same counts.
///
/// # Panics
/// If `weights` is empty, contains a negative or non-finite entry, or sums
/// to zero.
pub fn multinomial_counts(weights: &[f64], m: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    assert!(!weights.is_empty(), "empty weight vector");
    let mut total = 0.0;
    for &w in weights {
        assert!(w.is_finite() && w >= 0.0, "invalid weight {w}");
        total += w;
    }
    assert!(total > 0.0, "weights sum to zero");

    let mut counts = vec![0u64; weights.len()];
    if m == 0 {
        return counts;
    }

    if m < 4 * weights.len() as u64 {
        // CDF inversion.
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w;
            cdf.push(acc);
        }
        for _ in 0..m {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(weights.len() - 1);
            counts[idx] += 1;
        }
    } else {
        // Binomial chain.
        let mut remaining = m;
        let mut mass_left = total;
        for (idx, &w) in weights.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if idx == weights.len() - 1 || w >= mass_left {
                counts[idx] = remaining;
                remaining = 0;
                break;
            }
            let p = (w / mass_left).clamp(0.0, 1.0);
            let draw = Binomial::new(remaining, p)
                .expect("probability is in [0, 1]")
                .sample(rng);
            counts[idx] = draw;
            remaining -= draw;
            mass_left -= w;
            if mass_left <= 0.0 {
                // Numerical exhaustion: park any leftover draws on the last
                // positive-weight bucket seen so far.
                counts[idx] += remaining;
                remaining = 0;
                break;
            }
        }
        debug_assert_eq!(remaining, 0);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{stream, StreamPurpose};

    fn rng(i: u64) -> ChaCha8Rng {
        stream(7, StreamPurpose::Measure, 0, i)
    }

    #[test]
    fn counts_sum_to_m_in_both_regimes() {
        let w = vec![0.1, 0.4, 0.2, 0.3];
        for (m, i) in [(3u64, 0u64), (10_000, 1)] {
            let counts = multinomial_counts(&w, m, &mut rng(i));
            assert_eq!(counts.iter().sum::<u64>(), m);
        }
    }

    #[test]
    fn deterministic_for_fixed_stream() {
        let w = vec![0.25, 0.25, 0.5];
        let a = multinomial_counts(&w, 1000, &mut rng(2));
        let b = multinomial_counts(&w, 1000, &mut rng(2));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_weight_buckets_stay_empty() {
        let w = vec![0.0, 1.0, 0.0, 2.0];
        for (m, i) in [(5u64, 3u64), (5000, 4)] {
            let counts = multinomial_counts(&w, m, &mut rng(i));
            assert_eq!(counts[0], 0);
            assert_eq!(counts[2], 0);
            assert_eq!(counts.iter().sum::<u64>(), m);
        }
    }

    #[test]
    fn point_mass_is_exact() {
        let w = vec![0.0, 3.5, 0.0];
        let counts = multinomial_counts(&w, 123, &mut rng(5));
        assert_eq!(counts, vec![0, 123, 0]);
    }

    #[test]
    fn frequencies_approach_probabilities() {
        // Law check at 5 sigma: each empirical frequency is within
        // 5·sqrt(p(1−p)/m) of its probability, in both regimes.
        let w = vec![1.0, 2.0, 3.0, 4.0];
        let total: f64 = w.iter().sum();
        for (m, i) in [(100_000u64, 6u64), (12u64.pow(4), 7)] {
            let counts = multinomial_counts(&w, m, &mut rng(i));
            for (idx, &wi) in w.iter().enumerate() {
                let p = wi / total;
                let freq = counts[idx] as f64 / m as f64;
                let sigma = (p * (1.0 - p) / m as f64).sqrt();
                assert!(
                    (freq - p).abs() <= 5.0 * sigma,
                    "bucket {idx}: freq {freq}, p {p}, m {m}"
                );
            }
        }
    }
}
