//! Waiting-time order statistics for entangling N elementary links in
//! parallel, each attempt succeeding with probability `P0` and taking one
//! round trip.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

fn check_p0(p0: f64) -> Result<()> {
    if !p0.is_finite() || p0 <= 0.0 || p0 > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "P0 must lie in (0, 1], got {p0}"
        )));
    }
    Ok(())
}

/// Probability that one link succeeds exactly on attempt `n`:
/// `(1-P0)^{n-1} P0`.
pub fn geometric_pmf(n: u64, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    if n < 1 {
        return Err(Error::InvalidParameter("attempt index starts at 1".into()));
    }
    Ok((1.0 - p0).powi((n - 1) as i32) * p0)
}

/// Probability that the slowest of three independent links succeeds on
/// attempt `n`: `p(n)³ + 3p(n)²S(n-1) + 3p(n)S(n-1)²` with
/// `S(n-1) = Σ_{k<n} p(k)`.
pub fn max3_pmf(n: u64, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    if n < 1 {
        return Err(Error::InvalidParameter("attempt index starts at 1".into()));
    }
    let p = geometric_pmf(n, p0)?;
    let s = 1.0 - (1.0 - p0).powi((n - 1) as i32);
    Ok(p * p * p + 3.0 * p * p * s + 3.0 * p * s * s)
}

/// Probability that the slowest of `links` independent links succeeds on
/// attempt `n`, via the CDF difference `(1-q^n)^links - (1-q^{n-1})^links`.
/// Agrees with [`max3_pmf`] at `links = 3`.
pub fn max_n_pmf(n: u64, links: u32, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    if n < 1 {
        return Err(Error::InvalidParameter("attempt index starts at 1".into()));
    }
    if links < 1 {
        return Err(Error::InvalidParameter("need at least one link".into()));
    }
    let q = 1.0 - p0;
    let cdf = |m: u64| (1.0 - q.powi(m as i32)).powi(links as i32);
    Ok(cdf(n) - cdf(n - 1))
}

/// Expected number of attempts until all three links are up, in closed form:
/// `(3P0³ - 12P0² + 19P0 - 11) / (P0 (P0² - 3P0 + 3)(P0 - 2))`.
///
/// For small `P0` this behaves as `(11/6)/P0`; the frequently quoted
/// `1.7/P0` is a rougher fit of the same curve.
pub fn expected_attempts_3(p0: f64) -> Result<f64> {
    check_p0(p0)?;
    let numerator = 3.0 * p0.powi(3) - 12.0 * p0.powi(2) + 19.0 * p0 - 11.0;
    let denominator = p0 * (p0 * p0 - 3.0 * p0 + 3.0) * (p0 - 2.0);
    Ok(numerator / denominator)
}

/// Expected number of attempts until all `n` links are up, by
/// inclusion-exclusion over the per-link geometric tails:
/// `Σ_{j=1}^{n} (-1)^{j+1} C(n,j) / (1 - (1-P0)^j)`.
pub fn expected_attempts_n(n: u32, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    if n < 1 {
        return Err(Error::InvalidParameter("need at least one link".into()));
    }
    let q = 1.0 - p0;
    let mut sum = 0.0;
    let mut binom = 1.0f64; // C(n, j) built multiplicatively
    for j in 1..=n {
        binom = binom * (n - j + 1) as f64 / j as f64;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binom / (1.0 - q.powi(j as i32));
    }
    Ok(sum)
}

/// One geometric attempt count (as f64, to keep extreme tails finite).
pub(crate) fn sample_geometric<R: Rng + ?Sized>(p0: f64, rng: &mut R) -> f64 {
    if p0 >= 1.0 {
        return 1.0;
    }
    let u: f64 = rng.gen(); // [0, 1)
    let n = ((1.0 - u).ln() / (1.0 - p0).ln()).ceil();
    n.max(1.0)
}

const BLOCK: u64 = 1 << 14;

/// Monte Carlo estimate of the expected attempts for `n` parallel links:
/// samples `max` of `n` geometric draws per trial. Returns `(mean,
/// standard_error)`. Deterministic for a given seed regardless of thread
/// count: each block of trials runs on its own counter-indexed ChaCha
/// stream and blocks are reduced in order.
pub fn monte_carlo_attempts(n: u32, p0: f64, trials: u64, seed: u64) -> Result<(f64, f64)> {
    check_p0(p0)?;
    if n < 1 {
        return Err(Error::InvalidParameter("need at least one link".into()));
    }
    if trials < 1 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let blocks = trials.div_ceil(BLOCK);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b + 1);
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(trials);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in lo..hi {
                let mut worst = 0.0f64;
                for _ in 0..n {
                    worst = worst.max(sample_geometric(p0, &mut rng));
                }
                sum += worst;
                sum_sq += worst * worst;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let mean = sum / trials as f64;
    let std_error = if trials > 1 {
        let var = (sum_sq - trials as f64 * mean * mean) / (trials - 1) as f64;
        (var.max(0.0) / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok((mean, std_error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_pmf_basics() {
        assert!((geometric_pmf(1, 0.25).unwrap() - 0.25).abs() < 1e-15);
        assert!((geometric_pmf(1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(geometric_pmf(2, 1.0).unwrap(), 0.0);
        assert!(geometric_pmf(0, 0.5).is_err());
        assert!(geometric_pmf(1, 0.0).is_err());

        // normalization by tail bound
        let p0 = 0.2f64;
        let mut total = 0.0;
        let mut n = 1u64;
        while (1.0 - p0).powi(n as i32 - 1) > 1e-14 {
            total += geometric_pmf(n, p0).unwrap();
            n += 1;
        }
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn max3_pmf_matches_cdf_difference() {
        for p0 in [0.1, 0.3679, 0.5, 0.9] {
            assert!((max3_pmf(1, p0).unwrap() - p0.powi(3)).abs() < 1e-15);
            let q = 1.0 - p0;
            let mut total = 0.0;
            for n in 1..=2000u64 {
                let pmf = max3_pmf(n, p0).unwrap();
                let cdf_diff = (1.0 - q.powi(n as i32)).powi(3)
                    - (1.0 - q.powi(n as i32 - 1)).powi(3);
                assert!((pmf - cdf_diff).abs() < 1e-12, "n={n} p0={p0}");
                total += pmf;
            }
            assert!((total - 1.0).abs() < 1e-10, "p0={p0}");
        }
    }

    #[test]
    fn general_max_pmf_specializes_to_three_links() {
        for p0 in [0.2, 0.5, 0.8] {
            for n in 1..=200u64 {
                let a = max_n_pmf(n, 3, p0).unwrap();
                let b = max3_pmf(n, p0).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
            // normalization and mean against the inclusion-exclusion route
            for links in [1u32, 2, 5] {
                let mut total = 0.0;
                let mut mean = 0.0;
                for n in 1..=4000u64 {
                    let pmf = max_n_pmf(n, links, p0).unwrap();
                    total += pmf;
                    mean += n as f64 * pmf;
                }
                assert!((total - 1.0).abs() < 1e-10);
                let expect = expected_attempts_n(links, p0).unwrap();
                assert!((mean - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn closed_form_expectation_for_three_links() {
        // always succeeds on the first attempt
        assert!((expected_attempts_3(1.0).unwrap() - 1.0).abs() < 1e-12);
        // 22/7 at one half, matching inclusion-exclusion
        let direct = 3.0 / 0.5 - 3.0 / (0.5 * 1.5) + 1.0 / (0.5 * (3.0 - 1.5 + 0.25));
        assert!((expected_attempts_3(0.5).unwrap() - 22.0 / 7.0).abs() < 1e-12);
        assert!((expected_attempts_3(0.5).unwrap() - direct).abs() < 1e-12);
        // small-P0 coefficient 11/6
        let p0 = 1e-8;
        assert!((expected_attempts_3(p0).unwrap() * p0 - 11.0 / 6.0).abs() < 1e-6);

        // expectation via pmf summation with a geometric tail cutoff
        for p0 in [0.2, 0.5, 0.8] {
            let closed = expected_attempts_3(p0).unwrap();
            let mut acc = 0.0;
            let mut n = 1u64;
            loop {
                let pmf = max3_pmf(n, p0).unwrap();
                acc += n as f64 * pmf;
                // remaining mass bounded by 3 geometric tails
                if 3.0 * (1.0 - p0).powi(n as i32) < 1e-13 {
                    break;
                }
                n += 1;
            }
            assert!((acc - closed).abs() < 1e-9, "p0={p0}");
        }
    }

    #[test]
    fn general_n_reduces_to_the_three_link_form() {
        for p0 in [0.01, 0.1, 0.25, 0.3679, 0.5, 0.75, 0.9, 1.0] {
            let a = expected_attempts_n(3, p0).unwrap();
            let b = expected_attempts_3(p0).unwrap();
            assert!((a - b).abs() < 1e-12 * b.max(1.0), "p0={p0}");
        }
        // single link is plain geometric
        assert!((expected_attempts_n(1, 0.25).unwrap() - 4.0).abs() < 1e-12);
        // two links: coefficient 3/2 in the small-P0 limit
        let p0 = 1e-8;
        assert!((expected_attempts_n(2, p0).unwrap() * p0 - 1.5).abs() < 1e-6);
        // ten links at P0 = 0.01: within 1% of the harmonic number H10
        let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
        let coeff = expected_attempts_n(10, 0.01).unwrap() * 0.01;
        assert!((coeff - h10).abs() / h10 < 0.01);
        assert!(expected_attempts_n(0, 0.5).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic_and_consistent() {
        let (mean_a, se_a) = monte_carlo_attempts(3, 0.3679, 200_000, 424242).unwrap();
        let (mean_b, se_b) = monte_carlo_attempts(3, 0.3679, 200_000, 424242).unwrap();
        assert_eq!(mean_a.to_bits(), mean_b.to_bits());
        assert_eq!(se_a.to_bits(), se_b.to_bits());

        let expect = expected_attempts_3(0.3679).unwrap();
        assert!((mean_a - expect).abs() < 3.0 * se_a);

        let (mean, se) = monte_carlo_attempts(1, 1.0, 1000, 1).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(se, 0.0);
        assert!(monte_carlo_attempts(3, 0.5, 0, 1).is_err());
    }
}
