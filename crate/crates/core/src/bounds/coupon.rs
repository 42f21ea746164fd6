//! Probability that some coordinate is never drawn in `N` uniform draws from
//! `d` coordinates, which bounds the error of the ONB law.

use crate::linalg::special::ln_gamma;

/// Relative error budget for the alternating sum before falling back to the
/// exact recursion.
const CANCELLATION_TOL: f64 = 1e-10;

fn ln_binomial(n: usize, k: usize) -> f64 {
    let f = |m: usize| ln_gamma(m as f64 + 1.0).expect("positive argument");
    f(n) - f(k) - f(n - k)
}

/// Exact in `f64` for `n ≤ 60`.
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// `Σ_{k=1}^{d} (−1)^{k+1} C(d,k) (1 − k/d)^N`, summed in ascending `k` with
/// Neumaier compensation. When the terms are so large that cancellation
/// could cost more than `1e-10` relative accuracy, the exact value is taken
/// from [`unhit_probability_exact`] instead.
pub fn inclusion_exclusion_bound(d: usize, n: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut largest = 0.0f64;
    for k in 1..d {
        let q = 1.0 - k as f64 / d as f64;
        let mag = if d > 60 {
            (ln_binomial(d, k) + n as f64 * q.ln()).exp()
        } else {
            binomial(d, k) * q.powf(n as f64)
        };
        largest = largest.max(mag);
        let term = if k % 2 == 1 { mag } else { -mag };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let value = sum + comp;
    let rounding = largest * d as f64 * f64::EPSILON;
    if !(rounding <= CANCELLATION_TOL * value.abs()) {
        return unhit_probability_exact(d, n);
    }
    value.clamp(0.0, 1.0)
}

/// First term `d (1 − 1/d)^N` of the inclusion–exclusion sum.
pub fn first_term_bound(d: usize, n: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    d as f64 * (1.0 - 1.0 / d as f64).powi(n as i32)
}

/// Same probability from the Markov chain of the number of distinct
/// coordinates seen: `Σ_{j<d} Pr(exactly j seen after N draws)`.
pub fn unhit_probability_exact(d: usize, n: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let df = d as f64;
    let mut p = vec![0.0; d + 1];
    p[0] = 1.0;
    for _ in 0..n {
        for j in (0..=d).rev() {
            let stay = p[j] * j as f64 / df;
            let enter = if j > 0 { p[j - 1] * (d - j + 1) as f64 / df } else { 0.0 };
            p[j] = stay + enter;
        }
    }
    p[..d].iter().sum::<f64>().clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Fraction of the `d^N` draw sequences that miss a coordinate.
    fn brute_force(d: usize, n: usize) -> f64 {
        let total = d.pow(n as u32);
        let mut missing = 0usize;
        for code in 0..total {
            let mut seen = vec![false; d];
            let mut c = code;
            for _ in 0..n {
                seen[c % d] = true;
                c /= d;
            }
            if seen.iter().any(|s| !s) {
                missing += 1;
            }
        }
        missing as f64 / total as f64
    }

    #[test]
    fn examples() {
        assert!((inclusion_exclusion_bound(3, 3) - 7.0 / 9.0).abs() <= 2.0 * f64::EPSILON);
        assert!((brute_force(3, 3) - 7.0 / 9.0).abs() < 1e-15);
        for d in 1..8 {
            assert_eq!(inclusion_exclusion_bound(d, 0), 1.0);
        }
        for n in 1..10 {
            assert_eq!(inclusion_exclusion_bound(1, n), 0.0);
        }
    }

    #[test]
    fn matches_brute_force() {
        for d in 1..=4 {
            for n in 0..=7 {
                let bf = brute_force(d, n);
                assert!((inclusion_exclusion_bound(d, n) - bf).abs() < 1e-14, "d={d} n={n}");
                assert!((unhit_probability_exact(d, n) - bf).abs() < 1e-14, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn large_d_uses_a_stable_route() {
        for (d, n) in [(100, 600), (100, 50), (200, 2000), (10, 100)] {
            let ie = inclusion_exclusion_bound(d, n);
            let exact = unhit_probability_exact(d, n);
            assert!((ie - exact).abs() <= 1e-9 * exact.max(1e-300), "d={d} n={n}: {ie} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn bounded_by_first_term(d in 1usize..150, n in 0usize..3000) {
            let ie = inclusion_exclusion_bound(d, n);
            let first = first_term_bound(d, n);
            prop_assert!((0.0..=1.0).contains(&ie));
            prop_assert!(first <= d as f64 && first >= 0.0);
            prop_assert!(ie <= first * (1.0 + 1e-12) + 1e-300);
        }
    }
}
