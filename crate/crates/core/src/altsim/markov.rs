use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const ITERATION_CAP: usize = 1_000_000;
const CLIP: f64 = 1e-30;

/// `∏_{j ≥ 0} (1 + 2^{−j})^{−1}`, truncated once the factors are 1 in `f64`.
fn tail_product() -> f64 {
    (0..=64).map(|j| 1.0 / (1.0 + (-(j as f64)).exp2())).product()
}

/// `α_k = 2^{k+1} ∏_{j=1}^k (2^j − 1)^{−1} ∏_{j≥0} (1 + 2^{−j})^{−1}`.
pub fn alpha(k: usize) -> f64 {
    let head: f64 = (1..=k).map(|j| 2.0 / ((j as f64).exp2() - 1.0)).product();
    2.0 * head * tail_product()
}

/// `2^{−k²} ∏_{i=1}^k (1 − 2^{−i})^{−2} ∏_{i≥1} (1 − 2^{−i})`.
pub fn gerth_pmf(k: usize) -> f64 {
    let tail: f64 = (1..=64).map(|i| 1.0 - (-(i as f64)).exp2()).product();
    let head: f64 = (1..=k).map(|i| (1.0 - (-(i as f64)).exp2()).powi(-2)).product();
    (-((k * k) as f64)).exp2() * head * tail
}

/// `(p₊₂, p₀, p₋₂)` for the corank chain at state `k`.
pub fn markov_step(k: usize) -> (f64, f64, f64) {
    let a = (-(k as f64)).exp2();
    let up = a * a / 2.0;
    let stay = 3.0 * a - 5.0 * a * a / 2.0;
    let down = 1.0 - 3.0 * a + 2.0 * a * a;
    (up, stay, down)
}

/// `(p₊₁, p₀, p₋₁)` for the 4-rank chain at state `k`.
pub fn classrank_markov_step(k: usize) -> (f64, f64, f64) {
    let a = (-(k as f64)).exp2();
    let up = a * a / 2.0;
    let stay = 2.0 * a - 3.0 * a * a / 2.0;
    let down = 1.0 - 2.0 * a + a * a;
    (up, stay, down)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => domain(format!("parity must be even or odd, got {s:?}")),
        }
    }
}

/// Power iteration for a birth-death chain on `states`, with moves of
/// `step` states; mass that would leave past the top stays put.
fn stationary(states: &[usize], k_max: usize, tol: f64, step_probs: impl Fn(usize) -> (f64, f64, f64)) -> Result<Vec<f64>> {
    let m = states.len();
    let mut pi = vec![1.0 / m as f64; m];
    for _ in 0..ITERATION_CAP {
        let mut next = vec![0.0; m];
        for (i, &k) in states.iter().enumerate() {
            let (up, stay, down) = step_probs(k);
            if i + 1 < m {
                next[i + 1] += pi[i] * up;
                next[i] += pi[i] * stay;
            } else {
                next[i] += pi[i] * (up + stay);
            }
            if i > 0 {
                next[i - 1] += pi[i] * down;
            } else {
                next[i] += pi[i] * down;
            }
        }
        for x in next.iter_mut() {
            if *x < CLIP {
                *x = 0.0;
            }
        }
        let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if diff < tol {
            let total: f64 = pi.iter().sum();
            let mut out = vec![0.0; k_max + 1];
            for (i, &k) in states.iter().enumerate() {
                out[k] = pi[i] / total;
            }
            return Ok(out);
        }
    }
    Err(Error::Numeric(format!("no convergence to {tol} within {ITERATION_CAP} iterations")))
}

/// Stationary law of the corank chain on coranks of one parity, indexed by
/// `k` in `0..=k_max` (zero on the other parity).
pub fn markov_stationary(parity: Parity, k_max: usize, tol: f64) -> Result<Vec<f64>> {
    if k_max < 8 {
        return domain(format!("k_max = {k_max} must be at least 8"));
    }
    let start = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let states: Vec<usize> = (start..=k_max).step_by(2).collect();
    stationary(&states, k_max, tol, markov_step)
}

/// Stationary law of the 4-rank chain, indexed by `k` in `0..=k_max`.
pub fn classrank_stationary(k_max: usize, tol: f64) -> Result<Vec<f64>> {
    if k_max < 8 {
        return domain(format!("k_max = {k_max} must be at least 8"));
    }
    let states: Vec<usize> = (0..=k_max).collect();
    stationary(&states, k_max, tol, classrank_markov_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        assert!(alpha(1) > 0.8388 && alpha(1) < 0.8389, "{}", alpha(1));
        assert!((alpha(0) / alpha(1) - 0.5).abs() < 1e-12);
        assert!((alpha(0) - 0.41942).abs() < 1e-5);
        let even: f64 = (0..64).step_by(2).map(alpha).sum();
        let odd: f64 = (1..64).step_by(2).map(alpha).sum();
        assert!((even - 1.0).abs() < 1e-12 && (odd - 1.0).abs() < 1e-12, "{even} {odd}");
    }

    #[test]
    fn step_examples() {
        assert_eq!(markov_step(0), (0.5, 0.5, 0.0));
        assert_eq!(markov_step(1), (1.0 / 8.0, 7.0 / 8.0, 0.0));
        assert_eq!(markov_step(2), (1.0 / 32.0, 19.0 / 32.0, 12.0 / 32.0));
        for k in 0..=10 {
            let (a, b, c) = classrank_markov_step(k);
            assert!((a + b + c - 1.0).abs() < 1e-15);
            let (a, b, c) = markov_step(k);
            assert!((a + b + c - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gerth_values() {
        assert!((gerth_pmf(0) - 0.288788).abs() < 1e-6);
        assert!((gerth_pmf(1) - 0.577576).abs() < 1e-6);
        let total: f64 = (0..20).map(gerth_pmf).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_laws() {
        let even = markov_stationary(Parity::Even, 64, 1e-14).unwrap();
        let odd = markov_stationary(Parity::Odd, 64, 1e-14).unwrap();
        for k in 0..=10 {
            let got = if k % 2 == 0 { even[k] } else { odd[k] };
            assert!((got - alpha(k)).abs() < 1e-6, "k = {k}");
        }
        assert!((even.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let cl = classrank_stationary(64, 1e-14).unwrap();
        for k in 0..=8 {
            assert!((cl[k] - gerth_pmf(k)).abs() < 1e-6, "k = {k}");
        }
        assert!(markov_stationary(Parity::Odd, 7, 1e-9).is_err());
        assert!(matches!(markov_stationary(Parity::Even, 64, 0.0), Err(Error::Numeric(_))));
    }
}
