//! Gauss–Legendre quadrature with arbitrary node count.
//!
//! The wavenumber integrals in the field synthesis have smooth, rapidly
//! decaying integrands, so a mapped Gauss–Legendre rule converges
//! geometrically; node counts are a runtime configuration choice, hence
//! nodes are computed on demand (Newton iteration on the Legendre
//! recurrence) rather than tabulated.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgiError};

/// A quadrature rule: Σ wᵢ f(xᵢ) ≈ ∫ f.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// Gauss–Legendre rule on [−1, 1].
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SgiError::Config("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style starting guess for the i-th root of Pₙ.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 * x.abs().max(1e-3) {
                    let (p2, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // Exact midpoint for odd rules.
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_with_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Ok(Self { nodes, weights })
    }

    /// Gauss–Legendre rule mapped to [lo, hi].
    pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(SgiError::Config(format!(
                "invalid quadrature interval [{lo}, {hi}]"
            )));
        }
        let base = Self::gauss_legendre(n)?;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        Ok(Self {
            nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
            weights: base.weights.iter().map(|w| w * half).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// (Pₙ(x), Pₙ′(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // Pₙ′ = n (x Pₙ − Pₙ₋₁) / (x² − 1)
    let d = if (x * x - 1.0).abs() < 1e-300 {
        // At the endpoints Pₙ′ = ±n(n+1)/2; not reached by interior roots.
        x.signum() * (n * (n + 1)) as f64 / 2.0
    } else {
        (n as f64) * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_matches_tabulated_values() {
        let q = Quadrature::gauss_legendre(5).unwrap();
        let nodes = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683_1,
            0.0,
            0.538_469_310_105_683_1,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.236_926_885_056_189_1,
            0.478_628_670_499_366_5,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
        ];
        for i in 0..5 {
            assert!((q.nodes[i] - nodes[i]).abs() < 1e-14, "node {i}");
            assert!((q.weights[i] - weights[i]).abs() < 1e-14, "weight {i}");
        }
    }

    #[test]
    fn integrates_polynomials_of_degree_2n_minus_1_exactly() {
        let q = Quadrature::gauss_legendre(8).unwrap();
        let even = q.integrate(|x| x.powi(14));
        assert!((even - 2.0 / 15.0).abs() < 1e-14);
        let odd = q.integrate(|x| x.powi(15));
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 64, 256, 513] {
            let q = Quadrature::gauss_legendre_on(n, 0.0, 3.6).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - 3.6).abs() < 1e-12 * 3.6, "n = {n}: {s}");
        }
    }

    #[test]
    fn exponential_on_reference_interval() {
        let q = Quadrature::gauss_legendre(20).unwrap();
        let got = q.integrate(f64::exp);
        let want = std::f64::consts::E - 1.0 / std::f64::consts::E;
        assert!(((got - want) / want).abs() < 1e-15);
    }

    #[test]
    fn gaussian_tail_integral_on_mapped_interval() {
        // ∫₀^∞ e^(−k²/2) dk = √(π/2); the integrand is ~1e-32 at k = 12,
        // so truncating there loses nothing at f64 precision.
        let q = Quadrature::gauss_legendre_on(64, 0.0, 12.0).unwrap();
        let got = q.integrate(|k| (-0.5 * k * k).exp());
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!(((got - want) / want).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_setups() {
        assert!(Quadrature::gauss_legendre(0).is_err());
        assert!(Quadrature::gauss_legendre_on(8, 1.0, 1.0).is_err());
        assert!(Quadrature::gauss_legendre_on(8, 2.0, 1.0).is_err());
    }
}
