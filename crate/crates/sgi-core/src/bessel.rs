//! Modified Bessel functions of the second kind, K₀ and K₁, for positive
//! real arguments.
//!
//! The field synthesis integrates K₀/K₁ kernels over a wavenumber
//! quadrature, and the boundary-condition normalisation divides by K₁, so
//! these need close-to-machine relative accuracy over a wide range
//! (~1e-8 … 700).  Two regimes:
//!
//! * `x ≤ 2`: the standard ascending series for I₀/I₁ combined with the
//!   logarithmic series for K₀/K₁ (DLMF 10.31).
//! * `x > 2`: Steed's continued fraction for the confluent ratio (the
//!   "CF2" algorithm), which yields K₀ and the ratio K₁/K₀ together.
//!
//! Both functions underflow gracefully: for x ≳ 746, exp(−x) = 0 in f64 and
//! the result is an exact 0.0, not an error.

use crate::error::{Result, SgiError};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 2.0;
const CF_MAX_ITER: usize = 10_000;

/// K₀(x) and K₁(x) evaluated together (they share nearly all the work).
pub fn k0_k1(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(SgiError::Domain(format!(
            "K0/K1 need a positive argument, got {x}"
        )));
    }
    if x <= SERIES_CUTOFF {
        Ok(k_series(x))
    } else {
        Ok(k_continued_fraction(x))
    }
}

pub fn k0(x: f64) -> Result<f64> {
    k0_k1(x).map(|(a, _)| a)
}

pub fn k1(x: f64) -> Result<f64> {
    k0_k1(x).map(|(_, b)| b)
}

/// Ascending series, accurate for 0 < x ≤ 2.
///
/// With t = x²/4 and H_k the harmonic numbers:
///   I₀ = Σ tᵏ/(k!)²,             I₁ = (x/2) Σ tᵏ/(k!(k+1)!)
///   K₀ = −(ln(x/2)+γ) I₀ + Σ_{k≥1} H_k tᵏ/(k!)²
///   K₁ = 1/x + ln(x/2) I₁ − (x/4) Σ_{k≥0} (H_k + H_{k+1} − 2γ) tᵏ/(k!(k+1)!)
fn k_series(x: f64) -> (f64, f64) {
    let t = 0.25 * x * x;
    let lh = (0.5 * x).ln();

    let mut term0 = 1.0; // tᵏ/(k!)²
    let mut term1 = 1.0; // tᵏ/(k!(k+1)!)
    let mut hk = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1_sum = 1.0;
    let mut s0 = 0.0;
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA; // k = 0 term: H₀ + H₁ − 2γ

    for k in 1..64usize {
        term0 *= t / ((k * k) as f64);
        term1 *= t / ((k * (k + 1)) as f64);
        hk += 1.0 / k as f64;
        let hk1 = hk + 1.0 / (k + 1) as f64;
        i0 += term0;
        i1_sum += term1;
        s0 += term0 * hk;
        s1 += term1 * (hk + hk1 - 2.0 * EULER_GAMMA);
        if term0 < 1e-18 * i0 {
            break;
        }
    }

    let i1 = 0.5 * x * i1_sum;
    let k0 = -(lh + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + lh * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction, accurate for x ≥ 2.
fn k_continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0_f64;
    let mut q2 = 1.0_f64;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;

    for i in 2..=CF_MAX_ITER {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }

    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 50-digit arithmetic (mpmath), rounded
    // to 17 significant digits.
    const SPOTS: &[(f64, f64, f64)] = &[
        (1e-8, 18.536612259610778, 99999999.999999903),
        (1e-4, 9.3262719134502749, 9999.9995086864045),
        (0.1, 2.4270690247020166, 9.8538447808706056),
        (0.5, 0.92441907122766586, 1.6564411200033009),
        (1.0, 0.42102443824070833, 0.60190723019723457),
        (2.0, 0.11389387274953344, 0.13986588181652243),
        (2.5, 0.062347553200366186, 0.073890816347747064),
        (5.0, 0.0036910983340425943, 0.0040446134454521642),
        (10.0, 1.7780062316167652e-5, 1.8648773453825585e-5),
        (50.0, 3.4101677497894955e-23, 3.4441022267175556e-23),
        (100.0, 4.656628229175902e-45, 4.6798537356369093e-45),
        (700.0, 4.6697764316853769e-306, 4.6731107967079661e-306),
    ];

    #[test]
    fn matches_high_precision_references() {
        for &(x, k0_ref, k1_ref) in SPOTS {
            let (a, b) = k0_k1(x).unwrap();
            assert!(
                ((a - k0_ref) / k0_ref).abs() < 1e-13,
                "K0({x}): got {a}, want {k0_ref}"
            );
            assert!(
                ((b - k1_ref) / k1_ref).abs() < 1e-13,
                "K1({x}): got {b}, want {k1_ref}"
            );
        }
    }

    #[test]
    fn branch_seam_is_continuous() {
        // The two algorithms must agree where they meet.
        let (s0, s1) = k_series(2.0);
        let (c0, c1) = k_continued_fraction(2.0);
        assert!(((s0 - c0) / c0).abs() < 1e-13);
        assert!(((s1 - c1) / c1).abs() < 1e-13);
    }

    #[test]
    fn derivative_identity_k0_prime_is_minus_k1() {
        // dK₀/dx = −K₁, checked by Richardson-extrapolated central
        // differences at points across both branches.
        for &x in &[0.03, 0.3, 1.5, 3.0, 8.0, 30.0] {
            let h = 1e-4 * x;
            let d1 = (k0(x + h).unwrap() - k0(x - h).unwrap()) / (2.0 * h);
            let d2 = (k0(x + h / 2.0).unwrap() - k0(x - h / 2.0).unwrap()) / h;
            let deriv = (4.0 * d2 - d1) / 3.0;
            let expect = -k1(x).unwrap();
            assert!(
                ((deriv - expect) / expect).abs() < 1e-8,
                "K0'({x}) = {deriv} vs −K1 = {expect}"
            );
        }
    }

    #[test]
    fn monotone_decreasing_and_ordered() {
        // K₀ < K₁ for all x > 0, and both decrease.
        let mut prev = k0_k1(1e-3).unwrap();
        for i in 1..200 {
            let x = 1e-3 * 1.06_f64.powi(i);
            let cur = k0_k1(x).unwrap();
            assert!(cur.0 < cur.1, "K0 >= K1 at {x}");
            assert!(cur.0 < prev.0 && cur.1 < prev.1, "not decreasing at {x}");
            prev = cur;
        }
    }

    #[test]
    fn rejects_non_positive_arguments() {
        assert!(k0_k1(0.0).is_err());
        assert!(k0_k1(-1.0).is_err());
        assert!(k0_k1(f64::NAN).is_err());
    }

    #[test]
    fn underflows_to_zero_for_huge_arguments() {
        let (a, b) = k0_k1(800.0).unwrap();
        assert_eq!(a, 0.0);
        assert_eq!(b, 0.0);
    }
}
