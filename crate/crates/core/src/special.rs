//! Gamma and zeta functions.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// ln n!
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// A branch of ln Γ(z) on the complex plane (poles excluded).
///
/// Only exp(ln_gamma_complex(z)) is meaningful: the imaginary part may differ
/// from the principal branch by multiples of 2π.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_gamma_complex(z.conj()).conj();
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let zm = z - 1.0;
    let mut sum = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += *c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + sum.ln()
}

/// ln sin(πz) for Im z ≥ 0 without overflow at large Im z.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 1.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
    let i = Complex64::i();
    let e2 = (2.0 * PI * i * z).exp();
    -i * PI * z + (Complex64::new(1.0, 0.0) - e2).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
}

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3_617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k + a)^{-s} for s > 1, a > 0.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta requires s > 1, a > 0");
    // Euler-Maclaurin with the tail started at a + N.
    let n = 12usize.saturating_sub(a as usize);
    let mut sum: f64 = (0..n).map(|k| (a + k as f64).powf(-s)).sum();
    let x = a + n as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * rising * xp;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        xp /= x * x;
    }
    sum
}

/// Riemann zeta ζ(s) for s > 1.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(2.0 / 3.0), 1.354_117_939_426_400_4, max_relative = 1e-14);
        assert_relative_eq!(ln_factorial(170), 706.573_062_245_787_4, max_relative = 1e-14);
    }

    #[test]
    fn complex_gamma_matches_real_axis_and_recurrence() {
        for &x in &[0.3, 1.7, 12.5, 80.0] {
            let z = ln_gamma_complex(Complex64::new(x, 0.0));
            assert_relative_eq!(z.re, ln_gamma(x), max_relative = 1e-13, epsilon = 1e-14);
        }
        // Γ(z+1) = z Γ(z) off the real axis, including the reflected half-plane.
        for &(re, im) in &[(0.3, 2.0), (-7.4, 3.1), (-40.0, 150.0), (25.0, -300.0)] {
            let z = Complex64::new(re, im);
            let lhs = (ln_gamma_complex(z + 1.0) - ln_gamma_complex(z) - z.ln()).exp();
            assert!((lhs - 1.0).norm() < 1e-10, "z = {z}: {lhs}");
        }
        // |Γ(iy)|² = π / (y sinh πy)
        let y: f64 = 3.0;
        let g = ln_gamma_complex(Complex64::new(0.0, y));
        assert_relative_eq!((2.0 * g.re).exp(), PI / (y * (PI * y).sinh()), max_relative = 1e-12);
    }

    #[test]
    fn zeta_known_values() {
        assert_relative_eq!(zeta(2.0), PI * PI / 6.0, max_relative = 1e-14);
        assert_relative_eq!(zeta(3.0), 1.202_056_903_159_594_3, max_relative = 1e-14);
        assert_relative_eq!(zeta(7.0 / 3.0), 1.415_155_609_445_983, max_relative = 1e-12);
        // ζ(s, a) - ζ(s, a + 1) = a^{-s}
        let (s, a) = (1.6, 3.25);
        assert_relative_eq!(hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0), a.powf(-s), max_relative = 1e-12);
        assert_relative_eq!(hurwitz_zeta(3.0, 0.5), 7.0 * zeta(3.0), max_relative = 1e-13);
    }
}
