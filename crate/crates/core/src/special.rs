//! Gamma, Beta and even zeta values.

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

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// B(p, q) = Γ(p)Γ(q)/Γ(p+q).
pub fn beta(p: f64, q: f64) -> f64 {
    (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp()
}

/// The constant B(25/24, 35/24) of the axisymmetric stretching kernel.
pub fn beta_axis() -> f64 {
    beta(25.0 / 24.0, 35.0 / 24.0)
}

/// ζ(s) for s ≥ 2 by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    let n = 20.0f64;
    let mut sum = 0.0;
    for k in 1..20 {
        sum += (k as f64).powf(-s);
    }
    let ns = n.powf(-s);
    sum += n * ns / (s - 1.0) + 0.5 * ns;
    // Bernoulli corrections B2/2!, B4/4!, B6/6!, B8/8!
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let fact = [2.0, 24.0, 720.0, 40320.0];
    let mut rising = s;
    let mut pow = ns / n;
    for j in 0..4 {
        sum += b[j] / fact[j] * rising * pow;
        rising *= (s + 2.0 * j as f64 + 1.0) * (s + 2.0 * j as f64 + 2.0);
        pow /= n * n;
    }
    sum
}

/// Dawson's integral `D(x) = e^{-x²} ∫_0^x e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    if x.abs() > 50.0 {
        // asymptotic 1/(2x) (1 + 1/(2x²) + 3/(4x⁴))
        let y = 1.0 / (x * x);
        return 0.5 / x * (1.0 + 0.5 * y + 0.75 * y * y + 1.875 * y * y * y);
    }
    let xx = x * x;
    crate::quad::adaptive(|t| (t * t - xx).exp(), 0.0, x, 1e-16).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(2.5) - 0.75 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zeta_even_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(40.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dawson_values() {
        // maximum of D at x ≈ 0.9241388730 with D = 0.5410442246
        assert!((dawson(0.924_138_873_0) - 0.541_044_224_6).abs() < 1e-10);
        assert!((dawson(1e-3) - (1e-3 - 2.0 / 3.0 * 1e-9)).abs() < 1e-15);
        assert!((dawson(60.0) * 120.0 - 1.0 - 1.0 / 7200.0 - 0.75 / 3600f64.powi(2)).abs() < 1e-10);
        assert_eq!(dawson(-2.0), -dawson(2.0));
    }

    #[test]
    fn beta_symmetry_and_value() {
        assert!((beta(2.0, 3.0) - 1.0 / 12.0).abs() < 1e-15);
        assert!((beta(0.3, 1.7) - beta(1.7, 0.3)).abs() < 1e-15);
        assert!(beta_axis() > 0.0);
    }
}
