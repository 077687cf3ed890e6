//! Statistical helpers for the Monte Carlo validation ops: Kolmogorov–Smirnov
//! one-sample test, chi-square survival function, and the normal quantiles
//! used for confidence intervals.

/// Two-sided z for a 99% normal confidence interval.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// One-sample KS statistic `D_n = sup_x |F_n(x) - F(x)|` against a
/// continuous cdf. `samples` need not be sorted.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = (f - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - f).abs();
        d = d.max(lo).max(hi);
    }
    d
}

/// Asymptotic p-value of the one-sample KS statistic with Stephens'
/// finite-sample correction: `Q((√n + 0.12 + 0.11/√n) · D)`.
pub fn ks_p_value(statistic: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² x²)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: `P(X > x) = Q(df/2, x/2)`.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    1.0 - regularized_lower_gamma(0.5 * df, 0.5 * x)
}

/// Regularized lower incomplete gamma `P(a, x) = γ(a, x)/Γ(a)`, via the
/// series for `x < a + 1` and the Lentz continued fraction otherwise.
pub fn regularized_lower_gamma(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // Series: P(a,x) = x^a e^{-x} / Γ(a) · Σ x^n Γ(a)/Γ(a+1+n)
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (a * x.ln() - x - ln_gamma(a)).exp()
    } else {
        // Continued fraction for Q(a,x), modified Lentz.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (a * x.ln() - x - ln_gamma(a)).exp() * h;
        1.0 - q
    }
}

/// `ln Γ(x)` by the Lanczos approximation (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kolmogorov_known_quantiles() {
        // Q(1.3581) ≈ 0.05 and Q(1.6276) ≈ 0.01 (classical KS critical values).
        assert_relative_eq!(kolmogorov_sf(1.3581), 0.05, max_relative = 2e-3);
        assert_relative_eq!(kolmogorov_sf(1.6276), 0.01, max_relative = 2e-2);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn chi_square_known_quantiles() {
        assert_relative_eq!(
            chi_square_sf(3.841_458_820_694_124, 1.0),
            0.05,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            chi_square_sf(23.209_251_158_954_356, 10.0),
            0.01,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            chi_square_sf(30.577_914_166_892_494, 15.0),
            0.01,
            max_relative = 1e-8
        );
    }

    #[test]
    fn lower_gamma_matches_exponential_family() {
        // P(1, x) = 1 - e^{-x}.
        for &x in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            assert_relative_eq!(
                regularized_lower_gamma(1.0, x),
                1.0 - (-x).exp(),
                max_relative = 1e-12
            );
        }
        // P(1/2, x) = erf(√x).
        for &x in &[0.2, 1.0, 3.0, 8.0] {
            assert_relative_eq!(
                regularized_lower_gamma(0.5, x),
                libm::erf(x.sqrt()),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn ks_statistic_hand_case() {
        // Samples {0.25, 0.75} against U(0,1): F_n steps at 0.5 and 1.0.
        let d = ks_statistic(&[0.75, 0.25], |x| x);
        assert_relative_eq!(d, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn ks_uniform_samples_pass() {
        // A deterministic low-discrepancy sequence should not reject U(0,1).
        let n = 2000;
        let samples: Vec<f64> = (0..n)
            .map(|i| ((i as f64 + 0.5) * 0.618_033_988_749_894_9) % 1.0)
            .collect();
        let d = ks_statistic(&samples, |x| x);
        assert!(ks_p_value(d, n) > 0.01);
    }
}
