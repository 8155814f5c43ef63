//! Closed-form Kullback-Leibler divergence from a Weibull model to its
//! exponential base model (shape = 1), the distance sqrt(2*KLD), its
//! derivative, and the inversion from distance back to the shape.

use crate::error::{Error, Result};
use crate::numerics::{digamma, find_root, ln_gamma, RootBracket, EULER_GAMMA};

/// Shapes below this cannot be represented on the distance scale without
/// overflowing Gamma(1/alpha) machinery; treated as distance +inf.
pub const ALPHA_FLOOR: f64 = 0.01;

/// ln Gamma arguments above this would overflow exp().
const LN_GAMMA_OVERFLOW: f64 = 709.0;

/// Curvature constant at the base model: KLD2''(1) = pi^2/6 + (1-gamma)^2,
/// so d(alpha) ~ sqrt(KLD2''(1)) * |alpha - 1| near alpha = 1.
pub fn base_curvature() -> f64 {
    std::f64::consts::PI.powi(2) / 6.0 + (1.0 - EULER_GAMMA).powi(2)
}

/// Which side of the base model a distance value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// alpha <= 1
    Lower,
    /// alpha >= 1
    Upper,
}

/// A nonnegative distance to the base model, tagged with its branch.
#[derive(Debug, Clone, Copy)]
pub struct DistanceValue {
    pub d: f64,
    pub branch: Branch,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("shape must be > 0, got {alpha}")));
    }
    if alpha < ALPHA_FLOOR {
        return Err(Error::Saturated(format!(
            "shape {alpha} below floor {ALPHA_FLOOR}; distance treated as +inf"
        )));
    }
    Ok(())
}

// Neumaier-compensated sum of the bracketed KLD2 terms; they cancel to
// O((alpha-1)^2) near the base model.
fn kld2_bracket(alpha: f64) -> f64 {
    let terms = [
        EULER_GAMMA,
        -alpha * (1.0 + EULER_GAMMA),
        ln_gamma(1.0 / alpha).map(f64::exp).unwrap_or(f64::INFINITY),
        alpha * alpha.ln(),
    ];
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &t in &terms {
        let s = sum + t;
        comp += if sum.abs() >= t.abs() {
            (sum - s) + t
        } else {
            (t - s) + sum
        };
        sum = s;
    }
    sum + comp
}

/// KLD for parameterization 2; independent of the scale.
pub fn kld_p2(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if ln_gamma(1.0 / alpha)? > LN_GAMMA_OVERFLOW {
        return Err(Error::Saturated(format!(
            "Gamma(1/{alpha}) overflows double precision"
        )));
    }
    if (alpha - 1.0).abs() < 1e-6 {
        // quadratic expansion around the base model
        return Ok(0.5 * base_curvature() * (alpha - 1.0).powi(2));
    }
    Ok((kld2_bracket(alpha) / alpha).max(0.0))
}

/// KLD for parameterization 1; depends on the scale.
pub fn kld_p1(alpha: f64, lambda: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scale must be > 0, got {lambda}")));
    }
    let lg = ln_gamma(1.0 / alpha)?;
    let scaled_gamma = (1.0 - 1.0 / alpha) * lambda.ln() + lg;
    if scaled_gamma > LN_GAMMA_OVERFLOW {
        return Err(Error::Saturated(format!(
            "lambda^(1-1/alpha) * Gamma(1/alpha) overflows at alpha={alpha}, lambda={lambda}"
        )));
    }
    let value = (EULER_GAMMA - alpha * (1.0 + EULER_GAMMA)
        + scaled_gamma.exp()
        + alpha * alpha.ln()
        + (1.0 - alpha) * lambda.ln())
        / alpha;
    if (alpha - 1.0).abs() < 1e-6 && lambda == 1.0 {
        return kld_p2(alpha);
    }
    Ok(value.max(0.0))
}

/// Distance to the base model, d = sqrt(2 * KLD2).
pub fn distance(alpha: f64) -> Result<DistanceValue> {
    let branch = if alpha <= 1.0 { Branch::Lower } else { Branch::Upper };
    if (alpha - 1.0).abs() < 1e-6 {
        return Ok(DistanceValue {
            d: base_curvature().sqrt() * (alpha - 1.0).abs(),
            branch,
        });
    }
    let kld = kld_p2(alpha)?;
    Ok(DistanceValue {
        d: (2.0 * kld).sqrt(),
        branch,
    })
}

/// dKLD2/dalpha via the closed form (uses digamma).
pub fn kld_p2_deriv(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let inv = 1.0 / alpha;
    let gamma_inv = ln_gamma(inv)?.exp();
    let bracket = kld2_bracket(alpha);
    // pair each huge factor with a 1/alpha so the O(1) product never overflows
    let bracket_deriv =
        -(1.0 + EULER_GAMMA) - (gamma_inv * inv) * (digamma(inv)? * inv) + alpha.ln() + 1.0;
    // divide twice: alpha * alpha overflows for shapes past ~1.3e154
    Ok((-bracket / alpha + bracket_deriv) / alpha)
}

/// dd/dalpha; negative on the lower branch, positive on the upper.
pub fn distance_deriv(alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::Domain(
            "distance is not differentiable at the base model (alpha = 1)".into(),
        ));
    }
    if (alpha - 1.0).abs() < 1e-6 {
        return Ok(base_curvature().sqrt() * (alpha - 1.0).signum());
    }
    let d = distance(alpha)?.d;
    Ok(kld_p2_deriv(alpha)? / d)
}

/// Unique shape on the requested branch with distance(alpha) = d.
pub fn alpha_from_distance(d: f64, branch: Branch) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("distance must be >= 0, got {d}")));
    }
    if d == 0.0 {
        return Ok(1.0);
    }
    let objective = |alpha: f64| match distance(alpha) {
        Ok(v) => v.d - d,
        Err(_) => f64::INFINITY,
    };
    match branch {
        Branch::Lower => {
            let d_floor = distance(ALPHA_FLOOR)?.d;
            if d > d_floor {
                return Err(Error::Saturated(format!(
                    "distance {d} exceeds the lower-branch range (max {d_floor:e} at alpha = {ALPHA_FLOOR})"
                )));
            }
            let bracket = RootBracket::new(ALPHA_FLOOR, 1.0, 1e-12)?;
            find_root(objective, bracket)
        }
        Branch::Upper => {
            let mut hi = 2.0;
            // d grows like sqrt(2 ln alpha), so legitimate tail distances can
            // demand astronomically large shapes; cap only near overflow
            while distance(hi)?.d <= d {
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::Domain(format!(
                        "distance {d} not reachable on the upper branch"
                    )));
                }
            }
            let bracket = RootBracket::new(1.0, hi, 1e-12)?;
            find_root(objective, bracket)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureConfig};
    use crate::weibull::WeibullParams;

    // Independent oracle for E_f[log f - log g]. Integrating in y directly is
    // unreliable when the complex model is heavy-tailed (shape < 1), so change
    // variables to z = -log S_f(y) ~ Exp(1) and integrate e^{-z} (log f - log g).
    fn kld_by_quadrature(complex: &WeibullParams, base: &WeibullParams) -> f64 {
        let cfg = QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 400,
        };
        let y_of_z = |z: f64| match complex.parameterization {
            crate::weibull::Parameterization::P1 => (z / complex.lambda).powf(1.0 / complex.alpha),
            crate::weibull::Parameterization::P2 => complex.lambda * z.powf(1.0 / complex.alpha),
        };
        integrate(
            |z| {
                if z <= 0.0 {
                    return 0.0;
                }
                let y = y_of_z(z);
                let lf = crate::weibull::log_density(y, complex).unwrap();
                let lg = crate::weibull::log_density(y, base).unwrap();
                (-z).exp() * (lf - lg)
            },
            0.0,
            f64::INFINITY,
            &cfg,
        )
        .unwrap()
    }

    #[test]
    fn kld_zero_at_base_model() {
        assert_eq!(kld_p2(1.0).unwrap(), 0.0);
        for &lambda in &[0.5, 1.0, 4.0] {
            assert!(kld_p1(1.0, lambda).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn kld_p2_matches_quadrature_and_ignores_scale() {
        for &alpha in &[0.5, 0.8, 1.2, 2.0, 5.0] {
            let analytic = kld_p2(alpha).unwrap();
            for &lambda in &[0.5, 1.0, 2.0] {
                let complex = WeibullParams::p2(alpha, lambda).unwrap();
                let base = WeibullParams::p2(1.0, lambda).unwrap();
                let numeric = kld_by_quadrature(&complex, &base);
                assert!(
                    (analytic - numeric).abs() < 1e-8,
                    "alpha={alpha}, lambda={lambda}: {analytic} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn kld_p2_pinned_value_at_two() {
        // gamma - 2(1+gamma) + Gamma(1/2) + 2 ln 2, halved
        let expected = (EULER_GAMMA - 2.0 * (1.0 + EULER_GAMMA)
            + std::f64::consts::PI.sqrt()
            + 2.0 * 2.0f64.ln())
            / 2.0;
        assert!((kld_p2(2.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.29077).abs() < 1e-5);
    }

    #[test]
    fn kld_p2_small_alpha_pinned() {
        // alpha = 0.93 sits at distance ~0.1007
        let k = kld_p2(0.93).unwrap();
        assert!((k - 0.0050685).abs() < 5e-6, "kld={k}");
        assert!(((2.0 * k).sqrt() - 0.1007).abs() < 5e-4);
    }

    #[test]
    fn kld_p1_matches_quadrature_and_depends_on_scale() {
        for &alpha in &[0.5, 0.8, 1.2, 2.0, 5.0] {
            let mut values = Vec::new();
            for &lambda in &[0.5, 1.0, 2.0] {
                let analytic = kld_p1(alpha, lambda).unwrap();
                let complex = WeibullParams::p1(alpha, lambda).unwrap();
                let base = WeibullParams::p1(1.0, lambda).unwrap();
                let numeric = kld_by_quadrature(&complex, &base);
                assert!(
                    (analytic - numeric).abs() < 1e-8,
                    "alpha={alpha}, lambda={lambda}: {analytic} vs {numeric}"
                );
                values.push(analytic);
            }
            if alpha != 1.0 {
                assert!(
                    (values[0] - values[2]).abs() > 1e-6,
                    "kld_p1 should vary with lambda at alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn kld_p1_at_unit_scale_equals_kld_p2() {
        for &alpha in &[0.3, 0.9, 1.5, 4.0] {
            assert!((kld_p1(alpha, 1.0).unwrap() - kld_p2(alpha).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn kld_nonnegative_with_unique_zero() {
        let mut alpha = 0.05;
        while alpha <= 50.0 {
            let k = kld_p2(alpha).unwrap();
            if (alpha - 1.0).abs() > 1e-9 {
                assert!(k > 0.0, "alpha={alpha}");
            }
            alpha *= 1.07;
        }
    }

    #[test]
    fn distance_table_one_values() {
        assert_eq!(distance(1.0).unwrap().d, 0.0);
        // tabulated shapes carry two decimals, so allow |d'| * 0.005 of slack
        assert!((distance(0.72).unwrap().d - 0.50).abs() < 1.5e-2);
        assert!((distance(4.93).unwrap().d - 1.45).abs() < 1.5e-2);
        assert_eq!(distance(0.72).unwrap().branch, Branch::Lower);
        assert_eq!(distance(4.93).unwrap().branch, Branch::Upper);
    }

    #[test]
    fn distance_monotone_off_the_base() {
        let mut prev = distance(0.05).unwrap().d;
        let mut alpha = 0.06;
        while alpha < 1.0 {
            let d = distance(alpha).unwrap().d;
            assert!(d < prev, "alpha={alpha}");
            prev = d;
            alpha += 0.01;
        }
        let mut prev = distance(1.001).unwrap().d;
        let mut alpha = 1.01;
        while alpha < 60.0 {
            let d = distance(alpha).unwrap().d;
            assert!(d > prev, "alpha={alpha}");
            prev = d;
            alpha *= 1.05;
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-6;
        for &alpha in &[0.3, 0.5, 0.7, 1.5, 2.0, 3.0, 8.0] {
            let analytic = distance_deriv(alpha).unwrap();
            let fd = (distance(alpha + h).unwrap().d - distance(alpha - h).unwrap().d) / (2.0 * h);
            assert!(
                ((analytic - fd) / fd).abs() < 1e-6,
                "alpha={alpha}: analytic={analytic}, fd={fd}"
            );
        }
    }

    #[test]
    fn derivative_signs() {
        assert!(distance_deriv(0.9).unwrap() < 0.0);
        assert!(distance_deriv(0.5).unwrap() < 0.0);
        assert!(distance_deriv(1.1).unwrap() > 0.0);
        assert!(distance_deriv(1.0).is_err());
    }

    #[test]
    fn inversion_table_one() {
        let cases = [
            (0.1, 0.93, 1.08),
            (0.5, 0.72, 1.53),
            (0.8, 0.62, 2.09),
            (1.45, 0.48, 4.93),
        ];
        for &(d, lo, hi) in &cases {
            let a_lo = alpha_from_distance(d, Branch::Lower).unwrap();
            let a_hi = alpha_from_distance(d, Branch::Upper).unwrap();
            assert!((a_lo - lo).abs() < 0.01, "d={d}: lower {a_lo} vs {lo}");
            assert!((a_hi - hi).abs() < 0.01, "d={d}: upper {a_hi} vs {hi}");
        }
        assert_eq!(alpha_from_distance(0.0, Branch::Lower).unwrap(), 1.0);
        assert_eq!(alpha_from_distance(0.0, Branch::Upper).unwrap(), 1.0);
    }

    #[test]
    fn inversion_roundtrip() {
        for &alpha in &[0.1, 0.5, 0.9, 1.1, 3.0, 10.0] {
            let dv = distance(alpha).unwrap();
            let back = alpha_from_distance(dv.d, dv.branch).unwrap();
            assert!((back - alpha).abs() < 1e-8, "alpha={alpha}: back={back}");
        }
    }

    #[test]
    fn branches_not_equidistant() {
        for &d in &[0.1, 0.5, 0.8, 1.45] {
            let lo = alpha_from_distance(d, Branch::Lower).unwrap();
            let hi = alpha_from_distance(d, Branch::Upper).unwrap();
            assert!(((1.0 - lo) - (hi - 1.0)).abs() > 1e-3, "d={d}");
        }
    }

    #[test]
    fn saturation_below_floor() {
        assert!(matches!(kld_p2(0.005), Err(Error::Saturated(_))));
        let d_floor = distance(ALPHA_FLOOR).unwrap().d;
        assert!(matches!(
            alpha_from_distance(d_floor * 2.0, Branch::Lower),
            Err(Error::Saturated(_))
        ));
    }

    #[test]
    fn curvature_matches_quadrature() {
        // the expansion constant must agree with the closed form just outside
        // the expansion window
        let alpha = 1.0 + 2e-5;
        let exact = kld2_bracket(alpha) / alpha;
        let approx = 0.5 * base_curvature() * (alpha - 1.0).powi(2);
        assert!(
            ((exact - approx) / approx).abs() < 1e-3,
            "exact={exact:e}, approx={approx:e}"
        );
    }
}
