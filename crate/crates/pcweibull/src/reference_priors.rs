//! The improper uniform and Gamma(a,a) reference priors for the shape, and
//! their behaviour on the distance scale.
//!
//! Gamma(a,a) is ambiguous: the printed density formula is rate-form while
//! the published distance tables match the scale-form density. Both
//! conventions are available; table reproduction uses `Scale`.

use serde::{Deserialize, Serialize};

use crate::divergence::{alpha_from_distance, distance_deriv, Branch};
use crate::error::{Error, Result};
use crate::numerics::ln_gamma;

/// Gamma(a,a) reading: rate (density ~ a^a x^{a-1} e^{-ax}) or scale
/// (density ~ a^{-a} x^{a-1} e^{-x/a}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaConvention {
    Rate,
    Scale,
}

#[derive(Debug, Clone, Copy)]
pub struct GammaPriorSpec {
    pub a: f64,
    pub convention: GammaConvention,
}

impl GammaPriorSpec {
    pub fn new(a: f64, convention: GammaConvention) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("gamma parameter must be > 0, got {a}")));
        }
        Ok(Self { a, convention })
    }
}

/// Gamma(a,a) density at alpha under the chosen convention.
pub fn gamma_density(alpha: f64, spec: &GammaPriorSpec) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("shape must be > 0, got {alpha}")));
    }
    let a = spec.a;
    let log_dens = match spec.convention {
        GammaConvention::Rate => {
            a * a.ln() - ln_gamma(a)? + (a - 1.0) * alpha.ln() - a * alpha
        }
        GammaConvention::Scale => {
            -a * a.ln() - ln_gamma(a)? + (a - 1.0) * alpha.ln() - alpha / a
        }
    };
    Ok(log_dens.exp())
}

/// The improper uniform prior (unnormalized constant 1).
pub fn improper_density(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("shape must be > 0, got {alpha}")));
    }
    Ok(1.0)
}

/// One row of the distance-to-density table: both branch shapes for a given
/// distance and the gamma prior density at each.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceTableRow {
    pub distance: f64,
    pub alpha_lower: f64,
    pub dens_lower: f64,
    pub alpha_upper: f64,
    pub dens_upper: f64,
}

/// Build table rows for a list of distances under a gamma prior.
pub fn distance_table(distances: &[f64], prior: &GammaPriorSpec) -> Result<Vec<DistanceTableRow>> {
    distances
        .iter()
        .map(|&d| {
            let alpha_lower = alpha_from_distance(d, Branch::Lower)?;
            let alpha_upper = alpha_from_distance(d, Branch::Upper)?;
            Ok(DistanceTableRow {
                distance: d,
                alpha_lower,
                dens_lower: gamma_density(alpha_lower, prior)?,
                alpha_upper,
                dens_upper: gamma_density(alpha_upper, prior)?,
            })
        })
        .collect()
}

/// Pushforward of a gamma prior onto the distance scale for one branch:
/// pi_G(alpha(d)) * |dalpha/dd|.
pub fn gamma_prior_on_distance_scale(
    prior: &GammaPriorSpec,
    branch: Branch,
    d_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    d_grid
        .iter()
        .map(|&d| {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::Domain(format!("distance must be >= 0 and finite, got {d}")));
            }
            if d == 0.0 {
                // |dalpha/dd| at d=0 is 1/sqrt(KLD2''(1))
                let jac = 1.0 / crate::divergence::base_curvature().sqrt();
                return Ok((d, gamma_density(1.0, prior)? * jac));
            }
            let alpha = alpha_from_distance(d, branch)?;
            let jac = 1.0 / distance_deriv(alpha)?.abs();
            Ok((d, gamma_density(alpha, prior)? * jac))
        })
        .collect()
}

/// Pushforward of the PC prior onto the distance scale; closed form
/// (theta/2) e^{-theta d} per branch, exposed for the comparison plots.
pub fn pc_prior_on_distance_scale(theta: f64, d_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("theta must be > 0, got {theta}")));
    }
    Ok(d_grid
        .iter()
        .map(|&d| (d, 0.5 * theta * (-theta * d).exp()))
        .collect())
}
