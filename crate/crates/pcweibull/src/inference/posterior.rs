//! Unnormalized log posterior for the censored Weibull regression, plus the
//! prior and fit configuration types shared by both engines.

use serde::Serialize;

use crate::divergence::ALPHA_FLOOR;
use crate::error::{Error, Result};
use crate::pc_prior::{self, PcPriorSpec};
use crate::reference_priors::{gamma_density, GammaPriorSpec};
use crate::weibull::{censored_loglik, SurvivalDataset};

/// Prior on the shape parameter.
#[derive(Debug, Clone, Copy)]
pub enum AlphaPrior {
    Pc(PcPriorSpec),
    Gamma(GammaPriorSpec),
    ImproperUniform,
}

/// Priors for the whole model: one on the shape, independent zero-mean
/// Gaussians on the regression coefficients.
#[derive(Debug, Clone, Copy)]
pub struct PriorChoice {
    pub alpha_prior: AlphaPrior,
    pub beta_prior_sd: f64,
}

impl PriorChoice {
    pub fn new(alpha_prior: AlphaPrior, beta_prior_sd: f64) -> Result<Self> {
        if !(beta_prior_sd > 0.0) || !beta_prior_sd.is_finite() {
            return Err(Error::Domain(format!(
                "beta prior sd must be > 0, got {beta_prior_sd}"
            )));
        }
        Ok(Self {
            alpha_prior,
            beta_prior_sd,
        })
    }

    pub fn pc_default() -> Self {
        Self {
            alpha_prior: AlphaPrior::Pc(PcPriorSpec::default()),
            beta_prior_sd: DEFAULT_BETA_PRIOR_SD,
        }
    }
}

pub const DEFAULT_BETA_PRIOR_SD: f64 = 10.0;

/// Which posterior engine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Grid,
    Mcmc,
    Both,
}

/// Engine settings.
#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    pub engine: Engine,
    pub alpha_range: (f64, f64),
    pub alpha_grid_points: usize,
    pub beta_grid_points: usize,
    pub mcmc_iters: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub credible_level: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Grid,
            alpha_range: (0.05, 20.0),
            alpha_grid_points: 400,
            beta_grid_points: 200,
            mcmc_iters: 50_000,
            burn_in: 10_000,
            seed: 0,
            credible_level: 0.95,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.alpha_range;
        if !(lo > 0.0 && lo < 1.0 && hi > 1.0) {
            return Err(Error::Domain(format!(
                "alpha_range must satisfy 0 < lo < 1 < hi, got ({lo}, {hi})"
            )));
        }
        if lo < ALPHA_FLOOR {
            return Err(Error::Domain(format!(
                "alpha_range lower bound {lo} is below the distance-scale floor {ALPHA_FLOOR}"
            )));
        }
        if self.alpha_grid_points < 50 || self.beta_grid_points < 50 {
            return Err(Error::Domain("grid_points must be >= 50 per dimension".into()));
        }
        if self.burn_in >= self.mcmc_iters {
            return Err(Error::Domain(format!(
                "burn_in ({}) must be < mcmc_iters ({})",
                self.burn_in, self.mcmc_iters
            )));
        }
        if !(self.credible_level > 0.0 && self.credible_level < 1.0) {
            return Err(Error::Domain("credible_level must be in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Log prior for the shape under the chosen prior; -inf outside support.
pub fn alpha_log_prior(alpha: f64, prior: &AlphaPrior) -> Result<f64> {
    match prior {
        AlphaPrior::Pc(spec) => pc_prior::log_density(alpha, spec),
        AlphaPrior::Gamma(spec) => {
            let d = gamma_density(alpha, spec)?;
            Ok(if d > 0.0 { d.ln() } else { f64::NEG_INFINITY })
        }
        AlphaPrior::ImproperUniform => Ok(0.0),
    }
}

/// Unnormalized log posterior: censored likelihood + shape prior + Gaussian
/// coefficient priors.
pub fn log_posterior(
    alpha: f64,
    beta: &[f64],
    data: &SurvivalDataset,
    prior: &PriorChoice,
) -> Result<f64> {
    let ll = censored_loglik(alpha, beta, data)?;
    let lp_alpha = alpha_log_prior(alpha, &prior.alpha_prior)?;
    let sd = prior.beta_prior_sd;
    let norm = -0.5 * (2.0 * std::f64::consts::PI).ln() - sd.ln();
    let lp_beta: f64 = beta.iter().map(|b| norm - 0.5 * (b / sd).powi(2)).sum();
    let total = ll + lp_alpha + lp_beta;
    if total.is_nan() {
        return Err(Error::Numeric {
            context: format!("log_posterior at alpha={alpha}, beta={beta:?}"),
        });
    }
    Ok(total)
}

/// Marginal summaries reported per parameter.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub mode: f64,
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Engine diagnostics.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub acceptance_rate: Option<f64>,
    pub ess_alpha: Option<f64>,
    pub grid_mass_captured: Option<f64>,
    pub warnings: Vec<String>,
}

/// Marginal density grid and summaries from one posterior fit.
#[derive(Debug, Clone, Serialize)]
pub struct PosteriorResult {
    /// (alpha, density) pairs; integrates to 1.
    pub alpha_marginal: Vec<(f64, f64)>,
    pub alpha_summary: Summary,
    pub beta_summaries: Vec<Summary>,
    pub engine_used: Engine,
    pub diagnostics: Diagnostics,
}

impl PosteriorResult {
    /// Posterior probability that the shape lies in (lo, hi), from the
    /// marginal grid by the trapezoid rule.
    pub fn prob_alpha_between(&self, lo: f64, hi: f64) -> f64 {
        let g = &self.alpha_marginal;
        let mut mass = 0.0;
        for w in g.windows(2) {
            let (a0, f0) = w[0];
            let (a1, f1) = w[1];
            if a1 <= lo || a0 >= hi {
                continue;
            }
            let c0 = a0.max(lo);
            let c1 = a1.min(hi);
            // linear interpolation of the density across the cell
            let t0 = (c0 - a0) / (a1 - a0);
            let t1 = (c1 - a0) / (a1 - a0);
            let g0 = f0 + t0 * (f1 - f0);
            let g1 = f0 + t1 * (f1 - f0);
            mass += 0.5 * (g0 + g1) * (c1 - c0);
        }
        mass
    }
}

/// Summaries from a normalized density grid (uniform spacing assumed only
/// piecewise; trapezoid everywhere).
pub(crate) fn summarize_grid(grid: &[(f64, f64)], credible_level: f64) -> Summary {
    let mut mass = 0.0;
    let mut mean = 0.0;
    for w in grid.windows(2) {
        let h = w[1].0 - w[0].0;
        mass += 0.5 * (w[0].1 + w[1].1) * h;
        mean += 0.5 * (w[0].0 * w[0].1 + w[1].0 * w[1].1) * h;
    }
    mean /= mass;
    let mut var = 0.0;
    for w in grid.windows(2) {
        let h = w[1].0 - w[0].0;
        let f0 = (w[0].0 - mean).powi(2) * w[0].1;
        let f1 = (w[1].0 - mean).powi(2) * w[1].1;
        var += 0.5 * (f0 + f1) * h;
    }
    var /= mass;
    let mode = grid
        .iter()
        .cloned()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(x, _)| x)
        .unwrap_or(f64::NAN);
    let tail = 0.5 * (1.0 - credible_level);
    let ci_lower = grid_quantile(grid, mass, tail);
    let ci_upper = grid_quantile(grid, mass, 1.0 - tail);
    Summary {
        mode,
        mean,
        sd: var.max(0.0).sqrt(),
        ci_lower,
        ci_upper,
    }
}

fn grid_quantile(grid: &[(f64, f64)], total_mass: f64, q: f64) -> f64 {
    let target = q * total_mass;
    let mut acc = 0.0;
    for w in grid.windows(2) {
        let h = w[1].0 - w[0].0;
        let cell = 0.5 * (w[0].1 + w[1].1) * h;
        if acc + cell >= target {
            let frac = if cell > 0.0 { (target - acc) / cell } else { 0.0 };
            return w[0].0 + frac * h;
        }
        acc += cell;
    }
    grid.last().map(|g| g.0).unwrap_or(f64::NAN)
}
