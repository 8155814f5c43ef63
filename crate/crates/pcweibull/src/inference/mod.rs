//! Bayesian Weibull proportional-hazards regression with right censoring:
//! a deterministic grid engine for small models, an adaptive
//! random-walk-Metropolis engine for general models, and the theta
//! sensitivity sweep.

mod grid;
mod mcmc;
mod posterior;

pub use grid::fit_grid;
pub use mcmc::fit_mcmc;
pub use posterior::{
    alpha_log_prior, log_posterior, AlphaPrior, Diagnostics, Engine, FitConfig, PosteriorResult,
    PriorChoice, Summary, DEFAULT_BETA_PRIOR_SD,
};

use crate::error::Result;
use crate::pc_prior::PcPriorSpec;
use crate::weibull::SurvivalDataset;

/// The ten-rate sweep used for the published sensitivity protocol.
pub const DEFAULT_SENSITIVITY_THETAS: [f64; 10] =
    [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0];

/// Run one fit with the configured engine (grid preferred under `Both`).
pub fn fit(data: &SurvivalDataset, prior: &PriorChoice, cfg: &FitConfig) -> Result<PosteriorResult> {
    match cfg.engine {
        Engine::Grid | Engine::Both => fit_grid(data, prior, cfg),
        Engine::Mcmc => fit_mcmc(data, prior, cfg),
    }
}

/// One fit per theta with everything else held fixed.
pub fn sensitivity_sweep(
    data: &SurvivalDataset,
    thetas: &[f64],
    beta_prior_sd: f64,
    cfg: &FitConfig,
) -> Result<Vec<(f64, PosteriorResult)>> {
    thetas
        .iter()
        .map(|&theta| {
            let prior = PriorChoice::new(AlphaPrior::Pc(PcPriorSpec::new(theta)?), beta_prior_sd)?;
            Ok((theta, fit(data, &prior, cfg)?))
        })
        .collect()
}
