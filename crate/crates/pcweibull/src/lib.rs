//! Penalized-complexity prior for the shape of the Weibull model.
//!
//! The Weibull model generalizes the exponential model through its shape
//! parameter; this crate implements a prior for that shape built from an
//! exponential distribution on the Kullback-Leibler distance to the
//! exponential base model, alongside the classical improper-uniform and
//! Gamma(a,a) reference priors, and a right-censored Bayesian Weibull
//! regression that uses them.
//!
//! Modules:
//! - [`numerics`]: special functions, quadrature, root finding, seeded RNG
//! - [`weibull`]: densities, hazards, the censored likelihood, simulation
//! - [`divergence`]: closed-form KLD, the distance scale and its inversion
//! - [`pc_prior`]: the prior itself (density, CDF, quantile, sampler)
//! - [`reference_priors`]: improper and gamma priors with distance tables
//! - [`inference`]: grid and MCMC posterior engines, sensitivity sweep

pub mod cli;
pub mod divergence;
pub mod error;
pub mod inference;
pub mod numerics;
pub mod pc_prior;
pub mod reference_priors;
pub mod weibull;

pub use error::{Error, Result};
