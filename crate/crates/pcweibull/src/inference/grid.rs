//! Deterministic tensor-grid posterior for models with at most two
//! regression coefficients. Exact up to quadrature error; serves as the
//! oracle the MCMC engine is cross-checked against.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::weibull::SurvivalDataset;

use super::posterior::{
    log_posterior, summarize_grid, Diagnostics, Engine, FitConfig, PosteriorResult, PriorChoice,
    Summary,
};

/// Posterior mode of (ln alpha, beta) by cyclic line search.
pub(crate) fn find_mode(
    data: &SurvivalDataset,
    prior: &PriorChoice,
) -> Result<Vec<f64>> {
    let k = data.n_covariates();
    let objective = |z: &[f64]| -> f64 {
        let alpha = z[0].exp();
        if alpha <= crate::divergence::ALPHA_FLOOR || alpha > 1e6 {
            return f64::NEG_INFINITY;
        }
        log_posterior(alpha, &z[1..], data, prior).unwrap_or(f64::NEG_INFINITY)
    };
    let mut z = vec![0.0; k + 1];
    if objective(&z) == f64::NEG_INFINITY {
        return Err(Error::Numeric {
            context: "log posterior is -inf at the starting point".into(),
        });
    }
    for _ in 0..80 {
        let mut max_move = 0.0f64;
        for j in 0..=k {
            let current = z[j];
            let f1 = |v: f64| {
                let mut zz = z.clone();
                zz[j] = v;
                objective(&zz)
            };
            let new = line_maximize(&f1, current);
            max_move = max_move.max((new - current).abs());
            z[j] = new;
        }
        if max_move < 1e-9 {
            break;
        }
    }
    Ok(z)
}

// Expand a bracket around x0, then golden-section to ~1e-10.
fn line_maximize<F: Fn(f64) -> f64>(f: &F, x0: f64) -> f64 {
    let mut step = 0.25;
    let mut a = x0 - step;
    let mut b = x0 + step;
    let mut fa = f(a);
    let mut fm = f(x0);
    let mut fb = f(b);
    let mut m = x0;
    for _ in 0..80 {
        if fm >= fa && fm >= fb {
            break;
        }
        if fa > fm {
            b = m;
            fb = fm;
            m = a;
            fm = fa;
            step *= 2.0;
            a = m - step;
            fa = f(a);
        } else {
            a = m;
            fa = fm;
            m = b;
            fm = fb;
            step *= 2.0;
            b = m + step;
            fb = f(b);
        }
    }
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

// Curvature-based scales in (ln alpha, beta) space at the mode.
pub(crate) fn mode_scales(
    z_mode: &[f64],
    data: &SurvivalDataset,
    prior: &PriorChoice,
) -> Vec<f64> {
    let objective = |z: &[f64]| -> f64 {
        let alpha = z[0].exp();
        if alpha <= crate::divergence::ALPHA_FLOOR {
            return f64::NEG_INFINITY;
        }
        log_posterior(alpha, &z[1..], data, prior).unwrap_or(f64::NEG_INFINITY)
    };
    let h = 1e-4;
    let f0 = objective(z_mode);
    z_mode
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let mut zp = z_mode.to_vec();
            let mut zm = z_mode.to_vec();
            zp[j] += h;
            zm[j] -= h;
            let second = (objective(&zp) - 2.0 * f0 + objective(&zm)) / (h * h);
            if second < 0.0 {
                (-1.0 / second).sqrt()
            } else {
                1.0 // flat or ill-conditioned direction; fall back to unit scale
            }
        })
        .collect()
}

/// Tensor-grid posterior fit for K <= 2 coefficients.
pub fn fit_grid(
    data: &SurvivalDataset,
    prior: &PriorChoice,
    cfg: &FitConfig,
) -> Result<PosteriorResult> {
    cfg.validate()?;
    let k = data.n_covariates();
    if k > 2 {
        return Err(Error::Capability(format!(
            "grid engine supports at most 2 coefficients, got {k}; use the MCMC engine"
        )));
    }
    if data.n_events() == 0 {
        return Err(Error::Dataset("need at least one observed event".into()));
    }

    let z_mode = find_mode(data, prior)?;
    let scales = mode_scales(&z_mode, data, prior);

    // beta axes: mode +/- 8 curvature sds
    let beta_axes: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let center = z_mode[j + 1];
            let half = 8.0 * scales[j + 1];
            linspace(center - half, center + half, cfg.beta_grid_points)
        })
        .collect();
    let alpha_axis = linspace(cfg.alpha_range.0, cfg.alpha_range.1, cfg.alpha_grid_points);

    // log posterior per alpha slice, beta dims flattened
    let beta_cells: usize = beta_axes.iter().map(|a| a.len()).product::<usize>().max(1);
    let slices: Vec<Vec<f64>> = alpha_axis
        .par_iter()
        .map(|&alpha| {
            let mut slice = vec![f64::NEG_INFINITY; beta_cells];
            let mut beta = vec![0.0; k];
            for (cell, value) in slice.iter_mut().enumerate() {
                let mut rem = cell;
                for j in 0..k {
                    beta[j] = beta_axes[j][rem % beta_axes[j].len()];
                    rem /= beta_axes[j].len();
                }
                *value = log_posterior(alpha, &beta, data, prior).unwrap_or(f64::NEG_INFINITY);
            }
            slice
        })
        .collect();

    let max_log = slices
        .iter()
        .flat_map(|s| s.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max_log.is_finite() {
        return Err(Error::Numeric {
            context: "posterior is zero everywhere on the grid".into(),
        });
    }

    // trapezoid weights along the flattened beta dims
    let beta_weight = |cell: usize| -> f64 {
        let mut w = 1.0;
        let mut rem = cell;
        for axis in beta_axes.iter() {
            let idx = rem % axis.len();
            rem /= axis.len();
            let h = if axis.len() > 1 { axis[1] - axis[0] } else { 1.0 };
            w *= if idx == 0 || idx == axis.len() - 1 { 0.5 * h } else { h };
        }
        w
    };
    let beta_weights: Vec<f64> = (0..beta_cells).map(beta_weight).collect();

    // unnormalized alpha marginal
    let mut alpha_marginal: Vec<(f64, f64)> = alpha_axis
        .iter()
        .zip(&slices)
        .map(|(&alpha, slice)| {
            let m: f64 = slice
                .iter()
                .zip(&beta_weights)
                .map(|(&lp, &w)| (lp - max_log).exp() * w)
                .sum();
            (alpha, m)
        })
        .collect();
    let alpha_mass = trapezoid(&alpha_marginal);
    for point in alpha_marginal.iter_mut() {
        point.1 /= alpha_mass;
    }

    // beta marginals: sum out alpha (trapezoid) and the other beta dims
    let alpha_h = alpha_axis[1] - alpha_axis[0];
    let beta_summaries: Vec<Summary> = (0..k)
        .map(|j| {
            let axis = &beta_axes[j];
            let mut marg: Vec<(f64, f64)> = axis.iter().map(|&b| (b, 0.0)).collect();
            for (ai, slice) in slices.iter().enumerate() {
                let wa = if ai == 0 || ai == alpha_axis.len() - 1 {
                    0.5 * alpha_h
                } else {
                    alpha_h
                };
                for (cell, &lp) in slice.iter().enumerate() {
                    let mut rem = cell;
                    let mut idx_j = 0;
                    let mut w_other = 1.0;
                    for (jj, ax) in beta_axes.iter().enumerate() {
                        let idx = rem % ax.len();
                        rem /= ax.len();
                        let h = if ax.len() > 1 { ax[1] - ax[0] } else { 1.0 };
                        let w = if idx == 0 || idx == ax.len() - 1 { 0.5 * h } else { h };
                        if jj == j {
                            idx_j = idx;
                        } else {
                            w_other *= w;
                        }
                    }
                    marg[idx_j].1 += (lp - max_log).exp() * wa * w_other;
                }
            }
            let mass = trapezoid(&marg);
            for point in marg.iter_mut() {
                point.1 /= mass;
            }
            summarize_grid(&marg, cfg.credible_level)
        })
        .collect();

    let alpha_summary = summarize_grid(&alpha_marginal, cfg.credible_level);

    let mut diagnostics = Diagnostics::default();
    let captured = mass_captured(&alpha_marginal);
    diagnostics.grid_mass_captured = Some(captured);
    if captured < 0.999 {
        diagnostics.warnings.push(format!(
            "estimated {:.4} of posterior mass inside alpha_range {:?}; widen the range",
            captured, cfg.alpha_range
        ));
    }

    Ok(PosteriorResult {
        alpha_marginal,
        alpha_summary,
        beta_summaries,
        engine_used: Engine::Grid,
        diagnostics,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn trapezoid(grid: &[(f64, f64)]) -> f64 {
    grid.windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

// Log-linear extrapolation of the marginal past each end of the grid.
fn mass_captured(marginal: &[(f64, f64)]) -> f64 {
    let tail = |f_in: f64, f_end: f64, h: f64| -> f64 {
        if f_end <= 0.0 {
            return 0.0;
        }
        if f_in <= f_end {
            // marginal not decaying at the cut: the grid is truncating the
            // posterior; charge at least a unit-width tail at boundary height
            return f_end;
        }
        let rate = (f_in.ln() - f_end.ln()) / h;
        f_end / rate
    };
    let n = marginal.len();
    let h_lo = marginal[1].0 - marginal[0].0;
    let h_hi = marginal[n - 1].0 - marginal[n - 2].0;
    let t = tail(marginal[1].1, marginal[0].1, h_lo) + tail(marginal[n - 2].1, marginal[n - 1].1, h_hi);
    1.0 / (1.0 + t)
}
